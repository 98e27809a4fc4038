#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "gbs/matrix.hpp"
#include "gbs/rng.hpp"

namespace test_util {

inline gbs::Mat random_symmetric(std::size_t d, gbs::Rng& rng) {
    gbs::Mat a(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            gbs::cplx v(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

inline gbs::Mat random_matrix(std::size_t r, std::size_t c, gbs::Rng& rng) {
    gbs::Mat a(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            a(i, j) = gbs::cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    return a;
}

/// Cofactor-expansion determinant, exponential cost; independent oracle
/// for the LU path.
inline gbs::cplx cofactor_det(const gbs::Mat& a) {
    std::size_t n = a.rows();
    if (n == 0) return 1.0;
    if (n == 1) return a(0, 0);
    gbs::cplx det = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        gbs::Mat minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = a(r, c);
            }
        }
        gbs::cplx term = a(0, j) * cofactor_det(minor);
        det += (j % 2 == 0) ? term : -term;
    }
    return det;
}

/// Total variation distance between empirical counts and a probability
/// table over the same pattern space. Patterns seen empirically but not
/// listed contribute their full empirical mass.
inline double tvd(const std::map<std::vector<int>, long>& counts, long total,
                  const std::map<std::vector<int>, double>& probs) {
    double d = 0.0;
    for (const auto& [pat, p] : probs) {
        auto it = counts.find(pat);
        double emp = (it == counts.end()) ? 0.0 : static_cast<double>(it->second) / total;
        d += std::abs(emp - p);
    }
    for (const auto& [pat, c] : counts)
        if (!probs.count(pat)) d += static_cast<double>(c) / total;
    return 0.5 * d;
}

// Regularized upper incomplete gamma Q(a, x), series / continued fraction.
inline double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 0.0;
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

/// Chi-square upper-tail p-value.
inline double chi2_pvalue(double stat, int dof) { return gammq(0.5 * dof, 0.5 * stat); }

}  // namespace test_util
