#include "gbs/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "gbs/kernels.hpp"

namespace gbs::oracle {

namespace {

void enumerate_patterns(std::size_t m, int per_mode, int total, std::vector<int>& cur,
                        const std::function<void(const std::vector<int>&)>& emit) {
    if (cur.size() == m) {
        emit(cur);
        return;
    }
    int used = 0;
    for (int v : cur) used += v;
    for (int s = 0; s <= per_mode && used + s <= total; ++s) {
        cur.push_back(s);
        enumerate_patterns(m, per_mode, total, cur, emit);
        cur.pop_back();
    }
}

}  // namespace

FockTable fock_distribution(const GaussianState& state, int per_mode_cutoff, int total_cutoff) {
    if (state.modes() > 3)
        throw std::invalid_argument("fock_distribution: only m <= 3 instances are tabulated");
    if (per_mode_cutoff < 0) throw std::invalid_argument("fock_distribution: negative cutoff");
    if (total_cutoff < 0) total_cutoff = per_mode_cutoff * static_cast<int>(state.modes());

    FockTable table;
    table.per_mode_cutoff = per_mode_cutoff;
    table.total_cutoff = total_cutoff;

    bool pure_route = state.pure_kernel().has_value() && !state.has_displacement();
    double inv_sqrt_det = 0.0;
    const Mat* b = nullptr;
    if (pure_route) {
        b = &*state.pure_kernel();
        inv_sqrt_det = 1.0 / std::sqrt(std::abs(lu_det(state.husimi_q()).real()));
    }

    std::vector<int> cur;
    enumerate_patterns(state.modes(), per_mode_cutoff, total_cutoff, cur,
                       [&](const std::vector<int>& pat) {
                           double p;
                           if (pure_route) {
                               // A = B (+) B* factorizes the hafnian:
                               // Haf(A_S) = |Haf(B_S)|^2 at half dimension.
                               // Odd totals have no perfect matching.
                               int total = 0;
                               for (int s : pat) total += s;
                               if (total % 2 != 0) {
                                   p = 0.0;
                               } else {
                                   Mat bs = reduce_by_pattern_single(*b, pat);
                                   double f = 1.0;
                                   for (int s : pat) f *= factorial(s);
                                   p = std::norm(haf_fast(bs)) * inv_sqrt_det / f;
                               }
                           } else {
                               PhotonPattern s{pat, Detector::pnr};
                               p = state.prob_displaced(s);
                           }
                           table.rows.push_back({pat, p});
                           table.mass += p;
                       });
    return table;
}

double squeezed_vacuum_pnr(double r, int n) {
    if (n < 0) return 0.0;
    if (n % 2 != 0) return 0.0;
    int k = n / 2;
    double t = std::tanh(r);
    // (2k)! / (2^k k!)^2 = binomial(2k, k) / 4^k
    double ratio = 1.0;
    for (int i = 1; i <= k; ++i) ratio *= static_cast<double>(2 * i - 1) / (2.0 * i);
    return ratio * std::pow(t * t, k) / std::cosh(r);
}

double coherent_pnr(double mean, int n) {
    if (n < 0) return 0.0;
    return std::exp(-mean) * std::pow(mean, n) / factorial(n);
}

double threshold_marginal(const FockTable& table, const std::vector<int>& clicks) {
    double p = 0.0;
    for (const FockRow& row : table.rows) {
        if (row.pattern.size() != clicks.size())
            throw std::invalid_argument("threshold_marginal: pattern length mismatch");
        bool match = true;
        for (std::size_t i = 0; i < clicks.size(); ++i) {
            bool clicked = row.pattern[i] > 0;
            if (clicked != (clicks[i] == 1)) {
                match = false;
                break;
            }
        }
        if (match) p += row.p;
    }
    return p;
}

double mixture_prob(const MixtureSpec& mix, const PhotonPattern& s) {
    mix.validate();
    double p = 0.0;
    for (const auto& c : mix.components) {
        double pi = (s.flavor == Detector::threshold) ? c.state.prob_threshold(s)
                                                      : c.state.prob_displaced(s);
        p += c.q * pi;
    }
    return p;
}

void write_csv(const FockTable& table, std::ostream& os) {
    os << "pattern,probability\n";
    char buf[64];
    for (const FockRow& row : table.rows) {
        for (std::size_t i = 0; i < row.pattern.size(); ++i) {
            if (i) os << ' ';
            os << row.pattern[i];
        }
        std::snprintf(buf, sizeof buf, "%.17g", row.p);
        os << ',' << buf << '\n';
    }
}

}  // namespace gbs::oracle
