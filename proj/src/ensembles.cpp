#include "gbs/ensembles.hpp"

#include <cmath>

namespace gbs {

Mat haar_unitary(std::size_t m, Rng& rng) {
    if (m == 0) throw std::invalid_argument("haar_unitary: m must be >= 1");
    const double inv_sqrt2 = 0.70710678118654752440;
    Mat a(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            a(i, j) = cplx(rng.normal(), rng.normal()) * inv_sqrt2;

    // Householder QR; reflectors are replayed onto the identity to form Q.
    std::vector<std::vector<cplx>> reflectors;
    std::vector<cplx> r_diag(m);
    for (std::size_t k = 0; k < m; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) norm2 += std::norm(a(i, k));
        double norm = std::sqrt(norm2);
        cplx x0 = a(k, k);
        cplx phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cplx(1.0, 0.0);
        cplx alpha = -phase * norm;

        std::vector<cplx> v(m, cplx(0.0, 0.0));
        double vnorm2 = std::norm(x0 - alpha);
        v[k] = x0 - alpha;
        for (std::size_t i = k + 1; i < m; ++i) {
            v[i] = a(i, k);
            vnorm2 += std::norm(v[i]);
        }
        if (vnorm2 > 1e-300) {
            double inv = 1.0 / std::sqrt(vnorm2);
            for (std::size_t i = k; i < m; ++i) v[i] *= inv;
            for (std::size_t j = k; j < m; ++j) {
                cplx s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += std::conj(v[i]) * a(i, j);
                s *= 2.0;
                for (std::size_t i = k; i < m; ++i) a(i, j) -= s * v[i];
            }
        } else {
            v.assign(m, cplx(0.0, 0.0));
        }
        reflectors.push_back(std::move(v));
        r_diag[k] = a(k, k);
    }

    Mat q = Mat::identity(m);
    for (std::size_t kk = m; kk-- > 0;) {
        const auto& v = reflectors[kk];
        for (std::size_t j = 0; j < m; ++j) {
            cplx s = 0.0;
            for (std::size_t i = kk; i < m; ++i) s += std::conj(v[i]) * q(i, j);
            s *= 2.0;
            for (std::size_t i = kk; i < m; ++i) q(i, j) -= s * v[i];
        }
    }

    // Fix the residual phase freedom so the distribution is Haar.
    for (std::size_t j = 0; j < m; ++j) {
        cplx d = r_diag[j];
        cplx phase = (std::abs(d) > 0.0) ? d / std::abs(d) : cplx(1.0, 0.0);
        for (std::size_t i = 0; i < m; ++i) q(i, j) *= phase;
    }
    return q;
}

Mat erdos_renyi(std::size_t n, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("erdos_renyi: p outside [0, 1]");
    Mat adj(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double edge = (rng.uniform() < p) ? 1.0 : 0.0;
            adj(i, j) = edge;
            adj(j, i) = edge;
        }
    return adj;
}

}  // namespace gbs
