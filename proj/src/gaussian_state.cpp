#include "gbs/gaussian_state.hpp"

#include <algorithm>
#include <cmath>

#include "gbs/kernels.hpp"

namespace gbs {

void PhotonPattern::validate() const {
    for (int s : counts) {
        if (s < 0) throw std::invalid_argument("pattern entry negative");
        if (flavor == Detector::threshold && s > 1)
            throw std::invalid_argument("threshold pattern must be binary");
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

namespace {

double pattern_factorial(const std::vector<int>& s) {
    double f = 1.0;
    for (int v : s) f *= factorial(v);
    return f;
}

Mat hermitize(const Mat& a) {
    Mat h(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return h;
}

Mat symmetrize(const Mat& a) {
    Mat s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

// X M for the 2k x 2k block swap X = [[0, I], [I, 0]]: swap row blocks.
Mat block_swap_rows(const Mat& m) {
    std::size_t k = m.rows() / 2;
    Mat r(m.rows(), m.cols());
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            r(i, j) = m(i + k, j);
            r(i + k, j) = m(i, j);
        }
    return r;
}

double real_positive_det(const Mat& q, const char* who) {
    cplx det = lu_det(q);
    if (std::abs(det.imag()) > 1e-8 * std::max(1.0, std::abs(det)) || det.real() <= 0.0)
        throw InvalidState(std::string(who) + ": det(Q) not real positive");
    return det.real();
}

double clamp_probability(cplx value, const char* who) {
    if (std::abs(value.imag()) > 1e-8 * std::max(1.0, std::abs(value)))
        throw InvalidState(std::string(who) + ": imaginary residue above tolerance");
    double p = value.real();
    if (p < 0.0) {
        if (p < -1e-9) throw InvalidState(std::string(who) + ": negative probability");
        p = 0.0;
    }
    return p;
}

}  // namespace

GaussianState GaussianState::vacuum(std::size_t m) {
    Mat sigma = 0.5 * Mat::identity(2 * m);
    GaussianState st(m, std::move(sigma), std::vector<cplx>(m, cplx(0.0, 0.0)));
    st.pure_b_ = Mat::zeros(m, m);
    return st;
}

GaussianState GaussianState::from_single_block(const Mat& b, const Mat& b_conj) {
    std::size_t m = b.rows();
    // I - XA with A = b (+) b_conj: [[I, -b_conj], [-b, I]]
    Mat one_minus_xa(2 * m, 2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        one_minus_xa(i, i) = 1.0;
        one_minus_xa(i + m, i + m) = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            one_minus_xa(i, j + m) = -b_conj(i, j);
            one_minus_xa(i + m, j) = -b(i, j);
        }
    }
    Mat q = inverse(one_minus_xa);
    Mat sigma = hermitize(q - 0.5 * Mat::identity(2 * m));
    GaussianState st(m, std::move(sigma), std::vector<cplx>(m, cplx(0.0, 0.0)));
    st.pure_b_ = b;
    st.require_valid();
    return st;
}

GaussianState GaussianState::from_squeezing_and_unitary(const std::vector<double>& r, const Mat& u) {
    std::size_t m = r.size();
    if (u.rows() != m || u.cols() != m)
        throw std::invalid_argument("from_squeezing_and_unitary: U is not m x m");
    Mat residual = u.adjoint() * u - Mat::identity(m);
    if (residual.max_abs() > 1e-8)
        throw std::invalid_argument("from_squeezing_and_unitary: U not unitary");
    for (double ri : r)
        if (!(std::abs(std::tanh(ri)) < 1.0))
            throw std::invalid_argument("from_squeezing_and_unitary: squeezing out of range");

    // B = U diag(tanh r) U^T; its singular values are |tanh r_i| < 1.
    Mat ud = u;
    for (std::size_t i = 0; i < m; ++i) {
        cplx t = std::tanh(r[i]);
        for (std::size_t row = 0; row < m; ++row) ud(row, i) *= t;
    }
    Mat b = symmetrize(ud * u.transpose());
    return from_single_block(b, b.conj());
}

GaussianState GaussianState::from_adjacency(const Mat& adjacency, double scale) {
    std::size_t m = adjacency.rows();
    if (adjacency.cols() != m) throw std::invalid_argument("from_adjacency: matrix not square");
    if (adjacency.max_abs_imag() > 1e-12)
        throw std::invalid_argument("from_adjacency: adjacency must be real");
    if (!adjacency.is_symmetric(1e-10))
        throw std::invalid_argument("from_adjacency: adjacency must be symmetric");
    if (min_entry(adjacency) < -1e-12)
        throw std::invalid_argument("from_adjacency: adjacency entries must be non-negative");
    if (scale < 0.0) throw std::invalid_argument("from_adjacency: scale must be non-negative");

    Mat b = cplx(scale, 0.0) * adjacency;
    // Real symmetric B: singular values below 1 iff I - B and I + B are PD.
    if (!is_positive_definite(Mat::identity(m) - b, 0.0) ||
        !is_positive_definite(Mat::identity(m) + b, 0.0))
        throw std::invalid_argument("from_adjacency: scale too large (singular value >= 1)");
    return from_single_block(b, b);
}

GaussianState GaussianState::from_covariance(Mat sigma, std::vector<cplx> mean) {
    if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0)
        throw std::invalid_argument("from_covariance: Sigma must be 2m x 2m");
    std::size_t m = sigma.rows() / 2;
    if (mean.size() != m) throw std::invalid_argument("from_covariance: mean must have length m");
    if (!sigma.is_hermitian(1e-10)) throw InvalidState("from_covariance: Sigma not Hermitian");
    return GaussianState(m, std::move(sigma), std::move(mean));
}

GaussianState GaussianState::with_mean(std::vector<cplx> mean) const {
    if (mean.size() != m_) throw std::invalid_argument("with_mean: mean must have length m");
    GaussianState st(m_, sigma_, std::move(mean));
    st.pure_b_ = pure_b_;
    return st;
}

bool GaussianState::has_displacement() const {
    for (const cplx& a : mean_)
        if (std::abs(a) > 0.0) return true;
    return false;
}

Mat GaussianState::husimi_q() const { return sigma_ + 0.5 * Mat::identity(2 * m_); }

KernelSet GaussianState::kernels() const {
    KernelSet ks;
    ks.Q = husimi_q();
    ks.O = Mat::identity(2 * m_) - inverse(ks.Q);
    ks.A = symmetrize(block_swap_rows(ks.O));
    return ks;
}

ReducedKernels GaussianState::reduced(std::size_t k) const {
    if (k < 1 || k > m_) throw std::invalid_argument("reduced: k out of range");
    Mat q_full = husimi_q();
    ReducedKernels red;
    red.k = k;
    red.Q = Mat(2 * k, 2 * k);
    auto src = [&](std::size_t i) { return i < k ? i : i - k + m_; };
    for (std::size_t i = 0; i < 2 * k; ++i)
        for (std::size_t j = 0; j < 2 * k; ++j) red.Q(i, j) = q_full(src(i), src(j));
    Mat q_inv = inverse(red.Q);
    red.O = Mat::identity(2 * k) - q_inv;
    red.A = symmetrize(block_swap_rows(red.O));
    red.det_Q = real_positive_det(red.Q, "reduced");

    red.alpha_vec.resize(2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        red.alpha_vec[i] = mean_[i];
        red.alpha_vec[i + k] = std::conj(mean_[i]);
    }
    red.gamma.assign(2 * k, cplx(0.0, 0.0));
    cplx quad = 0.0;
    for (std::size_t i = 0; i < 2 * k; ++i) {
        cplx g = 0.0;
        for (std::size_t j = 0; j < 2 * k; ++j) g += q_inv(i, j) * std::conj(red.alpha_vec[j]);
        red.gamma[i] = g;
        quad += red.alpha_vec[i] * g;
    }
    if (std::abs(quad.imag()) > 1e-8 * std::max(1.0, std::abs(quad)))
        throw InvalidState("reduced: displacement quadratic form not real");
    red.norm_prefactor = std::exp(-0.5 * quad.real()) / std::sqrt(red.det_Q);
    return red;
}

double GaussianState::mean_photons() const {
    double n = 0.0;
    for (std::size_t i = 0; i < m_; ++i) n += sigma_(i, i).real() - 0.5 + std::norm(mean_[i]);
    return n;
}

bool GaussianState::is_valid(double tol) const {
    if (!sigma_.is_hermitian(1e-10)) return false;
    // Sigma + Z/2 >= 0 with Z = diag(I, -I); implies Sigma > 0 and Q > I/2.
    Mat shifted = sigma_;
    for (std::size_t i = 0; i < m_; ++i) {
        shifted(i, i) += 0.5;
        shifted(i + m_, i + m_) -= 0.5;
    }
    return is_positive_definite(shifted, tol);
}

void GaussianState::require_valid() const {
    if (!is_valid()) throw InvalidState("state fails the covariance validity check");
}

bool GaussianState::check_nonneg_kernel() const {
    Mat a = kernels().A;
    return min_entry(a) >= -1e-10 && a.max_abs_imag() <= 1e-10;
}

bool GaussianState::check_nonneg_q() const {
    Mat q = husimi_q();
    return min_entry(q) >= -1e-10 && q.max_abs_imag() <= 1e-10;
}

bool GaussianState::o_spectrum_in_unit_ball() const {
    Mat o = kernels().O;
    Mat eye = Mat::identity(2 * m_);
    return is_positive_definite(eye - o, 0.0) && is_positive_definite(eye + o, 0.0);
}

double GaussianState::prob_pnr(const PhotonPattern& s) const {
    s.validate();
    require_valid();
    if (has_displacement()) throw InvalidState("prob_pnr: state has displacement");
    std::size_t k = s.counts.size();
    ReducedKernels red = reduced(k);
    Mat as = reduce_by_pattern(red.A, s.counts);
    cplx h = haf_fast(as);
    return clamp_probability(h * red.norm_prefactor / pattern_factorial(s.counts), "prob_pnr");
}

double GaussianState::prob_threshold(const PhotonPattern& s) const {
    s.validate();
    require_valid();
    if (has_displacement()) throw InvalidState("prob_threshold: state has displacement");
    std::size_t k = s.counts.size();
    if (k > m_) throw std::invalid_argument("prob_threshold: pattern longer than mode count");
    ReducedKernels red = reduced(k);
    cplx tor = torontonian(red.O, s.counts);
    return clamp_probability(tor / std::sqrt(red.det_Q), "prob_threshold");
}

double GaussianState::prob_displaced(const PhotonPattern& s) const {
    s.validate();
    require_valid();
    std::size_t k = s.counts.size();
    ReducedKernels red = reduced(k);
    Mat as = reduce_by_pattern(red.A, s.counts);
    std::vector<cplx> gs = reduce_vector_by_pattern(red.gamma, s.counts);
    for (std::size_t i = 0; i < gs.size(); ++i) as(i, i) = gs[i];
    cplx lh = loop_haf(as);
    return clamp_probability(lh * red.norm_prefactor / pattern_factorial(s.counts),
                             "prob_displaced");
}

void MixtureSpec::validate() const {
    if (components.empty()) throw std::invalid_argument("mixture: no components");
    double total = 0.0;
    std::size_t m = components.front().state.modes();
    for (const auto& c : components) {
        total += c.q;
        if (!is_signed && c.q < 0.0)
            throw std::invalid_argument("mixture: negative weight in probabilistic mixture");
        if (c.state.modes() != m) throw std::invalid_argument("mixture: mode counts differ");
    }
    if (std::abs(total - 1.0) > 1e-8)
        throw std::invalid_argument("mixture: weights must sum to 1");
}

namespace {

// Largest |eigenvalue| of a real symmetric non-negative matrix by power
// iteration; the Perron root dominates for non-negative matrices.
double spectral_radius_nonneg(const Mat& a) {
    std::size_t n = a.rows();
    std::vector<double> v(n, 1.0), w(n);
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a(i, j).real() * v[j];
            w[i] = s;
            norm += s * s;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        double next = norm;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
        if (it > 10 && std::abs(next - lambda) < 1e-12 * std::max(1.0, next)) return next;
        lambda = next;
    }
    return lambda;
}

}  // namespace

double auto_scale(const Mat& adjacency, double target_mean_photons) {
    if (target_mean_photons <= 0.0) throw std::invalid_argument("auto_scale: target must be > 0");
    double radius = spectral_radius_nonneg(adjacency);
    if (radius <= 0.0) throw std::invalid_argument("auto_scale: adjacency has no spectrum to scale");

    auto mean_at = [&](double c) -> double {
        try {
            return GaussianState::from_adjacency(adjacency, c).mean_photons();
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();  // at/over the singular edge
        }
    };

    double lo = 0.0, hi = (1.0 - 1e-9) / radius;
    if (mean_at(hi) < target_mean_photons)
        throw std::invalid_argument("auto_scale: target mean photon number unreachable");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double n = mean_at(mid);
        if (std::abs(n - target_mean_photons) <= 0.005 * target_mean_photons) return mid;
        (n < target_mean_photons ? lo : hi) = mid;
    }
    double c = 0.5 * (lo + hi);
    if (std::abs(mean_at(c) - target_mean_photons) > 0.01 * target_mean_photons)
        throw std::runtime_error("auto_scale: bisection failed to reach target within 1%");
    return c;
}

}  // namespace gbs
