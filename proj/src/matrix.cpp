#include "gbs/matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace gbs {

namespace memtrack {
namespace {
std::atomic<long long> g_live{0};
std::atomic<long long> g_peak{0};
}  // namespace

long long live_elements() { return g_live.load(std::memory_order_relaxed); }
long long peak_elements() { return g_peak.load(std::memory_order_relaxed); }
void reset_peak() { g_peak.store(g_live.load(std::memory_order_relaxed)); }

namespace detail {
void add(long long n) {
    if (n == 0) return;
    long long now = g_live.fetch_add(n, std::memory_order_relaxed) + n;
    long long prev = g_peak.load(std::memory_order_relaxed);
    while (now > prev && !g_peak.compare_exchange_weak(prev, now, std::memory_order_relaxed)) {
    }
}
void sub(long long n) {
    if (n == 0) return;
    g_live.fetch_sub(n, std::memory_order_relaxed);
}
}  // namespace detail
}  // namespace memtrack

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Mat Mat::conj() const {
    Mat c(rows_, cols_);
    for (std::size_t i = 0; i < d_.size(); ++i) c.d_[i] = std::conj(d_[i]);
    return c;
}

Mat Mat::adjoint() const { return conj().transpose(); }

bool Mat::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j) {
            double scale = std::max(1.0, std::abs((*this)(i, j)));
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol * scale) return false;
        }
    return true;
}

bool Mat::is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j) {
            double scale = std::max(1.0, std::abs((*this)(i, j)));
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol * scale) return false;
        }
    return true;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (const cplx& z : d_) m = std::max(m, std::abs(z));
    return m;
}

double Mat::max_abs_imag() const {
    double m = 0.0;
    for (const cplx& z : d_) m = std::max(m, std::abs(z.imag()));
    return m;
}

Mat operator+(const Mat& a, const Mat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("Mat+: shape mismatch");
    Mat r(a.rows_, a.cols_);
    for (std::size_t i = 0; i < r.d_.size(); ++i) r.d_[i] = a.d_[i] + b.d_[i];
    return r;
}

Mat operator-(const Mat& a, const Mat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("Mat-: shape mismatch");
    Mat r(a.rows_, a.cols_);
    for (std::size_t i = 0; i < r.d_.size(); ++i) r.d_[i] = a.d_[i] - b.d_[i];
    return r;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Mat*: shape mismatch");
    Mat r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            cplx aik = a(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            const cplx* brow = &b.d_[k * b.cols_];
            cplx* rrow = &r.d_[i * r.cols_];
            for (std::size_t j = 0; j < b.cols_; ++j) rrow[j] += aik * brow[j];
        }
    }
    return r;
}

Mat operator*(cplx s, const Mat& a) {
    Mat r(a.rows_, a.cols_);
    for (std::size_t i = 0; i < r.d_.size(); ++i) r.d_[i] = s * a.d_[i];
    return r;
}

namespace {

// In-place LU with partial pivoting on a row-major buffer.
// Returns det; 0 for a singular factorization.
cplx lu_factor(std::vector<cplx>& m, std::size_t n, std::vector<std::size_t>* perm) {
    cplx det = 1.0;
    if (perm) {
        perm->resize(n);
        for (std::size_t i = 0; i < n; ++i) (*perm)[i] = i;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(m[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(m[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m[piv * n + j], m[col * n + j]);
            if (perm) std::swap((*perm)[piv], (*perm)[col]);
            det = -det;
        }
        cplx d = m[col * n + col];
        det *= d;
        cplx inv_d = 1.0 / d;
        for (std::size_t r = col + 1; r < n; ++r) {
            cplx f = m[r * n + col] * inv_d;
            m[r * n + col] = f;
            if (f == cplx(0.0, 0.0)) continue;
            for (std::size_t j = col + 1; j < n; ++j) m[r * n + j] -= f * m[col * n + j];
        }
    }
    return det;
}

}  // namespace

cplx lu_det(const Mat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("lu_det: matrix not square");
    std::size_t n = a.rows();
    if (n == 0) return 1.0;
    std::vector<cplx> m(a.data(), a.data() + n * n);
    return lu_factor(m, n, nullptr);
}

Mat inverse(const Mat& a, double floor) {
    if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
    std::size_t n = a.rows();
    if (n == 0) return Mat();
    std::vector<cplx> m(a.data(), a.data() + n * n);
    std::vector<std::size_t> perm;
    cplx det = lu_factor(m, n, &perm);
    if (std::abs(det) < floor)
        throw SingularMatrix("inverse: |det| = " + std::to_string(std::abs(det)) + " below floor");

    Mat inv(n, n);
    std::vector<cplx> x(n);
    for (std::size_t col = 0; col < n; ++col) {
        // Solve A x = e_col using PA = LU: forward then back substitution.
        for (std::size_t i = 0; i < n; ++i) x[i] = (perm[i] == col) ? 1.0 : 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            cplx s = x[i];
            for (std::size_t j = 0; j < i; ++j) s -= m[i * n + j] * x[j];
            x[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            cplx s = x[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= m[ii * n + j] * x[j];
            x[ii] = s / m[ii * n + ii];
        }
        for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
    }
    return inv;
}

bool is_positive_definite(const Mat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    std::size_t n = a.rows();
    if (!a.is_hermitian(1e-8)) return false;
    // Cholesky of A + tol*I; any non-positive pivot means failure.
    std::vector<cplx> l(n * n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real() + tol;
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l[j * n + k]);
        if (!(d > 0.0)) return false;
        double dj = std::sqrt(d);
        l[j * n + j] = dj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * std::conj(l[j * n + k]);
            l[i * n + j] = s / dj;
        }
    }
    return true;
}

double min_entry(const Mat& a) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::min(m, a(i, j).real());
    return m;
}

namespace {

std::vector<std::size_t> pattern_indices(std::size_t m, const std::vector<int>& s, std::size_t block) {
    std::vector<std::size_t> idx;
    for (std::size_t b = 0; b < block; ++b)
        for (std::size_t i = 0; i < m; ++i) {
            if (s[i] < 0) throw std::invalid_argument("pattern entry negative");
            for (int r = 0; r < s[i]; ++r) idx.push_back(i + b * m);
        }
    return idx;
}

}  // namespace

Mat reduce_by_pattern(const Mat& a, const std::vector<int>& s) {
    if (a.rows() != a.cols() || a.rows() != 2 * s.size())
        throw std::invalid_argument("reduce_by_pattern: matrix is not 2m x 2m for the pattern");
    auto idx = pattern_indices(s.size(), s, 2);
    Mat r(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) r(i, j) = a(idx[i], idx[j]);
    return r;
}

Mat reduce_by_pattern_single(const Mat& a, const std::vector<int>& s) {
    if (a.rows() != a.cols() || a.rows() != s.size())
        throw std::invalid_argument("reduce_by_pattern_single: matrix is not m x m for the pattern");
    auto idx = pattern_indices(s.size(), s, 1);
    Mat r(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) r(i, j) = a(idx[i], idx[j]);
    return r;
}

std::vector<cplx> reduce_vector_by_pattern(const std::vector<cplx>& v, const std::vector<int>& s) {
    if (v.size() != 2 * s.size())
        throw std::invalid_argument("reduce_vector_by_pattern: vector is not length 2m for the pattern");
    auto idx = pattern_indices(s.size(), s, 2);
    std::vector<cplx> r(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[i] = v[idx[i]];
    return r;
}

}  // namespace gbs
