#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbs {

using cplx = std::complex<double>;

struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

/// Accounting of live matrix storage, in complex scalars. Used by the
/// samplers' structural space tests: every matrix-shaped working buffer
/// in the library goes through Mat and is counted here.
namespace memtrack {
long long live_elements();
long long peak_elements();
void reset_peak();
namespace detail {
void add(long long n);
void sub(long long n);
}  // namespace detail
}  // namespace memtrack

/// Dense row-major complex matrix. Values are immutable in spirit: all
/// library operations build new matrices rather than mutating shared ones,
/// so Mat can be read concurrently without synchronization.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), d_(rows * cols) {
        memtrack::detail::add(static_cast<long long>(d_.size()));
    }

    Mat(const Mat& o) : rows_(o.rows_), cols_(o.cols_), d_(o.d_) {
        memtrack::detail::add(static_cast<long long>(d_.size()));
    }
    Mat(Mat&& o) noexcept : rows_(o.rows_), cols_(o.cols_), d_(std::move(o.d_)) {
        o.rows_ = o.cols_ = 0;
        o.d_.clear();
    }
    Mat& operator=(const Mat& o) {
        if (this != &o) {
            memtrack::detail::sub(static_cast<long long>(d_.size()));
            rows_ = o.rows_;
            cols_ = o.cols_;
            d_ = o.d_;
            memtrack::detail::add(static_cast<long long>(d_.size()));
        }
        return *this;
    }
    Mat& operator=(Mat&& o) noexcept {
        if (this != &o) {
            memtrack::detail::sub(static_cast<long long>(d_.size()));
            rows_ = o.rows_;
            cols_ = o.cols_;
            d_ = std::move(o.d_);
            o.rows_ = o.cols_ = 0;
            o.d_.clear();
        }
        return *this;
    }
    ~Mat() { memtrack::detail::sub(static_cast<long long>(d_.size())); }

    static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return d_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    cplx* data() { return d_.data(); }
    const cplx* data() const { return d_.data(); }

    Mat transpose() const;
    Mat conj() const;
    Mat adjoint() const;

    bool is_symmetric(double tol = 1e-10) const;
    bool is_hermitian(double tol = 1e-10) const;

    double max_abs() const;
    double max_abs_imag() const;

    friend Mat operator+(const Mat& a, const Mat& b);
    friend Mat operator-(const Mat& a, const Mat& b);
    friend Mat operator*(const Mat& a, const Mat& b);
    friend Mat operator*(cplx s, const Mat& a);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> d_;
};

/// det(A) by LU with partial pivoting. det of the 0x0 matrix is 1;
/// singular input yields 0.
cplx lu_det(const Mat& a);

/// A^-1 by LU with partial pivoting. Throws SingularMatrix when
/// |det(A)| falls below `floor`.
Mat inverse(const Mat& a, double floor = 1e-12);

/// Cholesky test: true iff A + tol*I is Hermitian positive definite
/// (all pivots strictly positive). tol < 0 demands a margin.
bool is_positive_definite(const Mat& a, double tol = 0.0);

/// Smallest real part over all entries.
double min_entry(const Mat& a);

/// Pattern reduction of a 2m x 2m matrix: rows/columns i and i+m are
/// repeated s_i times (deleted when s_i = 0). Output ordering is all
/// first-block indices in ascending mode order, then all second-block
/// indices. This ordering convention is fixed here once and shared by
/// every caller.
Mat reduce_by_pattern(const Mat& a, const std::vector<int>& s);

/// Same repetition rule for an m x m matrix with a single block.
Mat reduce_by_pattern_single(const Mat& a, const std::vector<int>& s);

/// Same repetition rule applied to a length-2m vector.
std::vector<cplx> reduce_vector_by_pattern(const std::vector<cplx>& v, const std::vector<int>& s);

}  // namespace gbs
