#pragma once

#include <cstdint>
#include <vector>

#include "gbs/matrix.hpp"
#include "gbs/rng.hpp"

namespace gbs {

/// Hafnian by direct enumeration of perfect matchings. Exact reference
/// for the fast kernels; cost is (dim-1)!!, so the dimension is capped.
cplx haf_enum(const Mat& a, std::size_t cap = 12);

/// Loop hafnian by enumeration: vertex 1 either takes a self-loop
/// (weighted by the diagonal) or pairs with a remaining vertex.
cplx loop_haf_enum(const Mat& a, std::size_t cap = 12);

/// Hafnian of a symmetric 2n x 2n matrix by the power-trace subset sum:
/// for every subset of the n index pairs, the trace powers of the
/// pair-swapped submatrix feed a generating function whose degree-n
/// coefficient enters an inclusion-exclusion sum. O(n^3 2^n).
///
/// The 2^n subset loop runs over fixed chunks whose partial sums are
/// combined in index order, so the result is bit-identical for any
/// thread count. haf_fast parallelizes the chunks with OpenMP;
/// haf_fast_serial runs the same arithmetic on one thread.
cplx haf_fast(const Mat& a);
cplx haf_fast_serial(const Mat& a);

/// Loop hafnian (self-loops weighted by the diagonal) via the same
/// subset sum extended with the diagonal's linear terms. Odd dimensions
/// are handled by padding with an isolated unit-loop vertex.
cplx loop_haf(const Mat& a);
cplx loop_haf_serial(const Mat& a);

/// Torontonian of a 2k x 2k matrix O restricted to a binary click
/// pattern: inclusion-exclusion over subsets Z of the clicked modes,
/// with terms (-1)^(|clicks|-|Z|) / sqrt(det(I - O_Z)).
/// det must have positive real part for every subset (valid-state
/// requirement); the principal square root is used throughout.
cplx torontonian(const Mat& o, const std::vector<int>& clicks);
cplx torontonian_serial(const Mat& o, const std::vector<int>& clicks);

struct BarvinokEstimate {
    double estimate = 0.0;
    double std_err = 0.0;
};

/// Monte Carlo hafnian estimator for entrywise non-negative matrices:
/// draw skew-symmetric G with standard-normal entries above the
/// diagonal, form W_ij = G_ij * sqrt(a_ij), and average det(W) over M
/// draws; E[det(W)] is the hafnian. Returns the mean and its standard
/// error. Draw chunks get substreams derived from a single value taken
/// off the caller's rng, so results do not depend on the thread count.
BarvinokEstimate haf_barvinok(const Mat& a, std::int64_t m_samples, Rng& rng);
BarvinokEstimate haf_barvinok_serial(const Mat& a, std::int64_t m_samples, Rng& rng);

namespace detail {
/// Tr(B^j) for j = 1..count via Hessenberg reduction, the La Budde
/// characteristic-polynomial recurrence and Newton's identities.
/// Exposed for the tests that pit it against direct matrix powers.
std::vector<cplx> power_traces(const Mat& b, std::size_t count);
}  // namespace detail

}  // namespace gbs
