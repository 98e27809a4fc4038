#pragma once

#include <optional>
#include <vector>

#include "gbs/matrix.hpp"

namespace gbs {

struct InvalidState : std::runtime_error {
    explicit InvalidState(const std::string& what) : std::runtime_error(what) {}
};

enum class Detector { pnr, threshold };

/// Measurement outcome over k modes: exact counts for PNR detectors,
/// 0/1 for threshold detectors.
struct PhotonPattern {
    std::vector<int> counts;
    Detector flavor = Detector::pnr;

    int total() const {
        int n = 0;
        for (int s : counts) n += s;
        return n;
    }
    void validate() const;
};

/// Q = Sigma + I/2, O = I - Q^-1, A = X O with X the block swap.
struct KernelSet {
    Mat Q;
    Mat O;
    Mat A;
};

/// Leading-k-mode reduction: the submatrix of Q on rows/columns
/// 1..k and m+1..m+k, with its derived O, A and displacement data.
struct ReducedKernels {
    std::size_t k = 0;
    Mat Q;
    Mat O;
    Mat A;
    double det_Q = 1.0;
    double norm_prefactor = 1.0;       // exp(-alpha Q^-1 alpha^dag / 2) / sqrt(det Q)
    std::vector<cplx> alpha_vec;       // (alpha, alpha*) over the first k modes
    std::vector<cplx> gamma;           // Q^-1 alpha_vec^dag
};

/// A Gaussian state of m modes: the symmetric-ordered complex covariance
/// Sigma of (alpha, alpha*) and the mean vector alpha-bar. Immutable
/// after construction; safe to share across threads.
class GaussianState {
public:
    static GaussianState vacuum(std::size_t m);

    /// Pure state from per-mode squeezing and an interferometer:
    /// B = U diag(tanh r) U^T, A = B (+) B*, Q = (I - XA)^-1.
    static GaussianState from_squeezing_and_unitary(const std::vector<double>& r, const Mat& u);

    /// Graph encoding: B = scale * adjacency (real symmetric, entries >= 0,
    /// singular values of B below 1), A = B (+) B.
    static GaussianState from_adjacency(const Mat& adjacency, double scale);

    /// Arbitrary covariance/mean (deserialization path). Rejects
    /// non-Hermitian Sigma; physical validity is checked separately.
    static GaussianState from_covariance(Mat sigma, std::vector<cplx> mean);

    /// Copy of this state with the given displacement vector.
    GaussianState with_mean(std::vector<cplx> mean) const;

    std::size_t modes() const { return m_; }
    const Mat& sigma() const { return sigma_; }
    const std::vector<cplx>& mean() const { return mean_; }
    bool has_displacement() const;

    /// Single-block kernel of a pure zero-mean state (B such that
    /// A = B (+) B*), kept from construction when known.
    const std::optional<Mat>& pure_kernel() const { return pure_b_; }

    Mat husimi_q() const;  // Q = Sigma + I/2
    KernelSet kernels() const;
    ReducedKernels reduced(std::size_t k) const;

    double mean_photons() const;

    /// Physical validity: Sigma Hermitian and Sigma + Z/2 >= 0 with
    /// Z = diag(I, -I), checked to `tol` on the eigenvalue side.
    bool is_valid(double tol = 1e-8) const;
    void require_valid() const;

    /// Entrywise non-negativity witnesses used by the approximate sampler
    /// gate: real parts >= -1e-10 and imaginary parts negligible.
    bool check_nonneg_kernel() const;
    bool check_nonneg_q() const;

    /// Eigenvalues of O = I - Q^-1 strictly inside (-1, 1).
    bool o_spectrum_in_unit_ball() const;

    /// Probability of a PNR pattern over the leading k modes of a
    /// zero-mean state: Haf(A_S) / (sqrt(det Q) * prod s_i!).
    double prob_pnr(const PhotonPattern& s) const;

    /// Probability of a threshold pattern: Tor(O_S) / sqrt(det Q).
    double prob_threshold(const PhotonPattern& s) const;

    /// PNR probability with displacement: the loop hafnian of A_S with
    /// its diagonal replaced by the reduced gamma vector, times the
    /// Gaussian normalization. Reduces to prob_pnr at zero mean.
    double prob_displaced(const PhotonPattern& s) const;

private:
    GaussianState(std::size_t m, Mat sigma, std::vector<cplx> mean)
        : m_(m), sigma_(std::move(sigma)), mean_(std::move(mean)) {}

    static GaussianState from_single_block(const Mat& b, const Mat& b_conj);

    std::size_t m_ = 0;
    Mat sigma_;
    std::vector<cplx> mean_;
    std::optional<Mat> pure_b_;
};

/// Weighted combination of Gaussian states. Probabilistic when all
/// weights are non-negative; signed combinations must still sum to 1.
struct MixtureSpec {
    struct Component {
        double q;
        GaussianState state;
    };
    std::vector<Component> components;
    bool is_signed = false;

    void validate() const;
};

/// Scale c such that the graph-encoded state's mean photon number hits
/// `target_mean_photons` within 1%, found by bisection on
/// c in (0, 1/sigma_max(adjacency)).
double auto_scale(const Mat& adjacency, double target_mean_photons);

double factorial(int n);

}  // namespace gbs
