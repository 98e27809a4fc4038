#pragma once

#include <cstdint>

#include "gbs/gaussian_state.hpp"
#include "gbs/rng.hpp"

namespace gbs {

struct SamplingError : std::runtime_error {
    explicit SamplingError(const std::string& what) : std::runtime_error(what) {}
};

/// What to do with the conditional mass lost beyond the per-mode cutoff:
/// renormalize spreads it over the computed outcomes, reject restarts the
/// sample when the draw lands in the missing tail, error throws once the
/// deficit passes 1e-3 (a sign that n_max is too small).
enum class TailPolicy { renormalize, reject, error };

struct SamplerConfig {
    int n_max = 14;           // per-mode photon cutoff
    int halt_total = 14;      // halt runs that pass this many photons before the last mode
    TailPolicy tail_policy = TailPolicy::renormalize;
    std::uint64_t seed = 0;   // carried for stream derivation by callers
    std::int64_t barvinok_m = 1000;  // draws per hafnian estimate in the approximate path

    void validate() const {
        if (n_max < 1 || halt_total < 1)
            throw std::invalid_argument("sampler config: n_max and halt_total must be >= 1");
        if (barvinok_m < 1) throw std::invalid_argument("sampler config: barvinok_m must be >= 1");
    }
};

/// One drawn pattern plus its diagnostics. eta is the conditional mass
/// sum at the last sampled mode; epsilon = |1 - eta|. conditionals holds
/// the realized raw conditional of each mode, so their product telescopes
/// to the joint probability of the final pattern.
struct SampleRecord {
    PhotonPattern pattern;
    double eta = 1.0;
    double epsilon = 0.0;
    double wall_time = 0.0;  // seconds spent producing this sample
    std::vector<int> photons_after_mode;
    std::vector<double> conditionals;
    bool halted = false;
};

/// Exact PNR sampling of a valid zero-mean state by the chain rule:
/// mode k draws from p(s_k | s_1..s_{k-1}) built from ratios of reduced
/// hafnian probabilities, reusing the previous mode's joint as the
/// denominator.
SampleRecord sample_pnr(const GaussianState& state, const SamplerConfig& cfg, Rng& rng);

/// Chain rule with two-outcome torontonian conditionals.
SampleRecord sample_threshold(const GaussianState& state, const SamplerConfig& cfg, Rng& rng);

/// Chain rule with loop-hafnian conditionals; handles any mean and
/// coincides with sample_pnr (same draws) when the mean is zero.
SampleRecord sample_displaced(const GaussianState& state, const SamplerConfig& cfg, Rng& rng);

/// Probabilistic mixtures draw a component and delegate. Signed
/// combinations run the chain rule on the weighted sums of the component
/// probabilities, evaluating every component at each step.
SampleRecord sample_mixture(const MixtureSpec& mix, Detector flavor, const SamplerConfig& cfg,
                            Rng& rng);

/// Approximate sampler for states with entrywise non-negative kernels:
/// every hafnian is replaced by its Monte Carlo estimate with
/// cfg.barvinok_m draws. Conditionals are renormalized regardless of
/// tail policy; eta/epsilon report the final mode's estimate quality.
SampleRecord sample_approx_nonneg(const GaussianState& state, const SamplerConfig& cfg, Rng& rng);

}  // namespace gbs
