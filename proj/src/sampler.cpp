#include "gbs/sampler.hpp"

#include <chrono>
#include <cmath>

#include "gbs/kernels.hpp"

namespace gbs {

namespace {

double pattern_factorial(const std::vector<int>& s) {
    double f = 1.0;
    for (int v : s) f *= factorial(v);
    return f;
}

double clamp_joint(cplx value, bool lenient) {
    if (!lenient && std::abs(value.imag()) > 1e-8 * std::max(1.0, std::abs(value)))
        throw InvalidState("sampler: imaginary residue above tolerance");
    double p = value.real();
    if (p < 0.0) {
        if (!lenient && p < -1e-9) throw InvalidState("sampler: negative joint probability");
        p = 0.0;
    }
    return p;
}

// Joint probability of (history, j) for one Gaussian component at mode k.
// Zero-mean states go through the hafnian; displaced states through the
// loop hafnian with the reduced gamma on the diagonal. With a zero mean
// the two produce identical arithmetic, which keeps sample_displaced
// draw-for-draw equal to sample_pnr under a shared seed.
class GaussianEval {
public:
    GaussianEval(const GaussianState& st, bool loop_path) : st_(st), loop_path_(loop_path) {}

    void begin_mode(std::size_t k, const std::vector<int>& hist) {
        red_ = st_.reduced(k);
        fact_hist_ = pattern_factorial(hist);
    }

    double joint(const std::vector<int>& hist, int j) const {
        std::vector<int> pattern(hist);
        pattern.push_back(j);
        Mat as = reduce_by_pattern(red_.A, pattern);
        cplx kern;
        if (loop_path_) {
            std::vector<cplx> gs = reduce_vector_by_pattern(red_.gamma, pattern);
            for (std::size_t i = 0; i < gs.size(); ++i) as(i, i) = gs[i];
            kern = loop_haf(as);
        } else {
            kern = haf_fast(as);
        }
        return clamp_joint(kern * red_.norm_prefactor / (fact_hist_ * factorial(j)), false);
    }

private:
    const GaussianState& st_;
    bool loop_path_;
    ReducedKernels red_;
    double fact_hist_ = 1.0;
};

class ThresholdEval {
public:
    explicit ThresholdEval(const GaussianState& st) : st_(st) {}

    void begin_mode(std::size_t k, const std::vector<int>&) { red_ = st_.reduced(k); }

    double joint(const std::vector<int>& hist, int j) const {
        std::vector<int> clicks(hist);
        clicks.push_back(j);
        cplx tor = torontonian(red_.O, clicks);
        return clamp_joint(tor * red_.norm_prefactor, false);
    }

private:
    const GaussianState& st_;
    ReducedKernels red_;
};

class ApproxEval {
public:
    ApproxEval(const GaussianState& st, std::int64_t m_draws, Rng& rng)
        : st_(st), m_draws_(m_draws), rng_(rng) {}

    void begin_mode(std::size_t k, const std::vector<int>& hist) {
        red_ = st_.reduced(k);
        fact_hist_ = pattern_factorial(hist);
    }

    double joint(const std::vector<int>& hist, int j) const {
        std::vector<int> pattern(hist);
        pattern.push_back(j);
        Mat as = reduce_by_pattern(red_.A, pattern);
        double est = haf_barvinok(as, m_draws_, rng_).estimate;
        return clamp_joint(cplx(est, 0.0) * red_.norm_prefactor / (fact_hist_ * factorial(j)),
                           true);
    }

private:
    const GaussianState& st_;
    std::int64_t m_draws_;
    Rng& rng_;
    ReducedKernels red_;
    double fact_hist_ = 1.0;
};

class SignedMixtureEval {
public:
    SignedMixtureEval(const MixtureSpec& mix, Detector flavor) : mix_(mix), flavor_(flavor) {}

    void begin_mode(std::size_t k, const std::vector<int>& hist) {
        reds_.clear();
        for (const auto& c : mix_.components) reds_.push_back(c.state.reduced(k));
        fact_hist_ = pattern_factorial(hist);
    }

    double joint(const std::vector<int>& hist, int j) const {
        std::vector<int> pattern(hist);
        pattern.push_back(j);
        double sum = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < reds_.size(); ++i) {
            const ReducedKernels& red = reds_[i];
            double p_i;
            if (flavor_ == Detector::threshold) {
                p_i = clamp_joint(torontonian(red.O, pattern) * red.norm_prefactor, false);
            } else {
                Mat as = reduce_by_pattern(red.A, pattern);
                std::vector<cplx> gs = reduce_vector_by_pattern(red.gamma, pattern);
                for (std::size_t t = 0; t < gs.size(); ++t) as(t, t) = gs[t];
                p_i = clamp_joint(loop_haf(as) * red.norm_prefactor /
                                      (fact_hist_ * factorial(j)),
                                  false);
            }
            sum += mix_.components[i].q * p_i;
            scale += std::abs(mix_.components[i].q) * p_i;
        }
        if (sum < -1e-8 * std::max(1.0, scale))
            throw SamplingError("signed mixture: negative marginal probability");
        return std::max(0.0, sum);
    }

private:
    const MixtureSpec& mix_;
    Detector flavor_;
    std::vector<ReducedKernels> reds_;
    double fact_hist_ = 1.0;
};

struct RejectDraw {};

template <class Eval>
SampleRecord chain_sample(std::size_t m, Detector flavor, const SamplerConfig& cfg, Rng& rng,
                          Eval&& eval, bool force_renormalize) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();

    int jmax = (flavor == Detector::threshold) ? 1 : cfg.n_max;
    std::vector<double> joint(jmax + 1), cond(jmax + 1);

    for (int attempt = 0; attempt < 100; ++attempt) {
        SampleRecord rec;
        rec.pattern.flavor = flavor;
        rec.pattern.counts.assign(m, 0);
        rec.photons_after_mode.assign(m, 0);
        rec.conditionals.reserve(m);

        try {
            std::vector<int> hist;
            double prev = 1.0;
            int total = 0;
            for (std::size_t k = 1; k <= m; ++k) {
                eval.begin_mode(k, hist);
                double eta = 0.0;
                for (int j = 0; j <= jmax; ++j) {
                    joint[j] = eval.joint(hist, j);
                    cond[j] = joint[j] / prev;
                    eta += cond[j];
                }
                rec.eta = eta;
                if (eta <= 0.0) throw SamplingError("sampler: conditional mass vanished");

                TailPolicy policy = force_renormalize ? TailPolicy::renormalize : cfg.tail_policy;
                if (policy == TailPolicy::error && 1.0 - eta > 1e-3)
                    throw SamplingError("sampler: tail mass above 1e-3, n_max too small");

                double u = rng.uniform();
                double target = (policy == TailPolicy::reject) ? u : u * eta;
                if (policy == TailPolicy::reject && u >= eta) throw RejectDraw{};

                int s = -1;
                double cum = 0.0;
                for (int j = 0; j <= jmax; ++j) {
                    cum += cond[j];
                    if (target < cum) {
                        s = j;
                        break;
                    }
                }
                if (s < 0) {  // roundoff fell off the end: take the last outcome with mass
                    for (int j = jmax; j >= 0; --j)
                        if (cond[j] > 0.0) {
                            s = j;
                            break;
                        }
                }
                if (s < 0) throw SamplingError("sampler: no outcome with positive mass");

                rec.conditionals.push_back(cond[s]);
                prev = joint[s];
                hist.push_back(s);
                total += s;
                rec.pattern.counts[k - 1] = s;
                rec.photons_after_mode[k - 1] = total;

                if (k < m && total > cfg.halt_total) {
                    rec.halted = true;
                    for (std::size_t t = k; t < m; ++t) rec.photons_after_mode[t] = total;
                    break;
                }
            }
        } catch (const RejectDraw&) {
            continue;
        }

        rec.epsilon = std::abs(1.0 - rec.eta);
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rec;
    }
    throw SamplingError("sampler: rejection retry cap exceeded");
}

}  // namespace

SampleRecord sample_pnr(const GaussianState& state, const SamplerConfig& cfg, Rng& rng) {
    state.require_valid();
    if (state.has_displacement())
        throw InvalidState("sample_pnr: state has displacement, use sample_displaced");
    return chain_sample(state.modes(), Detector::pnr, cfg, rng, GaussianEval(state, false), false);
}

SampleRecord sample_threshold(const GaussianState& state, const SamplerConfig& cfg, Rng& rng) {
    state.require_valid();
    if (state.has_displacement())
        throw InvalidState("sample_threshold: displaced states are not supported");
    return chain_sample(state.modes(), Detector::threshold, cfg, rng, ThresholdEval(state), false);
}

SampleRecord sample_displaced(const GaussianState& state, const SamplerConfig& cfg, Rng& rng) {
    state.require_valid();
    return chain_sample(state.modes(), Detector::pnr, cfg, rng, GaussianEval(state, true), false);
}

SampleRecord sample_mixture(const MixtureSpec& mix, Detector flavor, const SamplerConfig& cfg,
                            Rng& rng) {
    mix.validate();
    if (!mix.is_signed) {
        double u = rng.uniform();
        double cum = 0.0;
        std::size_t pick = mix.components.size() - 1;
        for (std::size_t i = 0; i < mix.components.size(); ++i) {
            cum += mix.components[i].q;
            if (u < cum) {
                pick = i;
                break;
            }
        }
        const GaussianState& st = mix.components[pick].state;
        if (flavor == Detector::threshold) return sample_threshold(st, cfg, rng);
        return st.has_displacement() ? sample_displaced(st, cfg, rng) : sample_pnr(st, cfg, rng);
    }

    for (const auto& c : mix.components) {
        c.state.require_valid();
        if (flavor == Detector::threshold && c.state.has_displacement())
            throw InvalidState("sample_mixture: threshold flavor needs zero-mean components");
    }
    std::size_t m = mix.components.front().state.modes();
    return chain_sample(m, flavor, cfg, rng, SignedMixtureEval(mix, flavor), false);
}

SampleRecord sample_approx_nonneg(const GaussianState& state, const SamplerConfig& cfg, Rng& rng) {
    state.require_valid();
    if (state.has_displacement())
        throw InvalidState("sample_approx_nonneg: displaced states are not supported");
    if (!state.check_nonneg_kernel())
        throw InvalidState("sample_approx_nonneg: kernel matrix has negative entries");
    return chain_sample(state.modes(), Detector::pnr, cfg, rng,
                        ApproxEval(state, cfg.barvinok_m, rng), true);
}

}  // namespace gbs
