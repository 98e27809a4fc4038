// Acceptance suite: end-to-end checks of the simulator against its
// independent oracles, run as one binary that prints one line per
// criterion. Expects the CLI binary path as argv[1] for the
// reproducibility criterion.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gbs/bench_io.hpp"
#include "gbs/ensembles.hpp"
#include "gbs/kernels.hpp"
#include "gbs/oracle.hpp"
#include "gbs/sampler.hpp"
#include "test_util.hpp"

using namespace gbs;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::string g_cli_path;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
    std::printf("criterion %2d %s  %s  [%.1f s]\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <class F>
void run(int criterion, F&& f) {
    auto t0 = clk::now();
    bool pass = false;
    std::string detail;
    try {
        pass = f(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    report(criterion, pass, detail, std::chrono::duration<double>(clk::now() - t0).count());
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

// OpenMP loops may not leak exceptions; carry the first one out.
template <class F>
void parallel_for(int n, F&& body) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 256)
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

// ----------------------------------------------------------------------

bool criterion1(std::string& detail) {
    Rng rng(1001);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        std::size_t d = 2 * (1 + t % 6);  // 2..12
        Mat a = test_util::random_symmetric(d, rng);
        cplx e = haf_enum(a);
        cplx f = haf_fast(a);
        worst = std::max(worst, std::abs(e - f) / std::max(1e-300, std::abs(e)));
    }
    bool ones_ok = true;
    for (int n = 1; n <= 6; ++n) {
        Mat ones(2 * n, 2 * n);
        for (std::size_t i = 0; i < ones.rows(); ++i)
            for (std::size_t j = 0; j < ones.cols(); ++j) ones(i, j) = 1.0;
        double want = 1.0;
        for (int k = 2 * n - 1; k > 1; k -= 2) want *= k;
        cplx got = haf_fast(ones);
        if (std::llround(got.real()) != static_cast<long long>(want) ||
            std::abs(got - want) > 1e-9 * want)
            ones_ok = false;
    }
    detail = fmt("hafnian vs enumeration on 500 matrices: worst rel %.2e; (2n-1)!! recovered", worst);
    return worst < 1e-9 && ones_ok;
}

bool criterion2(std::string& detail) {
    Rng rng(1002);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        std::size_t d = 1 + t % 10;  // 1..10
        Mat a = test_util::random_symmetric(d, rng);
        cplx e = loop_haf_enum(a);
        cplx f = loop_haf(a);
        worst = std::max(worst, std::abs(e - f) / std::max(1e-300, std::abs(e)));
    }
    double worst_zero = 0.0;
    for (std::size_t d = 2; d <= 10; d += 2) {
        Mat a = test_util::random_symmetric(d, rng);
        for (std::size_t i = 0; i < d; ++i) a(i, i) = 0.0;
        cplx lh = loop_haf(a);
        cplx h = haf_fast(a);
        worst_zero = std::max(worst_zero, std::abs(lh - h) / std::max(1e-300, std::abs(h)));
    }
    detail = fmt("loop hafnian: worst rel %.2e vs oracle, %.2e vs hafnian on zero diagonals",
                 worst, worst_zero);
    return worst < 1e-9 && worst_zero < 1e-12;
}

bool criterion3(std::string& detail) {
    Rng rng(1003);
    double worst_diff = 0.0, worst_sum = 0.0, worst_tail = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::size_t m = 2 + t % 2;
        Mat u = haar_unitary(m, rng);
        std::vector<double> r(m);
        for (auto& v : r) v = std::atanh(0.05 + 0.37 * rng.uniform());
        auto st = GaussianState::from_squeezing_and_unitary(r, u);

        auto table = oracle::fock_distribution(st, 16, 18);
        worst_tail = std::max(worst_tail, 1.0 - table.mass);

        double sum = 0.0;
        for (int mask = 0; mask < (1 << m); ++mask) {
            std::vector<int> clicks(m);
            for (std::size_t i = 0; i < m; ++i) clicks[i] = (mask >> i) & 1;
            double tor = st.prob_threshold({clicks, Detector::threshold});
            double fock = oracle::threshold_marginal(table, clicks);
            worst_diff = std::max(worst_diff, std::abs(tor - fock));
            sum += tor;
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    detail = fmt("torontonian vs Fock sums on 50 states: worst |diff| %.2e, worst |sum-1| %.2e "
                 "(table tail %.1e)",
                 worst_diff, worst_sum, worst_tail);
    return worst_diff < 1e-6 && worst_sum < 1e-6;
}

struct Criterion4Data {
    std::vector<SampleRecord> records;
    GaussianState state = GaussianState::vacuum(1);
    bool ran = false;
};
Criterion4Data g_c4;

bool criterion4(std::string& detail) {
    Rng urng(2024);
    Mat u = haar_unitary(2, urng);
    double r = std::atanh(0.5);
    g_c4.state = GaussianState::from_squeezing_and_unitary({r, r}, u);
    const GaussianState& st = g_c4.state;

    SamplerConfig cfg;
    cfg.n_max = 6;
    cfg.halt_total = 16;
    cfg.seed = 424242;

    const int n = 1000000;
    g_c4.records.resize(n);
    parallel_for(n, [&](int i) {
        Rng rng = Rng(cfg.seed).stream(i);
        g_c4.records[i] = sample_pnr(st, cfg, rng);
    });
    g_c4.ran = true;

    std::map<std::vector<int>, long> counts;
    for (const auto& rec : g_c4.records) counts[rec.pattern.counts]++;

    // TVD against the untruncated target distribution over N <= 8; the
    // per-mode cutoff's redistributed tail (~2e-3) must fit the bound.
    std::map<std::vector<int>, double> probs;
    for (int a = 0; a <= 8; ++a)
        for (int b = 0; a + b <= 8; ++b) probs[{a, b}] = st.prob_pnr({{a, b}, Detector::pnr});
    double tvd = test_util::tvd(counts, n, probs);

    // Chi-square against the truncated-renormalized chain measure, which
    // is what the algorithm draws from at finite n_max; computed here
    // from the probability formulas, independent of the sampler. At 1e6
    // samples this has full power against any draw or conditional bug,
    // while a chi-square against the untruncated target would reject on
    // the cutoff tail alone for every feasible n_max.
    std::map<std::vector<int>, double> chain;
    {
        std::vector<double> p1(cfg.n_max + 1);
        double z1 = 0.0;
        for (int a = 0; a <= cfg.n_max; ++a) {
            p1[a] = st.prob_pnr({{a}, Detector::pnr});
            z1 += p1[a];
        }
        for (int a = 0; a <= cfg.n_max; ++a) {
            std::vector<double> p2(cfg.n_max + 1);
            double z2 = 0.0;
            for (int b = 0; b <= cfg.n_max; ++b) {
                p2[b] = st.prob_pnr({{a, b}, Detector::pnr});
                z2 += p2[b];
            }
            if (z2 <= 0.0) continue;
            for (int b = 0; b <= cfg.n_max; ++b) chain[{a, b}] = (p1[a] / z1) * (p2[b] / z2);
        }
    }
    double stat = 0.0, small_p = 0.0;
    long small_c = 0;
    int bins = 0;
    for (const auto& [pat, p] : chain) {
        double expect = p * n;
        long c = counts.count(pat) ? counts.at(pat) : 0;
        if (expect >= 10.0) {
            stat += (c - expect) * (c - expect) / expect;
            ++bins;
        } else {
            small_p += p;
            small_c += c;
        }
    }
    if (small_p * n >= 10.0) {
        double expect = small_p * n;
        stat += (small_c - expect) * (small_c - expect) / expect;
        ++bins;
    }
    double pval = test_util::chi2_pvalue(stat, bins - 1);

    detail = fmt("exact 2-mode sampler at 1e6 samples: TVD %.5f, chi-square p %.4f", tvd, pval);
    return tvd < 0.004 && pval > 0.001;
}

bool criterion5(std::string& detail) {
    if (!g_c4.ran) {
        detail = "skipped: criterion 4 did not run";
        return false;
    }
    std::map<std::vector<int>, double> cache;
    double worst = 0.0;
    for (const auto& rec : g_c4.records) {
        double prod = 1.0;
        for (double c : rec.conditionals) prod *= c;
        auto it = cache.find(rec.pattern.counts);
        if (it == cache.end())
            it = cache.emplace(rec.pattern.counts, g_c4.state.prob_pnr(rec.pattern)).first;
        double want = it->second;
        worst = std::max(worst, std::abs(prod - want) / std::max(1e-300, want));
    }
    g_c4.records.clear();
    g_c4.records.shrink_to_fit();
    detail = fmt("conditional products vs joint probabilities on every trajectory: worst rel %.2e",
                 worst);
    return worst < 1e-8;
}

bool criterion6(std::string& detail) {
    auto coh = GaussianState::vacuum(1).with_mean({cplx(0.8, 0.0)});
    SamplerConfig cfg;
    cfg.n_max = 10;
    cfg.seed = 606060;
    const int n = 100000;
    std::vector<int> drawn(n);
    parallel_for(n, [&](int i) {
        Rng rng = Rng(cfg.seed).stream(i);
        drawn[i] = sample_displaced(coh, cfg, rng).pattern.counts[0];
    });
    std::map<std::vector<int>, long> counts;
    for (int v : drawn) counts[{v}]++;
    std::map<std::vector<int>, double> probs;
    for (int k = 0; k <= 10; ++k) probs[{k}] = oracle::coherent_pnr(0.64, k);
    double tvd = test_util::tvd(counts, n, probs);

    Rng urng(66);
    Mat u = haar_unitary(2, urng);
    auto st = GaussianState::from_squeezing_and_unitary({0.45, 0.3}, u);
    SamplerConfig cfg2;
    cfg2.n_max = 6;
    bool identical = true;
    for (int i = 0; i < 200; ++i) {
        Rng r1 = Rng(61).stream(i), r2 = Rng(61).stream(i);
        auto a = sample_pnr(st, cfg2, r1);
        auto b = sample_displaced(st, cfg2, r2);
        if (a.pattern.counts != b.pattern.counts || a.eta != b.eta ||
            a.epsilon != b.epsilon || a.conditionals != b.conditionals ||
            a.photons_after_mode != b.photons_after_mode || a.halted != b.halted)
            identical = false;
    }
    detail = fmt("coherent-state histogram TVD %.5f; zero-displacement path bit-identical: ", tvd) +
             (identical ? "yes" : "no");
    return tvd < 0.01 && identical;
}

bool criterion7(std::string& detail) {
    double ra = std::atanh(0.3), rb = std::atanh(0.6);
    auto a = GaussianState::from_squeezing_and_unitary({ra}, Mat::identity(1));
    auto b = GaussianState::from_squeezing_and_unitary({rb}, Mat::identity(1));
    SamplerConfig cfg;
    cfg.n_max = 6;
    cfg.seed = 707070;
    const int n = 100000;

    MixtureSpec mix;
    mix.components.push_back({0.5, a});
    mix.components.push_back({0.5, b});
    std::vector<int> drawn(n);
    parallel_for(n, [&](int i) {
        Rng rng = Rng(cfg.seed).stream(i);
        drawn[i] = sample_mixture(mix, Detector::pnr, cfg, rng).pattern.counts[0];
    });
    std::map<std::vector<int>, long> counts;
    for (int v : drawn) counts[{v}]++;
    std::map<std::vector<int>, double> probs;
    for (int k = 0; k <= 6; ++k)
        probs[{k}] = 0.5 * oracle::squeezed_vacuum_pnr(ra, k) +
                     0.5 * oracle::squeezed_vacuum_pnr(rb, k);
    double tvd_mix = test_util::tvd(counts, n, probs);

    // valid signed combination: the dominant weight must sit on the more
    // strongly squeezed component or the tail goes negative
    MixtureSpec sgn;
    sgn.components.push_back({2.0, b});
    sgn.components.push_back({-1.0, a});
    sgn.is_signed = true;
    std::map<std::vector<int>, double> sprobs;
    bool nonneg = true;
    for (int k = 0; k <= 6; ++k) {
        double p = oracle::mixture_prob(sgn, {{k}, Detector::pnr});
        if (p < -1e-12) nonneg = false;
        sprobs[{k}] = std::max(0.0, p);
    }
    parallel_for(n, [&](int i) {
        Rng rng = Rng(cfg.seed + 1).stream(i);
        drawn[i] = sample_mixture(sgn, Detector::pnr, cfg, rng).pattern.counts[0];
    });
    std::map<std::vector<int>, long> scounts;
    for (int v : drawn) scounts[{v}]++;
    double tvd_signed = test_util::tvd(scounts, n, sprobs);

    detail = fmt("equal mixture TVD %.5f; signed combination TVD %.5f", tvd_mix, tvd_signed);
    return tvd_mix < 0.01 && tvd_signed < 0.02 && nonneg;
}

bool criterion8(std::string& detail) {
    Rng rng(1008);
    double worst_pull = 0.0;
    for (int t = 0; t < 20; ++t) {
        Mat a(8, 8);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = i; j < 8; ++j) {
                double v = rng.uniform();
                a(i, j) = v;
                a(j, i) = v;
            }
        double exact = haf_enum(a).real();
        auto est = haf_barvinok(a, 100000, rng);
        worst_pull = std::max(worst_pull, std::abs(est.estimate - exact) / est.std_err);
    }

    // The reported stderr at M = 100 is itself noisy (the determinant
    // distribution is heavy-tailed), so the 1/sqrt(M) scaling is asserted
    // on the median ratio across kernels rather than one realization.
    std::vector<double> ratios;
    for (int t = 0; t < 11; ++t) {
        Mat a(8, 8);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = i; j < 8; ++j) {
                double v = 0.5 + 0.5 * rng.uniform();
                a(i, j) = v;
                a(j, i) = v;
            }
        Rng r2(2000 + t);
        double se2 = haf_barvinok(a, 100, r2).std_err;
        double se4 = haf_barvinok(a, 10000, r2).std_err;
        ratios.push_back(se2 / se4);
    }
    std::sort(ratios.begin(), ratios.end());
    double ratio = ratios[ratios.size() / 2];

    detail = fmt("estimator pull <= %.2f sigma over 20 kernels; median stderr ratio M=1e2/1e4: %.1f",
                 worst_pull, ratio);
    return worst_pull <= 5.0 && ratio >= 5.0 && ratio <= 20.0;
}

bool criterion9(std::string& detail) {
    Rng rng(1010);
    int checked = 0;
    double worst_q = 0.0, worst_a = 0.0;
    bool spectrum_ok = true;
    while (checked < 200) {
        std::size_t nv = 2 + rng.next_u64() % 19;  // 2..20
        double p = 0.15 + 0.7 * rng.uniform();
        Mat adj = erdos_renyi(nv, p, rng);

        // spectral radius by power iteration
        std::vector<double> v(nv, 1.0), w(nv);
        double radius = 0.0;
        for (int it = 0; it < 300; ++it) {
            double norm = 0.0;
            for (std::size_t i = 0; i < nv; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < nv; ++j) s += adj(i, j).real() * v[j];
                w[i] = s;
                norm += s * s;
            }
            norm = std::sqrt(norm);
            if (norm == 0.0) break;
            for (std::size_t i = 0; i < nv; ++i) v[i] = w[i] / norm;
            radius = norm;
        }
        if (radius <= 0.0) continue;  // no edges

        double sv = 0.1 + 0.8 * rng.uniform();  // target top singular value
        auto st = GaussianState::from_adjacency(adj, sv / radius);
        worst_q = std::min(worst_q, min_entry(st.husimi_q()));
        worst_a = std::min(worst_a, min_entry(st.kernels().A));
        if (!st.o_spectrum_in_unit_ball()) spectrum_ok = false;
        if (!st.is_valid()) spectrum_ok = false;
        ++checked;
    }
    detail = fmt("200 graph states: min Q entry %.1e, min kernel entry %.1e, spectra in (-1,1)",
                 worst_q, worst_a);
    return worst_q >= -1e-10 && worst_a >= -1e-10 && spectrum_ok;
}

bool criterion10(std::string& detail) {
    // exact path: m = 16, runtime bucketed by photon count
    Rng urng(3030);
    Mat u = haar_unitary(16, urng);
    std::vector<double> r(16, std::asinh(std::sqrt(6.5 / 16.0)));
    auto st = GaussianState::from_squeezing_and_unitary(r, u);
    SamplerConfig cfg;
    cfg.n_max = 6;
    cfg.halt_total = 12;
    cfg.seed = 101010;

    std::vector<bench::SampleRow> rows;
    for (int i = 0; i < 56; ++i) {
        Rng rng = Rng(cfg.seed).stream(i);
        rows.push_back(bench::row_from_record(sample_pnr(st, cfg, rng)));
    }
    auto buckets = bench::bucket_by_photons(rows, false);
    std::vector<bench::Bucket> window;
    for (const auto& b : buckets)
        if (b.n_photons >= 4 && b.n_photons <= 12) window.push_back(b);
    if (window.size() < 3) {
        detail = "exact path produced fewer than 3 photon buckets in [4, 12]";
        return false;
    }
    auto efit = bench::fit_exp(window);

    // approximate path: graph state, Monte Carlo kernels, quadratic growth
    Rng grng(3131);
    Mat adj = erdos_renyi(36, 0.5, grng);
    auto ast = GaussianState::from_adjacency(adj, auto_scale(adj, 20.0));
    SamplerConfig acfg;
    acfg.n_max = 6;
    acfg.halt_total = 48;
    acfg.barvinok_m = 1000;
    acfg.seed = 111111;

    std::vector<bench::SampleRow> arows;
    for (int i = 0; i < 100; ++i) {
        Rng rng = Rng(acfg.seed).stream(i);
        arows.push_back(bench::row_from_record(sample_approx_nonneg(ast, acfg, rng)));
    }
    auto abuckets = bench::bucket_by_photons(arows, false);
    std::vector<bench::Bucket> awindow;
    for (const auto& b : abuckets)
        if (b.n_photons >= 10 && b.n_photons <= 40) awindow.push_back(b);
    if (awindow.size() < 3) {
        detail = "approximate path produced fewer than 3 photon buckets in [10, 40]";
        return false;
    }
    auto qfit = bench::fit_quad(awindow);

    detail = fmt("exact fit a=%.3f (log R2 %.3f); ", efit.params[0], efit.r2) +
             fmt("approx quad R2 %.3f", qfit.r2);
    return efit.params[0] > 0.0 && efit.r2 > 0.9 && qfit.r2 > 0.9;
}

bool criterion11(std::string& detail) {
    Rng urng(4040);
    Mat u = haar_unitary(100, urng);
    long long peaks[2] = {0, 0};
    double means[2] = {2.0, 8.0};
    for (int cfg_idx = 0; cfg_idx < 2; ++cfg_idx) {
        std::vector<double> r(100, std::asinh(std::sqrt(means[cfg_idx] / 100.0)));
        auto st = GaussianState::from_squeezing_and_unitary(r, u);
        SamplerConfig cfg;
        cfg.n_max = cfg_idx == 0 ? 4 : 6;
        cfg.halt_total = 14;
        memtrack::reset_peak();
        for (int i = 0; i < 3; ++i) {
            Rng rng = Rng(50 + cfg_idx).stream(i);
            (void)sample_pnr(st, cfg, rng);
        }
        peaks[cfg_idx] = memtrack::peak_elements();
    }
    long long bound = 64LL * 100 * 100;
    detail = fmt("peak tracked storage at m=100: %.0f and %.0f scalars (bound %.0f)",
                 double(peaks[0]), double(peaks[1]), double(bound));
    return peaks[0] <= bound && peaks[1] <= bound;
}

bool criterion12(std::string& detail) {
    if (g_cli_path.empty()) {
        detail = "no CLI path given";
        return false;
    }
    auto run_cli = [&](const std::string& args, const std::string& out) {
        std::string cmd = g_cli_path + " sample --modes 4 --squeezing 0.5 --unitary haar " +
                          "--num-samples 64 --seed 99 --n-max 8 --no-timing " + args + " --out " +
                          out;
        return std::system(cmd.c_str());
    };
    if (run_cli("--threads 1", "acc12_a.jsonl") != 0) {
        detail = "CLI run failed";
        return false;
    }
    if (run_cli("--threads 2", "acc12_b.jsonl") != 0 ||
        run_cli("--threads 1", "acc12_c.jsonl") != 0) {
        detail = "CLI run failed";
        return false;
    }
    auto slurp = [](const std::string& path) {
        std::ifstream f(path);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    std::string a = slurp("acc12_a.jsonl"), b = slurp("acc12_b.jsonl"), c = slurp("acc12_c.jsonl");
    bool same = !a.empty() && a == b && a == c;

    // emitted rows parse back
    std::istringstream is(a);
    auto rows = bench::read_rows(is);
    bool parsed = rows.size() == 64;

    detail = std::string("byte-identical across reruns and thread counts: ") +
             (same ? "yes" : "no") + "; rows parse: " + (parsed ? "yes" : "no");
    return same && parsed;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];
    std::printf("acceptance suite (%d OpenMP threads available)\n", omp_get_max_threads());

    run(1, criterion1);
    run(2, criterion2);
    run(3, criterion3);
    run(4, criterion4);
    run(5, criterion5);
    run(6, criterion6);
    run(7, criterion7);
    run(8, criterion8);
    run(9, criterion9);
    run(10, criterion10);
    run(11, criterion11);
    run(12, criterion12);

    std::printf("%s: %d of 12 criteria failed\n", g_failures == 0 ? "OK" : "FAILURES", g_failures);
    return g_failures;
}
