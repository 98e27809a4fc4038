// Command-line front end: sampling, probabilities, state validation and
// the runtime-scaling benchmark harness.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gbs/bench_io.hpp"
#include "gbs/ensembles.hpp"
#include "gbs/oracle.hpp"
#include "gbs/sampler.hpp"
#include "gbs/state_io.hpp"

namespace {

using namespace gbs;

constexpr std::uint64_t kStateGenStream = 0x517cc1b727220a95ULL;

struct BuildFlags {
    int modes = 0;
    std::vector<double> squeezing;
    std::string unitary = "haar";
    std::string graph;
    std::string state_file;
    std::string displacement;
    double mean_photons = -1.0;
};

struct SampleFlags {
    std::string mixture;
    std::string detector = "pnr";
    bool approx = false;
    std::int64_t barvinok_m = 1000;
    int num_samples = 1;
    std::uint64_t seed = 0;
    int n_max = 14;
    int halt_total = 14;
    std::string tail_policy = "renormalize";
    std::string out = "-";
    std::string format = "jsonl";
    bool no_timing = false;
    int threads = 0;
};

void add_build_flags(CLI::App* cmd, BuildFlags& b) {
    cmd->add_option("--modes", b.modes, "mode count for generated states");
    cmd->add_option("--squeezing", b.squeezing,
                    "squeezing parameter r (one value or one per mode)");
    cmd->add_option("--unitary", b.unitary, "'haar' or a JSON matrix file")
        ->default_val("haar");
    cmd->add_option("--graph", b.graph, "adjacency file (dense table or edge list)");
    cmd->add_option("--state", b.state_file, "Gaussian state JSON file");
    cmd->add_option("--displacement", b.displacement, "displacement JSON file ({re, im})");
    cmd->add_option("--mean-photons", b.mean_photons,
                    "target mean photon number (solves the squeezing / graph scale)");
}

GaussianState build_state(const BuildFlags& b, std::uint64_t seed) {
    GaussianState state = GaussianState::vacuum(1);
    if (!b.state_file.empty()) {
        state = io::state_from_json_file(b.state_file);
    } else if (!b.graph.empty()) {
        Mat adj = io::load_adjacency_file(b.graph);
        double scale;
        if (b.mean_photons > 0.0) {
            scale = auto_scale(adj, b.mean_photons);
        } else {
            // no target given: take half of the admissible scaling range,
            // found by bisecting on construction validity
            double lo = 0.0, hi = 1.0;
            for (int grow = 0; grow < 40; ++grow) {
                try {
                    GaussianState::from_adjacency(adj, hi);
                    hi *= 2.0;
                } catch (const std::exception&) {
                    break;
                }
            }
            while (hi - lo > 1e-9 * std::max(1.0, hi)) {
                double mid = 0.5 * (lo + hi);
                try {
                    GaussianState::from_adjacency(adj, mid);
                    lo = mid;
                } catch (const std::exception&) {
                    hi = mid;
                }
            }
            scale = 0.5 * lo;
        }
        state = GaussianState::from_adjacency(adj, scale);
    } else if (b.modes > 0) {
        std::vector<double> r;
        if (!b.squeezing.empty()) {
            r = b.squeezing;
            if (r.size() == 1) r.assign(b.modes, r[0]);
            if (static_cast<int>(r.size()) != b.modes)
                throw CLI::ValidationError("--squeezing needs 1 or m values");
        } else if (b.mean_photons > 0.0) {
            r.assign(b.modes, std::asinh(std::sqrt(b.mean_photons / b.modes)));
        } else {
            r.assign(b.modes, 0.0);
        }
        Mat u = Mat::identity(b.modes);
        if (b.unitary == "haar") {
            Rng gen(Rng::mix(seed, kStateGenStream));
            u = haar_unitary(b.modes, gen);
        } else if (!b.unitary.empty()) {
            u = io::matrix_from_json_file(b.unitary);
        }
        state = GaussianState::from_squeezing_and_unitary(r, u);
    } else {
        throw CLI::ValidationError("no state given: use --modes, --graph or --state");
    }

    if (!b.displacement.empty())
        state = state.with_mean(io::displacement_from_json_file(b.displacement, state.modes()));
    return state;
}

SamplerConfig make_config(const SampleFlags& f) {
    SamplerConfig cfg;
    cfg.n_max = f.n_max;
    cfg.halt_total = f.halt_total;
    cfg.seed = f.seed;
    cfg.barvinok_m = f.barvinok_m;
    if (f.tail_policy == "renormalize")
        cfg.tail_policy = TailPolicy::renormalize;
    else if (f.tail_policy == "reject")
        cfg.tail_policy = TailPolicy::reject;
    else if (f.tail_policy == "error")
        cfg.tail_policy = TailPolicy::error;
    else
        throw CLI::ValidationError("--tail-policy must be renormalize|reject|error");
    cfg.validate();
    return cfg;
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("GBS_SIM_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 0;  // leave the OpenMP default alone
}

SampleRecord run_one(const GaussianState& state, const MixtureSpec* mix, Detector det, bool approx,
                     const SamplerConfig& cfg, Rng rng) {
    if (mix) return sample_mixture(*mix, det, cfg, rng);
    if (approx) return sample_approx_nonneg(state, cfg, rng);
    if (det == Detector::threshold) return sample_threshold(state, cfg, rng);
    if (state.has_displacement()) return sample_displaced(state, cfg, rng);
    return sample_pnr(state, cfg, rng);
}

std::vector<bench::SampleRow> generate_rows(const BuildFlags& b, const SampleFlags& f,
                                            bool sequential) {
    GaussianState state = GaussianState::vacuum(1);
    MixtureSpec mix;
    bool use_mix = !f.mixture.empty();
    if (use_mix)
        mix = io::mixture_from_json_file(f.mixture);
    else
        state = build_state(b, f.seed);

    Detector det = Detector::pnr;
    if (f.detector == "threshold")
        det = Detector::threshold;
    else if (f.detector != "pnr")
        throw CLI::ValidationError("--detector must be pnr|threshold");

    SamplerConfig cfg = make_config(f);
    Rng root(f.seed);
    std::vector<SampleRecord> records(f.num_samples);

    int threads = resolve_threads(f.threads);
    if (threads > 0) omp_set_num_threads(threads);
    bool parallel_samples = !sequential && f.num_samples > 1 && threads != 1;

    // exceptions may not leave an OpenMP region; carry the first one out
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (parallel_samples)
    for (int i = 0; i < f.num_samples; ++i) {
        try {
            records[i] = run_one(state, use_mix ? &mix : nullptr, det, f.approx, cfg,
                                 root.stream(static_cast<std::uint64_t>(i)));
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    std::vector<bench::SampleRow> rows;
    rows.reserve(records.size());
    for (const SampleRecord& rec : records) {
        bench::SampleRow row = bench::row_from_record(rec);
        if (f.no_timing) row.wall_time = 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_rows(const std::vector<bench::SampleRow>& rows, const std::string& out,
                const std::string& format) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (out != "-") {
        file.open(out);
        if (!file) throw std::runtime_error("cannot open " + out);
        os = &file;
    }
    if (format == "csv") {
        *os << bench::csv_header() << '\n';
        for (const auto& row : rows) *os << bench::to_csv(row) << '\n';
    } else if (format == "jsonl") {
        for (const auto& row : rows) *os << bench::to_jsonl(row) << '\n';
    } else {
        throw CLI::ValidationError("--format must be jsonl|csv");
    }
}

int cmd_sample(const BuildFlags& b, const SampleFlags& f) {
    auto rows = generate_rows(b, f, /*sequential=*/false);
    write_rows(rows, f.out, f.format);
    return 0;
}

int cmd_probability(const BuildFlags& b, const SampleFlags& f, const std::string& pattern_text) {
    GaussianState state = build_state(b, f.seed);
    PhotonPattern pat;
    pat.flavor = (f.detector == "threshold") ? Detector::threshold : Detector::pnr;
    std::string text = pattern_text;
    for (char& c : text)
        if (c == ',') c = ' ';
    std::istringstream ps(text);
    int v;
    while (ps >> v) pat.counts.push_back(v);
    if (pat.counts.empty()) throw CLI::ValidationError("--pattern is empty");

    double p;
    if (pat.flavor == Detector::threshold)
        p = state.prob_threshold(pat);
    else if (state.has_displacement())
        p = state.prob_displaced(pat);
    else
        p = state.prob_pnr(pat);
    std::printf("%.17g\n", p);
    return 0;
}

int cmd_validate(const BuildFlags& b, const SampleFlags& f, bool strict) {
    GaussianState state = build_state(b, f.seed);
    bool valid = state.is_valid();
    bool ospec = valid && state.o_spectrum_in_unit_ball();
    bool nonneg_q = state.check_nonneg_q();
    bool nonneg_a = valid && state.check_nonneg_kernel();

    std::printf("validity: %s\n", valid ? "pass" : "FAIL");
    std::printf("o-spectrum: %s\n", ospec ? "pass" : "FAIL");
    std::printf("nonneg-Q (info): %s\n", nonneg_q ? "yes" : "no");
    std::printf("nonneg-kernel (info): %s\n", nonneg_a ? "yes" : "no");

    bool norm_ok = true;
    if (valid && state.modes() <= 3 && !state.has_displacement()) {
        auto table = oracle::fock_distribution(state, 14);
        norm_ok = table.mass >= 0.999;
        std::printf("normalization (cutoff 14): %s (mass %.6f)\n", norm_ok ? "pass" : "FAIL",
                    table.mass);
    } else {
        std::printf("normalization: skip\n");
    }

    bool ok = valid && ospec && norm_ok;
    if (strict && !ok) return 3;
    return 0;
}

int cmd_benchmark(const BuildFlags& b, const SampleFlags& f, const std::string& in,
                  const std::string& fit_model, const std::string& out, const std::string& table,
                  bool include_halted) {
    std::vector<bench::SampleRow> rows;
    if (!in.empty()) {
        std::ifstream is(in);
        if (!is) throw std::runtime_error("cannot open " + in);
        rows = bench::read_rows(is);
    } else {
        // benchmark runs are sequential so per-sample wall times are clean
        rows = generate_rows(b, f, /*sequential=*/true);
    }

    bench::BenchmarkRecord rec;
    rec.rows_total = rows.size();
    for (const auto& row : rows) rec.rows_halted += row.halted ? 1 : 0;
    rec.halted_included = include_halted;
    rec.buckets = bench::bucket_by_photons(rows, include_halted);
    rec.fit = (fit_model == "quad") ? bench::fit_quad(rec.buckets) : bench::fit_exp(rec.buckets);

    std::string json = bench::to_json(rec);
    if (out == "-" || out.empty()) {
        std::cout << json << '\n';
    } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open " + out);
        os << json << '\n';
    }
    if (!table.empty()) {
        std::ofstream os(table);
        if (!os) throw std::runtime_error("cannot open " + table);
        bench::write_table(rec, os);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian boson sampling simulator"};
    app.require_subcommand(1);

    BuildFlags b;
    SampleFlags f;

    auto* sample = app.add_subcommand("sample", "draw samples and emit one record per line");
    add_build_flags(sample, b);
    sample->add_option("--mixture", f.mixture, "mixture JSON file (list of {q, state})");
    sample->add_option("--detector", f.detector, "pnr|threshold")->default_val("pnr");
    sample->add_flag("--approx", f.approx, "Monte Carlo hafnian estimates (non-negative kernels)");
    sample->add_option("--barvinok-M", f.barvinok_m, "draws per hafnian estimate");
    sample->add_option("--num-samples", f.num_samples, "number of samples");
    sample->add_option("--seed", f.seed, "master seed; sample i uses substream i");
    sample->add_option("--n-max", f.n_max, "per-mode photon cutoff");
    sample->add_option("--halt-total", f.halt_total, "halt runs passing this photon total");
    sample->add_option("--tail-policy", f.tail_policy, "renormalize|reject|error");
    sample->add_option("--out", f.out, "output file ('-' for stdout)");
    sample->add_option("--format", f.format, "jsonl|csv");
    sample->add_flag("--no-timing", f.no_timing, "emit wall_time as 0 (reproducible bytes)");
    sample->add_option("--threads", f.threads, "worker cap (env GBS_SIM_THREADS as fallback)");

    std::string pattern_text;
    auto* prob = app.add_subcommand("probability", "probability of one pattern");
    add_build_flags(prob, b);
    prob->add_option("--pattern", pattern_text, "comma-separated counts")->required();
    prob->add_option("--detector", f.detector, "pnr|threshold")->default_val("pnr");
    prob->add_option("--seed", f.seed, "seed for generated unitaries");

    bool strict = false;
    auto* validate = app.add_subcommand("validate", "run the state predicates");
    add_build_flags(validate, b);
    validate->add_flag("--strict", strict, "exit 3 when a predicate fails");
    validate->add_option("--seed", f.seed, "seed for generated unitaries");

    std::string bench_in, fit_model = "exp", bench_out = "-", bench_table;
    bool include_halted = false;
    auto* benchc = app.add_subcommand("benchmark", "bucket runtimes by photon number and fit");
    add_build_flags(benchc, b);
    benchc->add_option("--in", bench_in, "existing JSONL/CSV rows (otherwise sample here)");
    benchc->add_option("--fit", fit_model, "exp|quad")->default_val("exp");
    benchc->add_option("--out", bench_out, "benchmark JSON output ('-' for stdout)");
    benchc->add_option("--table", bench_table, "gnuplot-ready two-column table");
    benchc->add_flag("--include-halted", include_halted, "keep halted rows in the buckets");
    benchc->add_option("--detector", f.detector, "pnr|threshold")->default_val("pnr");
    benchc->add_flag("--approx", f.approx, "benchmark the approximate sampler");
    benchc->add_option("--barvinok-M", f.barvinok_m, "draws per hafnian estimate");
    benchc->add_option("--num-samples", f.num_samples, "number of samples");
    benchc->add_option("--seed", f.seed, "master seed");
    benchc->add_option("--n-max", f.n_max, "per-mode photon cutoff");
    benchc->add_option("--halt-total", f.halt_total, "halt runs passing this photon total");
    benchc->add_option("--threads", f.threads, "worker cap for the kernels");
    benchc->add_option("--mixture", f.mixture, "mixture JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sample->parsed()) return cmd_sample(b, f);
        if (prob->parsed()) return cmd_probability(b, f, pattern_text);
        if (validate->parsed()) return cmd_validate(b, f, strict);
        if (benchc->parsed())
            return cmd_benchmark(b, f, bench_in, fit_model, bench_out, bench_table, include_halted);
    } catch (const InvalidState& e) {
        std::cerr << "invalid state: " << e.what() << '\n';
        return 3;
    } catch (const SingularMatrix& e) {
        std::cerr << "singular matrix: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid state: " << e.what() << '\n';
        return 3;
    } catch (const CLI::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
