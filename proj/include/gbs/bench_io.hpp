#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gbs/sampler.hpp"

namespace gbs::bench {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// One emitted sample row. Floats are printed with %.17g so parsing an
/// emitted file reproduces the in-memory values exactly.
struct SampleRow {
    std::vector<int> pattern;
    int n_photons = 0;
    double eta = 1.0;
    double eps = 0.0;
    double wall_time = 0.0;
    bool halted = false;

    bool operator==(const SampleRow&) const = default;
};

SampleRow row_from_record(const SampleRecord& rec);

std::string to_jsonl(const SampleRow& row);
SampleRow from_jsonl(const std::string& line);

std::string csv_header();
std::string to_csv(const SampleRow& row);
SampleRow from_csv(const std::string& line);

/// Reads rows from a stream, auto-detecting JSONL vs CSV.
std::vector<SampleRow> read_rows(std::istream& is);

struct Bucket {
    int n_photons = 0;
    int count = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Groups wall times by photon number. Halted rows are skipped unless
/// included explicitly (their photon totals are truncated).
std::vector<Bucket> bucket_by_photons(const std::vector<SampleRow>& rows, bool include_halted);

struct FitResult {
    std::string model;           // "exp" or "quad"
    std::vector<double> params;  // exp: {a, b} for T = e^(aN+b); quad: {a, b, c}
    double r2 = 0.0;             // log-domain for exp, plain for quad
};

/// Least squares on bucket means; throws ConfigError with fewer than
/// three distinct photon numbers.
FitResult fit_exp(const std::vector<Bucket>& buckets);
FitResult fit_quad(const std::vector<Bucket>& buckets);

struct BenchmarkRecord {
    std::vector<Bucket> buckets;
    FitResult fit;
    std::size_t rows_total = 0;
    std::size_t rows_halted = 0;
    bool halted_included = false;
};

std::string to_json(const BenchmarkRecord& rec);

/// Two-column gnuplot table: photon number and mean seconds.
void write_table(const BenchmarkRecord& rec, std::ostream& os);

}  // namespace gbs::bench
