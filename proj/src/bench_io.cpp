#include "gbs/bench_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gbs/matrix.hpp"

namespace gbs::bench {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SampleRow row_from_record(const SampleRecord& rec) {
    SampleRow row;
    row.pattern = rec.pattern.counts;
    row.n_photons = rec.pattern.total();
    row.eta = rec.eta;
    row.eps = rec.epsilon;
    row.wall_time = rec.wall_time;
    row.halted = rec.halted;
    return row;
}

std::string to_jsonl(const SampleRow& row) {
    std::string out = "{\"pattern\":[";
    for (std::size_t i = 0; i < row.pattern.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(row.pattern[i]);
    }
    out += "],\"N\":" + std::to_string(row.n_photons);
    out += ",\"eta\":" + fmt_double(row.eta);
    out += ",\"eps\":" + fmt_double(row.eps);
    out += ",\"wall_time\":" + fmt_double(row.wall_time);
    out += std::string(",\"halted\":") + (row.halted ? "true" : "false") + "}";
    return out;
}

SampleRow from_jsonl(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    SampleRow row;
    row.pattern = j.at("pattern").get<std::vector<int>>();
    row.n_photons = j.at("N").get<int>();
    row.eta = j.at("eta").get<double>();
    row.eps = j.at("eps").get<double>();
    row.wall_time = j.at("wall_time").get<double>();
    row.halted = j.at("halted").get<bool>();
    return row;
}

std::string csv_header() { return "pattern,N,eta,eps,wall_time,halted"; }

std::string to_csv(const SampleRow& row) {
    std::string out;
    for (std::size_t i = 0; i < row.pattern.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(row.pattern[i]);
    }
    out += ',' + std::to_string(row.n_photons);
    out += ',' + fmt_double(row.eta);
    out += ',' + fmt_double(row.eps);
    out += ',' + fmt_double(row.wall_time);
    out += row.halted ? ",1" : ",0";
    return out;
}

SampleRow from_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    if (fields.size() != 6) throw ConfigError("csv row: expected 6 fields");

    SampleRow row;
    std::istringstream ps(fields[0]);
    int v;
    while (ps >> v) row.pattern.push_back(v);
    row.n_photons = std::stoi(fields[1]);
    row.eta = std::strtod(fields[2].c_str(), nullptr);
    row.eps = std::strtod(fields[3].c_str(), nullptr);
    row.wall_time = std::strtod(fields[4].c_str(), nullptr);
    row.halted = fields[5] == "1" || fields[5] == "true";
    return row;
}

std::vector<SampleRow> read_rows(std::istream& is) {
    std::vector<SampleRow> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '{')
            rows.push_back(from_jsonl(line));
        else if (line.rfind("pattern,", 0) == 0)
            continue;  // CSV header
        else
            rows.push_back(from_csv(line));
    }
    return rows;
}

std::vector<Bucket> bucket_by_photons(const std::vector<SampleRow>& rows, bool include_halted) {
    std::map<int, std::vector<double>> groups;
    for (const SampleRow& row : rows) {
        if (row.halted && !include_halted) continue;
        groups[row.n_photons].push_back(row.wall_time);
    }
    std::vector<Bucket> buckets;
    for (const auto& [n, times] : groups) {
        Bucket b;
        b.n_photons = n;
        b.count = static_cast<int>(times.size());
        for (double t : times) b.mean += t;
        b.mean /= times.size();
        double var = 0.0;
        for (double t : times) var += (t - b.mean) * (t - b.mean);
        b.stddev = times.size() > 1 ? std::sqrt(var / (times.size() - 1)) : 0.0;
        buckets.push_back(b);
    }
    return buckets;
}

namespace {

double r_squared(const std::vector<double>& y, const std::vector<double>& yhat) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= y.size();
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_tot += (y[i] - mean) * (y[i] - mean);
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

void require_enough(const std::vector<Bucket>& buckets) {
    if (buckets.size() < 3)
        throw ConfigError("fit: need at least 3 distinct photon numbers, have " +
                          std::to_string(buckets.size()));
}

// Least-squares polynomial y ~ sum_k c_k x^k via normal equations.
std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int deg) {
    std::size_t p = deg + 1;
    Mat ata(p, p);
    std::vector<cplx> aty(p, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> pows(2 * p - 1, 1.0);
        for (std::size_t t = 1; t < pows.size(); ++t) pows[t] = pows[t - 1] * x[i];
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = 0; c < p; ++c) ata(r, c) += pows[r + c];
            aty[r] += pows[r] * y[i];
        }
    }
    Mat inv = inverse(ata);
    std::vector<double> coef(p, 0.0);
    for (std::size_t r = 0; r < p; ++r) {
        cplx s = 0.0;
        for (std::size_t c = 0; c < p; ++c) s += inv(r, c) * aty[c];
        coef[r] = s.real();
    }
    return coef;
}

}  // namespace

FitResult fit_exp(const std::vector<Bucket>& buckets) {
    require_enough(buckets);
    std::vector<double> x, y;
    for (const Bucket& b : buckets) {
        if (b.mean <= 0.0) throw ConfigError("fit_exp: non-positive mean runtime");
        x.push_back(b.n_photons);
        y.push_back(std::log(b.mean));
    }
    std::vector<double> coef = polyfit(x, y, 1);  // log T = b + a N
    FitResult fit;
    fit.model = "exp";
    fit.params = {coef[1], coef[0]};
    std::vector<double> yhat(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) yhat[i] = coef[0] + coef[1] * x[i];
    fit.r2 = r_squared(y, yhat);
    return fit;
}

FitResult fit_quad(const std::vector<Bucket>& buckets) {
    require_enough(buckets);
    std::vector<double> x, y;
    for (const Bucket& b : buckets) {
        x.push_back(b.n_photons);
        y.push_back(b.mean);
    }
    std::vector<double> coef = polyfit(x, y, 2);  // T = c + b N + a N^2
    FitResult fit;
    fit.model = "quad";
    fit.params = {coef[2], coef[1], coef[0]};
    std::vector<double> yhat(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        yhat[i] = coef[0] + coef[1] * x[i] + coef[2] * x[i] * x[i];
    fit.r2 = r_squared(y, yhat);
    return fit;
}

std::string to_json(const BenchmarkRecord& rec) {
    nlohmann::json j;
    j["rows_total"] = rec.rows_total;
    j["rows_halted"] = rec.rows_halted;
    j["halted_included"] = rec.halted_included;
    j["buckets"] = nlohmann::json::array();
    for (const Bucket& b : rec.buckets)
        j["buckets"].push_back(
            {{"N", b.n_photons}, {"count", b.count}, {"mean_s", b.mean}, {"std_s", b.stddev}});
    j["fit"] = {{"model", rec.fit.model}, {"params", rec.fit.params}, {"r2", rec.fit.r2}};
    return j.dump(2);
}

void write_table(const BenchmarkRecord& rec, std::ostream& os) {
    os << "# N mean_seconds\n";
    for (const Bucket& b : rec.buckets) os << b.n_photons << ' ' << fmt_double(b.mean) << '\n';
}

}  // namespace gbs::bench
