#include "gbs/state_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gbs::io {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json mat_parts(const Mat& m) {
    json re = json::array(), im = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Mat mat_from_parts(const json& re, const json& im, std::size_t n) {
    if (re.size() != n * n || im.size() != n * n)
        throw std::runtime_error("matrix JSON: wrong element count");
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = cplx(re[i * n + j].get<double>(), im[i * n + j].get<double>());
    return m;
}

json state_to_json_obj(const GaussianState& state) {
    json j;
    std::size_t m = state.modes();
    j["m"] = m;
    json parts = mat_parts(state.sigma());
    j["sigma_re"] = std::move(parts["re"]);
    j["sigma_im"] = std::move(parts["im"]);
    json re = json::array(), im = json::array();
    for (const cplx& a : state.mean()) {
        re.push_back(a.real());
        im.push_back(a.imag());
    }
    j["mean_re"] = std::move(re);
    j["mean_im"] = std::move(im);
    return j;
}

GaussianState state_from_json_obj(const json& j) {
    std::size_t m = j.at("m").get<std::size_t>();
    Mat sigma = mat_from_parts(j.at("sigma_re"), j.at("sigma_im"), 2 * m);
    const json& re = j.at("mean_re");
    const json& im = j.at("mean_im");
    if (re.size() != m || im.size() != m) throw std::runtime_error("state JSON: bad mean length");
    std::vector<cplx> mean(m);
    for (std::size_t i = 0; i < m; ++i) mean[i] = cplx(re[i].get<double>(), im[i].get<double>());
    return GaussianState::from_covariance(std::move(sigma), std::move(mean));
}

}  // namespace

std::string state_to_json(const GaussianState& state) { return state_to_json_obj(state).dump(); }

GaussianState state_from_json(const std::string& text) {
    return state_from_json_obj(json::parse(text));
}

std::string mixture_to_json(const MixtureSpec& mix) {
    json arr = json::array();
    for (const auto& c : mix.components)
        arr.push_back(json{{"q", c.q}, {"state", state_to_json_obj(c.state)}});
    return arr.dump();
}

MixtureSpec mixture_from_json(const std::string& text) {
    json arr = json::parse(text);
    if (!arr.is_array() || arr.empty()) throw std::runtime_error("mixture JSON: expected a list");
    MixtureSpec mix;
    for (const json& item : arr) {
        double q = item.at("q").get<double>();
        mix.components.push_back({q, state_from_json_obj(item.at("state"))});
        if (q < 0.0) mix.is_signed = true;
    }
    mix.validate();
    return mix;
}

std::vector<cplx> displacement_from_json(const std::string& text, std::size_t m) {
    json j = json::parse(text);
    const json& re = j.at("re");
    const json& im = j.at("im");
    if (re.size() != m || im.size() != m)
        throw std::runtime_error("displacement JSON: expected length-m re/im arrays");
    std::vector<cplx> a(m);
    for (std::size_t i = 0; i < m; ++i) a[i] = cplx(re[i].get<double>(), im[i].get<double>());
    return a;
}

std::string matrix_to_json(const Mat& u) {
    json j = mat_parts(u);
    j["m"] = u.rows();
    return j.dump();
}

Mat matrix_from_json(const std::string& text) {
    json j = json::parse(text);
    std::size_t n = j.at("m").get<std::size_t>();
    return mat_from_parts(j.at("re"), j.at("im"), n);
}

Mat load_adjacency(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("adjacency: empty input");

    bool square = true;
    for (const auto& row : rows)
        if (row.size() != rows.size()) square = false;

    // A square table of integer pairs can still be an edge list; an index
    // beyond the row count settles it.
    if (square && rows.size() == 2) {
        bool integral = true;
        double top = 0.0;
        for (const auto& row : rows)
            for (double v : row) {
                if (v < 0.0 || v != std::floor(v)) integral = false;
                top = std::max(top, v);
            }
        if (integral && top >= static_cast<double>(rows.size())) square = false;
    }

    if (square) {
        std::size_t n = rows.size();
        Mat adj(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) adj(i, j) = rows[i][j];
        return adj;
    }

    // edge list: "u v" per line, 0-based
    std::size_t n = 0;
    for (const auto& row : rows) {
        if (row.size() != 2) throw std::runtime_error("adjacency: neither square table nor edge list");
        n = std::max({n, static_cast<std::size_t>(row[0]) + 1, static_cast<std::size_t>(row[1]) + 1});
    }
    Mat adj(n, n);
    for (const auto& row : rows) {
        auto u = static_cast<std::size_t>(row[0]);
        auto v = static_cast<std::size_t>(row[1]);
        adj(u, v) = 1.0;
        adj(v, u) = 1.0;
    }
    return adj;
}

Mat load_adjacency_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return load_adjacency(f);
}

GaussianState state_from_json_file(const std::string& path) { return state_from_json(slurp(path)); }
MixtureSpec mixture_from_json_file(const std::string& path) { return mixture_from_json(slurp(path)); }
Mat matrix_from_json_file(const std::string& path) { return matrix_from_json(slurp(path)); }
std::vector<cplx> displacement_from_json_file(const std::string& path, std::size_t m) {
    return displacement_from_json(slurp(path), m);
}

}  // namespace gbs::io
