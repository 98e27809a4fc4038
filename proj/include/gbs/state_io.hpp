#pragma once

#include <iosfwd>
#include <string>

#include "gbs/gaussian_state.hpp"

namespace gbs::io {

/// JSON schema: {"m": m, "sigma_re": [...], "sigma_im": [...],
/// "mean_re": [...], "mean_im": [...]} with sigma row-major 2m x 2m and
/// the means of length m.
std::string state_to_json(const GaussianState& state);
GaussianState state_from_json(const std::string& text);

/// Mixtures are a JSON list of {"q": weight, "state": {...}}; a negative
/// weight marks the combination as signed.
std::string mixture_to_json(const MixtureSpec& mix);
MixtureSpec mixture_from_json(const std::string& text);

/// Displacement vector: {"re": [...], "im": [...]} of length m.
std::vector<cplx> displacement_from_json(const std::string& text, std::size_t m);

/// Complex matrix as {"m": m, "re": [...], "im": [...]}, row-major.
std::string matrix_to_json(const Mat& u);
Mat matrix_from_json(const std::string& text);

/// Adjacency input. A file whose rows form a square numeric table is
/// read as a dense matrix (comma or whitespace separated); otherwise
/// each line is a "u v" edge with 0-based vertices.
Mat load_adjacency(std::istream& is);
Mat load_adjacency_file(const std::string& path);

GaussianState state_from_json_file(const std::string& path);
MixtureSpec mixture_from_json_file(const std::string& path);
Mat matrix_from_json_file(const std::string& path);
std::vector<cplx> displacement_from_json_file(const std::string& path, std::size_t m);

}  // namespace gbs::io
