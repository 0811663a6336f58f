#pragma once

#include <string>

#include <json.hpp>

#include "subrad/jsr.hpp"
#include "subrad/lsr.hpp"

namespace subrad::io {

/// Fixed-precision decimal string, 15 significant digits.
std::string format_significant(double v, int digits = 15);

/// Family file: {"dim": d, "matrices": [[row-major...], ...], "labels": [...]}.
/// Matrix entries may be numbers or decimal strings; strings are parsed with
/// strtod so a decimal file round-trips value-exactly.
MatrixFamily family_from_json(const nlohmann::json& j);
nlohmann::json family_to_json(const MatrixFamily& f);
MatrixFamily load_family(const std::string& path);
void save_family(const MatrixFamily& f, const std::string& path);

/// Vertex file: {"dim": d, "vertices": [[...], ...]}, column order preserved.
std::vector<Vector> vertices_from_json(const nlohmann::json& j, std::size_t expect_dim);
nlohmann::json vertices_to_json(std::size_t dim, const std::vector<Vector>& v);
std::vector<Vector> load_vertices(const std::string& path, std::size_t expect_dim);

nlohmann::json report_to_json(const SolverReport& rep);
nlohmann::json report_to_json(const JsrReport& rep);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace subrad::io
