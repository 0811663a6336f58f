#include "subrad/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace subrad::io {

using nlohmann::json;

std::string format_significant(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

namespace {

double entry_to_double(const json& e) {
    if (e.is_number()) return e.get<double>();
    if (e.is_string()) {
        const std::string s = e.get<std::string>();
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || (end && *end != '\0'))
            throw InvalidInputError("malformed numeric string: '" + s + "'");
        return v;
    }
    throw InvalidInputError("matrix entries must be numbers or decimal strings");
}

}  // namespace

MatrixFamily family_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("matrices"))
        throw InvalidInputError("family file needs 'dim' and 'matrices'");
    const auto d = j.at("dim").get<std::size_t>();
    if (d < 1) throw InvalidInputError("dim must be >= 1");
    std::vector<Matrix> members;
    for (const json& arr : j.at("matrices")) {
        if (!arr.is_array() || arr.size() != d * d)
            throw InvalidInputError("each matrix needs dim^2 row-major entries");
        Matrix m(d, d);
        std::size_t idx = 0;
        for (const json& e : arr) m.data()[idx++] = entry_to_double(e);
        if (!m.all_finite()) throw InvalidInputError("matrix entries must be finite");
        members.push_back(std::move(m));
    }
    std::vector<std::string> labels;
    if (j.contains("labels"))
        for (const json& l : j.at("labels")) labels.push_back(l.get<std::string>());
    return make_family(std::move(members), std::move(labels));
}

json family_to_json(const MatrixFamily& f) {
    json j;
    j["dim"] = f.dim;
    json mats = json::array();
    for (const Matrix& m : f.members) mats.push_back(m.data());
    j["matrices"] = std::move(mats);
    if (!f.labels.empty()) j["labels"] = f.labels;
    return j;
}

MatrixFamily load_family(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw InvalidInputError(std::string("family file is not valid JSON: ") + e.what());
    }
    return family_from_json(j);
}

void save_family(const MatrixFamily& f, const std::string& path) {
    write_text_file(path, family_to_json(f).dump(2) + "\n");
}

std::vector<Vector> vertices_from_json(const json& j, std::size_t expect_dim) {
    if (!j.is_object() || !j.contains("vertices"))
        throw InvalidInputError("vertex file needs 'vertices'");
    if (j.contains("dim") && j.at("dim").get<std::size_t>() != expect_dim)
        throw InvalidInputError("vertex file dimension does not match the family");
    std::vector<Vector> out;
    for (const json& arr : j.at("vertices")) {
        if (!arr.is_array() || arr.size() != expect_dim)
            throw InvalidInputError("each vertex needs dim entries");
        Vector v;
        for (const json& e : arr) v.push_back(entry_to_double(e));
        out.push_back(std::move(v));
    }
    if (out.empty()) throw InvalidInputError("vertex file holds no vertices");
    return out;
}

json vertices_to_json(std::size_t dim, const std::vector<Vector>& v) {
    json j;
    j["dim"] = dim;
    json arr = json::array();
    for (const Vector& w : v) arr.push_back(w);
    j["vertices"] = std::move(arr);
    return j;
}

std::vector<Vector> load_vertices(const std::string& path, std::size_t expect_dim) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw InvalidInputError(std::string("vertex file is not valid JSON: ") + e.what());
    }
    return vertices_from_json(j, expect_dim);
}

namespace {

json metrics_json(const SolverMetrics& m) {
    return json{{"l_opt", m.l_opt},
                {"l_slp", m.l_slp},
                {"n", m.n},
                {"n_op", m.n_op},
                {"j_max", m.j_max}};
}

}  // namespace

json report_to_json(const SolverReport& rep) {
    json j;
    j["lower"] = format_significant(rep.lower);
    j["upper"] = format_significant(rep.upper);
    j["metrics"] = metrics_json(rep.metrics);
    j["slp_candidates"] = rep.slp_candidates;
    j["vertex_count"] = rep.final_vertices.size();
    j["terminated_by"] = rep.terminated_by == Termination::Accuracy ? "accuracy" : "budget";
    j["lp_failures"] = rep.lp_failures;
    if (rep.driver_iterations > 0) {
        j["driver_iterations"] = rep.driver_iterations;
        j["rescale_applied"] = format_significant(rep.rescale_applied);
    }
    return j;
}

json report_to_json(const JsrReport& rep) {
    json j;
    j["lower"] = format_significant(rep.lower);
    j["upper"] = format_significant(rep.upper);
    j["metrics"] = metrics_json(rep.metrics);
    j["slp_candidates"] = rep.slp_candidates;
    j["vertex_count"] = rep.final_vertices.size();
    j["terminated_by"] = rep.terminated_by == Termination::Accuracy ? "accuracy" : "budget";
    j["lp_failures"] = rep.lp_failures;
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write file: " + path);
    out << text;
}

}  // namespace subrad::io
