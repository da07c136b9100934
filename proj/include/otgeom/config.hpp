#pragma once

// Configuration loading for the command-line driver: strict JSON parsing
// (unknown keys are errors, caught as usage problems), plus builders that
// turn small JSON descriptions into cost models and charts.

#include "otgeom/graph_chart.hpp"
#include "otgeom/report.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace otgeom::config {

using nlohmann::json;

struct VerifyConfig {
    std::uint64_t seed = 20260822;
    double tol_scale = 1.0;
    int jobs = 1;
    std::vector<std::string> sections;  // empty = run everything
    double entropic_lambda = 1.0;
};

inline json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConstructionError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConstructionError(std::string("config: parse error: ") + e.what());
    }
    return j;
}

inline void require_keys_subset(const json& j, const std::set<std::string>& allowed,
                                const char* where) {
    if (!j.is_object()) throw ConstructionError(std::string(where) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConstructionError(std::string(where) + ": unknown key '" + key + "'");
    }
}

inline VerifyConfig parse_verify_config(const json& j) {
    VerifyConfig c;
    require_keys_subset(j, {"seed", "tol_scale", "jobs", "sections", "entropic_lambda"},
                        "verify config");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tol_scale")) c.tol_scale = j.at("tol_scale").get<double>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    if (j.contains("sections")) c.sections = j.at("sections").get<std::vector<std::string>>();
    if (j.contains("entropic_lambda")) c.entropic_lambda = j.at("entropic_lambda").get<double>();
    if (!(c.tol_scale > 0)) throw ConstructionError("verify config: tol_scale must be positive");
    if (c.jobs < 1 || c.jobs > 64) throw ConstructionError("verify config: jobs out of range");
    return c;
}

inline std::string digest_of(const json& j) { return report::fnv1a_digest(j.dump()); }

inline Vector parse_vector(const json& j, const char* where) {
    if (!j.is_array() || j.empty())
        throw ConstructionError(std::string(where) + ": expected a nonempty array");
    Vector v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
    return v;
}

inline Matrix parse_matrix(const json& j, const char* where) {
    if (!j.is_array() || j.empty())
        throw ConstructionError(std::string(where) + ": expected a nonempty array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.at(0).size());
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j.at(r).size()) != cols)
            throw ConstructionError(std::string(where) + ": ragged rows");
        for (int c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    }
    return m;
}

inline cost::CostPtr make_cost(const json& j) {
    require_keys_subset(j, {"type", "n", "alpha", "lambda", "cost_matrix"}, "cost config");
    const std::string type = j.at("type").get<std::string>();
    const int n = j.value("n", 2);
    if (type == "quadratic") return cost::quadratic_cost(n);
    if (type == "log") return cost::log_cost(n, j.value("alpha", 1.0));
    if (type == "cosh")
        return cost::convex_translation_cost(n, std::make_shared<cost::CoshField>());
    if (type == "quartic")
        return cost::convex_translation_cost(n, std::make_shared<cost::QuarticField>());
    if (type == "entropic") {
        Matrix C = j.contains("cost_matrix")
                       ? parse_matrix(j.at("cost_matrix"), "cost config")
                       : graph::default_entropic_problem().C;
        return cost::entropic_cost(
            cost::EntropicProblem(std::move(C), j.value("lambda", 1.0), 1e-13, 100000));
    }
    throw ConstructionError("cost config: unknown type '" + type + "'");
}

inline graph::ChartPtr make_chart(const json& j) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "quadratic-identity")
            return std::make_shared<graph::QuadraticChart>(graph::half_square_generator(2));
        if (name == "quadratic-spd")
            return std::make_shared<graph::QuadraticChart>(
                graph::spd_generator(graph::default_spd_matrix()));
        if (name == "quadratic-lse")
            return std::make_shared<graph::QuadraticChart>(graph::log_sum_exp_generator(2));
        if (name == "log-n1")
            return std::make_shared<graph::LogChart>(1, 1.0, 0.5, 0.5 * std::log(2.0));
        if (name == "log-n2")
            return std::make_shared<graph::LogChart>(2, 1.0, 1.0 / 3.0, 0.0);
        if (name == "entropic") return graph::entropic_chart();
        throw ConstructionError("chart config: unknown chart '" + name + "'");
    }
    require_keys_subset(j, {"type", "n", "alpha", "s", "kappa", "lambda"}, "chart config");
    const std::string type = j.at("type").get<std::string>();
    if (type == "log") {
        const int n = j.value("n", 1);
        return std::make_shared<graph::LogChart>(n, j.value("alpha", 1.0),
                                                 j.value("s", 1.0 / (2.0 * n)),
                                                 j.value("kappa", 0.0));
    }
    if (type == "entropic") return graph::entropic_chart(j.value("lambda", 1.0));
    throw ConstructionError("chart config: unknown type '" + type + "'");
}

}  // namespace otgeom::config
