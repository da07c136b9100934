// Command-line driver.
//
// Subcommands:
//   verify    run the full check suite, write a JSON report, exit nonzero on
//             any failing check
//   eval      evaluate one cost model at one product point: value, split
//             metric spectrum, signature, curvature block
//   geodesic  integrate a chart geodesic (primal or dual connection), write
//             the sampled path as CSV, report residuals as JSON
//   sinkhorn  solve one entropic transport problem, report value and
//             marginal residuals, optionally write the coupling as CSV
//   canonical compute the geodesic-integral divergence of a chart between
//             two points, with the endpoint energy and restriction gap
//
// Exit codes: 0 success / all checks pass, 1 numerical failure or failing
// checks, 2 configuration or usage errors.

#include "otgeom/config.hpp"
#include "otgeom/verify_suite.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace otgeom;
using nlohmann::json;
using nlohmann::ordered_json;

ordered_json vector_json(const Vector& v) {
    ordered_json a = ordered_json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(report::format_double(v[i]));
    return a;
}

ordered_json matrix_json(const Matrix& m) {
    ordered_json a = ordered_json::array();
    for (int r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(report::format_double(m(r, c)));
        a.push_back(row);
    }
    return a;
}

void emit(const ordered_json& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConstructionError("cannot open output file: " + out_path);
        out << payload.dump(2) << "\n";
    }
}

// ---------------------------------------------------------------------------

struct VerifyCli {
    std::string config_path, out_path = "report.json";
    std::uint64_t seed = 0;
    double tol_scale = 0;
    int jobs = 0;
    std::vector<std::string> sections;
    CLI::Option *seed_opt = nullptr, *tol_opt = nullptr, *jobs_opt = nullptr;
};

int run_verify_cmd(const VerifyCli& cli) {
    config::VerifyConfig cfg;
    if (!cli.config_path.empty())
        cfg = config::parse_verify_config(config::load_json_file(cli.config_path));
    if (cli.seed_opt->count()) cfg.seed = cli.seed;
    if (cli.tol_opt->count()) cfg.tol_scale = cli.tol_scale;
    if (cli.jobs_opt->count()) cfg.jobs = cli.jobs;
    if (!cli.sections.empty()) cfg.sections = cli.sections;
    if (!(cfg.tol_scale > 0)) throw ConstructionError("tol_scale must be positive");
    if (cfg.jobs < 1 || cfg.jobs > 64) throw ConstructionError("jobs out of range [1, 64]");

    suite::SuiteOptions opt;
    opt.seed = cfg.seed;
    opt.tol_scale = cfg.tol_scale;
    opt.jobs = cfg.jobs;
    opt.sections = cfg.sections;
    opt.entropic_lambda = cfg.entropic_lambda;

    // The digest covers the semantic configuration only: the jobs knob
    // affects scheduling, never results, and reports must be byte-identical
    // across job counts.
    ordered_json effective;
    effective["seed"] = cfg.seed;
    effective["tol_scale"] = report::format_double(cfg.tol_scale);
    effective["sections"] = cfg.sections;
    effective["entropic_lambda"] = report::format_double(cfg.entropic_lambda);

    report::Report rep = suite::run_verify(opt);
    rep.config_digest = report::fnv1a_digest(effective.dump());
    report::write_report(rep, cli.out_path);

    for (const auto& e : rep.entries)
        if (!e.pass)
            std::cout << "FAIL " << e.name << ": computed=" << report::format_double(e.computed)
                      << " reference=" << report::format_double(e.reference)
                      << " tolerance=" << report::format_double(e.tolerance) << "\n";
    std::cout << "verify: " << rep.entries.size() << " checks, " << rep.failures()
              << " failures, report written to " << cli.out_path << "\n";
    return rep.all_pass() ? 0 : 1;
}

// ---------------------------------------------------------------------------

int run_eval_cmd(const std::string& config_path, const std::string& out_path) {
    const json j = config::load_json_file(config_path);
    config::require_keys_subset(j, {"cost", "xi", "eta"}, "eval config");
    if (!j.contains("cost") || !j.contains("xi") || !j.contains("eta"))
        throw ConstructionError("eval config: needs 'cost', 'xi', 'eta'");
    const cost::CostPtr c = config::make_cost(j.at("cost"));
    const Vector xi = config::parse_vector(j.at("xi"), "eval config xi");
    const Vector eta = config::parse_vector(j.at("eta"), "eval config eta");
    if (xi.size() != c->dim() || eta.size() != c->dim())
        throw ConstructionError("eval config: point dimension does not match the cost");

    const Matrix h = product::metric_h_full(*c, xi, eta);
    const Vector eigs = num::symmetric_eigenvalues(h);
    const auto sig = num::signature(h);
    const Rank4Coefficients S = product::curvature_canonical(*c, xi, eta);

    ordered_json payload;
    payload["cost"] = c->name();
    payload["n"] = c->dim();
    payload["value"] = report::format_double(c->value(xi, eta));
    payload["metric_eigenvalues"] = vector_json(eigs);
    payload["signature"] = {sig.first, sig.second};
    ordered_json block = ordered_json::array();
    const int n = c->dim();
    for (int i = 0; i < n; ++i) {
        ordered_json bi = ordered_json::array();
        for (int jj = 0; jj < n; ++jj) {
            ordered_json bj = ordered_json::array();
            for (int k = 0; k < n; ++k) {
                ordered_json bk = ordered_json::array();
                for (int l = 0; l < n; ++l)
                    bk.push_back(report::format_double(S(i, jj, k, l)));
                bj.push_back(bk);
            }
            bi.push_back(bj);
        }
        block.push_back(bi);
    }
    payload["curvature_block"] = block;
    emit(payload, out_path);
    return 0;
}

// ---------------------------------------------------------------------------

int run_geodesic_cmd(const std::string& config_path, const std::string& out_path) {
    const json j = config::load_json_file(config_path);
    config::require_keys_subset(
        j, {"chart", "p", "v", "q", "connection", "t1", "steps", "samples"}, "geodesic config");
    if (!j.contains("chart") || !j.contains("p"))
        throw ConstructionError("geodesic config: needs 'chart' and 'p'");
    const graph::ChartPtr chart = config::make_chart(j.at("chart"));
    const Vector p = config::parse_vector(j.at("p"), "geodesic config p");
    const std::string connection = j.value("connection", std::string("primal"));
    const double t1 = j.value("t1", 1.0);
    const int steps = j.value("steps", 128);
    const int samples = j.value("samples", 65);
    if (p.size() != chart->dim())
        throw ConstructionError("geodesic config: start dimension does not match the chart");
    if (connection != "primal" && connection != "dual")
        throw ConstructionError("geodesic config: connection must be 'primal' or 'dual'");
    if (steps < 16 || samples < 2) throw ConstructionError("geodesic config: too few steps");

    Vector v;
    double endpoint_gap = -1;
    if (j.contains("q")) {
        if (connection != "primal")
            throw ConstructionError("geodesic config: target solving supports 'primal' only");
        const Vector q = config::parse_vector(j.at("q"), "geodesic config q");
        if (q.size() != chart->dim())
            throw ConstructionError("geodesic config: target dimension does not match");
        v = geo::primal_geodesic_bvp(*chart, p, q, 1e-12, steps);
    } else if (j.contains("v")) {
        v = config::parse_vector(j.at("v"), "geodesic config v");
        if (v.size() != chart->dim())
            throw ConstructionError("geodesic config: velocity dimension does not match");
    } else {
        throw ConstructionError("geodesic config: needs 'v' or 'q'");
    }

    const geo::ConnectionField field = connection == "primal"
                                           ? geo::primal_connection_field(*chart)
                                           : geo::dual_connection_field(*chart);
    const Vector start = connection == "primal" ? p : chart->forward(p);
    const geo::GeodesicPath path =
        geo::integrate_geodesic(field, chart->dim(), start, v, 0.0, t1, steps);

    if (j.contains("q")) {
        const Vector q = config::parse_vector(j.at("q"), "geodesic config q");
        endpoint_gap = (path.position(t1) - q).cwiseAbs().maxCoeff();
    }

    const int n = chart->dim();
    std::vector<std::string> header = {"t"};
    for (int i = 0; i < n; ++i) header.push_back("xi" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) header.push_back("eta" + std::to_string(i + 1));
    std::vector<std::vector<double>> rows;
    for (int s = 0; s < samples; ++s) {
        const double t = t1 * s / (samples - 1);
        const Vector pos = path.position(t);
        const Vector xi = connection == "primal" ? pos : chart->inverse(pos);
        const Vector eta = connection == "primal" ? chart->forward(pos) : pos;
        std::vector<double> row = {t};
        for (int i = 0; i < n; ++i) row.push_back(xi[i]);
        for (int i = 0; i < n; ++i) row.push_back(eta[i]);
        rows.push_back(std::move(row));
    }
    const std::string csv_path = out_path.empty() ? "geodesic.csv" : out_path;
    report::write_csv(csv_path, header, rows);

    ordered_json payload;
    payload["chart"] = chart->name();
    payload["connection"] = connection;
    payload["steps"] = steps;
    payload["t1"] = report::format_double(t1);
    payload["residual"] = report::format_double(geo::geodesic_residual(path, field));
    payload["endpoint"] = vector_json(path.position(t1));
    if (endpoint_gap >= 0) payload["endpoint_gap"] = report::format_double(endpoint_gap);
    payload["csv"] = csv_path;
    std::cout << payload.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int run_sinkhorn_cmd(const std::string& config_path, const std::string& out_path) {
    const json j = config::load_json_file(config_path);
    config::require_keys_subset(j, {"cost_matrix", "lambda", "p", "q", "tol", "max_iters"},
                                "sinkhorn config");
    const Matrix C = j.contains("cost_matrix")
                         ? config::parse_matrix(j.at("cost_matrix"), "sinkhorn config")
                         : graph::default_entropic_problem().C;
    const cost::EntropicProblem prob(C, j.value("lambda", 1.0), j.value("tol", 1e-12),
                                     j.value("max_iters", 100000));
    if (!j.contains("p")) throw ConstructionError("sinkhorn config: needs 'p'");
    const Vector p = config::parse_vector(j.at("p"), "sinkhorn config p");
    const Vector q = j.contains("q") ? config::parse_vector(j.at("q"), "sinkhorn config q")
                                     : cost::shrinkage_closed_form(prob, p);

    const cost::SinkhornResult r = cost::sinkhorn_c_lambda(prob, p, q);
    ordered_json payload;
    payload["states"] = prob.states();
    payload["lambda"] = report::format_double(prob.lambda);
    payload["value"] = report::format_double(r.value);
    payload["iterations"] = r.iterations;
    payload["residual"] = report::format_double(r.residual);
    payload["divergence"] = report::format_double(cost::d_lambda(prob, p, q));
    payload["shrinkage"] = vector_json(cost::shrinkage_closed_form(prob, p));
    payload["row_marginal_gap"] = report::format_double(
        (r.coupling.pi.rowwise().sum() - p).cwiseAbs().maxCoeff());
    payload["col_marginal_gap"] = report::format_double(
        (r.coupling.pi.colwise().sum().transpose() - q).cwiseAbs().maxCoeff());
    if (!out_path.empty()) {
        std::vector<std::string> header = {"i", "j", "mass"};
        std::vector<std::vector<double>> rows;
        for (int a = 0; a < prob.states(); ++a)
            for (int b = 0; b < prob.states(); ++b)
                rows.push_back({static_cast<double>(a + 1), static_cast<double>(b + 1),
                                r.coupling.pi(a, b)});
        report::write_csv(out_path, header, rows);
        payload["coupling_csv"] = out_path;
    }
    std::cout << payload.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int run_canonical_cmd(const std::string& config_path, const std::string& out_path) {
    const json j = config::load_json_file(config_path);
    config::require_keys_subset(j, {"chart", "p", "q", "s1", "s2", "steps"}, "canonical config");
    if (!j.contains("chart") || !j.contains("p") || !j.contains("q"))
        throw ConstructionError("canonical config: needs 'chart', 'p', 'q'");
    const graph::ChartPtr chart = config::make_chart(j.at("chart"));
    const Vector p = config::parse_vector(j.at("p"), "canonical config p");
    const Vector q = config::parse_vector(j.at("q"), "canonical config q");
    const double s1 = j.value("s1", 0.25), s2 = j.value("s2", 0.75);
    const int steps = j.value("steps", 256);
    if (p.size() != chart->dim() || q.size() != chart->dim())
        throw ConstructionError("canonical config: point dimension does not match the chart");
    if (!(0 <= s1 && s1 < s2 && s2 <= 1))
        throw ConstructionError("canonical config: need 0 <= s1 < s2 <= 1");

    ordered_json payload;
    payload["chart"] = chart->name();
    payload["divergence"] = report::format_double(canon::ay_amari_divergence(*chart, p, q, steps));
    payload["endpoint_energy"] = report::format_double(canon::h_function(*chart, p, q, steps));
    payload["restriction_gap"] = report::format_double(
        canon::ay_amari_restriction_check(*chart, p, q, s1, s2, steps));
    payload["c_divergence"] = report::format_double(graph::c_divergence(*chart, p, q));
    emit(payload, out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-Riemannian transport geometry toolkit"};
    app.require_subcommand(1);

    VerifyCli vcli;
    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--config", vcli.config_path, "JSON configuration file");
    verify->add_option("--out", vcli.out_path, "report output path");
    vcli.seed_opt = verify->add_option("--seed", vcli.seed, "random seed");
    vcli.tol_opt = verify->add_option("--tol-scale", vcli.tol_scale, "tolerance multiplier");
    vcli.jobs_opt = verify->add_option("--jobs", vcli.jobs, "worker threads");
    verify->add_option("--section", vcli.sections, "run only the named sections");

    std::string eval_config, eval_out;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a cost at a product point");
    eval->add_option("--config", eval_config, "JSON configuration file")->required();
    eval->add_option("--out", eval_out, "JSON output path (default stdout)");

    std::string geo_config, geo_out;
    CLI::App* geodesic = app.add_subcommand("geodesic", "integrate a chart geodesic");
    geodesic->add_option("--config", geo_config, "JSON configuration file")->required();
    geodesic->add_option("--out", geo_out, "CSV output path");

    std::string sink_config, sink_out;
    CLI::App* sinkhorn = app.add_subcommand("sinkhorn", "solve an entropic transport problem");
    sinkhorn->add_option("--config", sink_config, "JSON configuration file")->required();
    sinkhorn->add_option("--out", sink_out, "coupling CSV output path");

    std::string canon_config, canon_out;
    CLI::App* canonical = app.add_subcommand("canonical", "geodesic-integral divergence");
    canonical->add_option("--config", canon_config, "JSON configuration file")->required();
    canonical->add_option("--out", canon_out, "JSON output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return run_verify_cmd(vcli);
        if (eval->parsed()) return run_eval_cmd(eval_config, eval_out);
        if (geodesic->parsed()) return run_geodesic_cmd(geo_config, geo_out);
        if (sinkhorn->parsed()) return run_sinkhorn_cmd(sink_config, sink_out);
        if (canonical->parsed()) return run_canonical_cmd(canon_config, canon_out);
    } catch (const ConstructionError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
