#pragma once

// The full verification suite: twelve sections, each exercising one block of
// the acceptance surface with fixed tolerances (scalable through one knob).
// Sections draw randomness from section-local generators seeded by (seed,
// section name), so results are independent of scheduling and job count;
// entries are assembled in declaration order for byte-stable reports.

#include "otgeom/canonical.hpp"
#include "otgeom/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace otgeom::suite {

struct SuiteOptions {
    std::uint64_t seed = 20260822;
    double tol_scale = 1.0;
    int jobs = 1;
    std::vector<std::string> sections;  // empty = all
    double entropic_lambda = 1.0;
};

using Entries = std::vector<report::CheckEntry>;

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct SectionContext {
    SuiteOptions opt;
    Rng rng;
    Entries entries;

    explicit SectionContext(const SuiteOptions& o, const std::string& section)
        : opt(o), rng(o.seed ^ fnv1a64(section)) {}

    // Residual-style check: passes when computed <= tol * tol_scale.
    void residual(std::string name, std::string identity, double computed, double tol,
                  std::string detail = "") {
        const double t = tol * opt.tol_scale;
        entries.push_back({std::move(name), std::move(identity), computed, 0.0, t,
                           computed <= t, std::move(detail)});
    }

    // Pinned-value check: passes when |computed - reference| <= tol * tol_scale.
    void pinned(std::string name, std::string identity, double computed, double reference,
                double tol, std::string detail = "") {
        const double t = tol * opt.tol_scale;
        entries.push_back({std::move(name), std::move(identity), computed, reference, t,
                           std::abs(computed - reference) <= t, std::move(detail)});
    }

    // Exact count check: passes only when the count is zero; never scaled.
    void count(std::string name, std::string identity, int bad, std::string detail = "") {
        entries.push_back({std::move(name), std::move(identity), static_cast<double>(bad), 0.0,
                           0.0, bad == 0, std::move(detail)});
    }
};

// ---------------------------------------------------------------------------
// Shared case lists
// ---------------------------------------------------------------------------

struct CostCase {
    std::string tag;
    cost::CostPtr c;
    std::function<Vector(Rng&)> sample_xi;
    std::function<Vector(Rng&)> sample_eta;
};

inline std::function<Vector(Rng&)> box_sampler(int n, double lo, double hi) {
    return [n, lo, hi](Rng& r) { return r.uniform_vector(n, lo, hi); };
}

inline std::function<Vector(Rng&)> simplex_sampler(int states, double margin) {
    return [states, margin](Rng& r) {
        return cost::simplex_chart(r.simplex_interior(states, margin));
    };
}

inline std::string fmt_alpha(double a) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2g", a);
    return buf;
}

inline std::vector<CostCase> signature_cost_cases(double entropic_lambda) {
    std::vector<CostCase> cases;
    for (int n = 1; n <= 3; ++n)
        cases.push_back({"quadratic-n" + std::to_string(n), cost::quadratic_cost(n),
                         box_sampler(n, -2, 2), box_sampler(n, -2, 2)});
    for (double a : {0.5, 1.0, 2.0})
        for (int n = 1; n <= 3; ++n)
            cases.push_back({"log-n" + std::to_string(n) + "-a" + fmt_alpha(a),
                             cost::log_cost(n, a), box_sampler(n, 0.3, 2.5),
                             box_sampler(n, 0.3, 2.5)});
    for (int n : {1, 2}) {
        cases.push_back({"cosh-n" + std::to_string(n),
                         cost::convex_translation_cost(n, std::make_shared<cost::CoshField>()),
                         box_sampler(n, -1.5, 1.5), box_sampler(n, -1.5, 1.5)});
        cases.push_back(
            {"quartic-n" + std::to_string(n),
             cost::convex_translation_cost(n, std::make_shared<cost::QuarticField>()),
             box_sampler(n, -1.5, 1.5), box_sampler(n, -1.5, 1.5)});
    }
    cases.push_back({"entropic-3state",
                     cost::entropic_cost(graph::default_entropic_problem(entropic_lambda)),
                     simplex_sampler(3, 0.05), simplex_sampler(3, 0.05)});
    return cases;
}

struct ChartCase {
    std::string tag;
    graph::ChartPtr chart;
    bool entropic = false;
};

inline std::vector<ChartCase> chart_cases(double entropic_lambda) {
    std::vector<ChartCase> cases;
    const char* tags[] = {"quadratic-identity", "quadratic-spd", "quadratic-lse", "log-n1",
                          "log-n2"};
    auto charts = graph::builtin_charts();
    for (size_t i = 0; i < charts.size(); ++i) cases.push_back({tags[i], charts[i], false});
    cases.push_back({"entropic", graph::entropic_chart(entropic_lambda), true});
    return cases;
}

// ---------------------------------------------------------------------------
// Sections
// ---------------------------------------------------------------------------

// 1. Signature (n, n) of the split metric across every cost family.
inline void section_signature(SectionContext& cx) {
    for (const auto& cc : signature_cost_cases(cx.opt.entropic_lambda)) {
        const int n = cc.c->dim();
        int bad = 0;
        for (int s = 0; s < 50; ++s) {
            const Vector xi = cc.sample_xi(cx.rng), eta = cc.sample_eta(cx.rng);
            const auto sig = product::metric_signature(*cc.c, xi, eta);
            if (sig.first != n || sig.second != n) ++bad;
        }
        cx.count("signature/" + cc.tag, "split metric has signature (n,n)", bad,
                 "50 sampled point pairs");
    }
}

// 2. Pullback of the split metric along the graph equals the divergence
//    metric obtained by finite differences of D alone.
inline void section_metric_restriction(SectionContext& cx) {
    for (const auto& ch : chart_cases(cx.opt.entropic_lambda)) {
        const int n = ch.chart->dim();
        const double tol = ch.entropic ? 1e-5 : 1e-8;
        const dual::DivergenceFn D = [&ch](const Vector& a, const Vector& b) {
            return graph::c_divergence(*ch.chart, a, b);
        };
        double worst = 0;
        for (int s = 0; s < 50; ++s) {
            const Vector p = ch.chart->sample_primal(cx.rng);
            const Matrix g_fd = dual::eguchi_metric(D, n, p, {1e-3, 1});
            for (int k = 0; k < 10; ++k) {
                const Vector u = cx.rng.direction(n), v = cx.rng.direction(n);
                worst = std::max(worst,
                                 dual::metric_restriction_check(*ch.chart, p, u, v, g_fd));
            }
        }
        cx.residual("metric-restriction/" + ch.tag,
                    "lifted split metric equals divergence metric", worst, tol,
                    "50 points x 10 tangent pairs");
    }
}

// 3. Divergence identities: symmetrization to the four-point function,
//    the three-point law, nonnegativity, vanishing on the diagonal.
inline void section_divergence_identities(SectionContext& cx) {
    for (const auto& ch : chart_cases(cx.opt.entropic_lambda)) {
        const double tol = ch.entropic ? 1e-6 : 1e-10;
        double worst_sym = 0, worst_three = 0, worst_diag = 0;
        double min_value = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 200; ++s) {
            const Vector p = ch.chart->sample_primal(cx.rng);
            const Vector pp = ch.chart->sample_primal(cx.rng);
            const Vector ps = ch.chart->sample_primal(cx.rng);
            worst_sym = std::max(worst_sym, graph::symmetrization_identity(*ch.chart, p, pp));
            worst_three =
                std::max(worst_three, graph::three_point_identity(*ch.chart, p, pp, ps));
            min_value = std::min(min_value, graph::c_divergence(*ch.chart, p, pp));
            if (s % 10 == 0)
                worst_diag = std::max(worst_diag, std::abs(graph::c_divergence(*ch.chart, p, p)));
        }
        cx.residual("symmetrization/" + ch.tag,
                    "D[p:p'] + D[p':p] equals the four-point function", worst_sym, tol,
                    "200 tuples");
        cx.residual("three-point/" + ch.tag, "generalized cosine law", worst_three, tol,
                    "200 tuples");
        cx.residual("nonnegativity/" + ch.tag, "D >= 0", std::max(0.0, -min_value),
                    ch.entropic ? 1e-9 : 1e-12);
        cx.residual("diagonal/" + ch.tag, "D[p:p] = 0", worst_diag,
                    ch.entropic ? 1e-8 : 1e-12);
    }
}

// 4. Conjugate connections: duality against the metric derivative, and the
//    product connection decomposing into the pair along the graph.
inline void section_duality(SectionContext& cx) {
    for (const auto& ch : chart_cases(cx.opt.entropic_lambda)) {
        if (ch.tag != "log-n1" && ch.tag != "log-n2") continue;
        double worst_dual = 0, worst_primal = 0, worst_decomp = 0;
        for (int s = 0; s < 20; ++s) {
            const Vector p = ch.chart->sample_primal(cx.rng);
            worst_dual = std::max(worst_dual, dual::duality_check(*ch.chart, p));
            const dual::DecompositionReport rep = dual::decomposition_check(*ch.chart, p);
            worst_primal = std::max(worst_primal, rep.primal_gap);
            worst_decomp = std::max(worst_decomp, rep.dual_gap);
        }
        cx.residual("duality/" + ch.tag, "dg = Gamma + Gamma* (conjugate connections)",
                    worst_dual, 1e-5, "20 points");
        cx.residual("decomposition-primal/" + ch.tag,
                    "product connection restricts to primal connection", worst_primal, 1e-12);
        cx.residual("decomposition-dual/" + ch.tag,
                    "product connection restricts to pushed dual connection", worst_decomp,
                    1e-8, "20 points");
    }
}

// 5. Curvature, two independent pipelines: closed form vs finite differences
//    of the symbols on the product, and pullback vs direct on the base.
inline void section_curvature_pipelines(SectionContext& cx) {
    std::vector<CostCase> cases;
    cases.push_back({"quadratic-n2", cost::quadratic_cost(2), box_sampler(2, -1, 1),
                     box_sampler(2, -1, 1)});
    cases.push_back({"log-n1-a1", cost::log_cost(1, 1.0), box_sampler(1, 0.5, 2),
                     box_sampler(1, 0.5, 2)});
    cases.push_back({"log-n2-a1", cost::log_cost(2, 1.0), box_sampler(2, 0.5, 2),
                     box_sampler(2, 0.5, 2)});
    cases.push_back({"log-n2-a0.5", cost::log_cost(2, 0.5), box_sampler(2, 0.5, 2),
                     box_sampler(2, 0.5, 2)});
    cases.push_back({"cosh-n1",
                     cost::convex_translation_cost(1, std::make_shared<cost::CoshField>()),
                     box_sampler(1, -1.2, 1.2), box_sampler(1, -1.2, 1.2)});
    cases.push_back({"cosh-n2",
                     cost::convex_translation_cost(2, std::make_shared<cost::CoshField>()),
                     box_sampler(2, -1.2, 1.2), box_sampler(2, -1.2, 1.2)});
    for (const auto& cc : cases) {
        double worst = 0;
        for (int s = 0; s < 5; ++s)
            worst = std::max(worst, product::curvature_cross_check(
                                        *cc.c, cc.sample_xi(cx.rng), cc.sample_eta(cx.rng)));
        cx.residual("curvature-product/" + cc.tag,
                    "closed-form curvature equals symbol-derivative curvature", worst, 1e-4,
                    "5 points, all components");
    }
    for (const auto& ch : chart_cases(cx.opt.entropic_lambda)) {
        if (ch.entropic || ch.tag == "quadratic-identity") continue;
        double worst = 0;
        for (int s = 0; s < 5; ++s) {
            const Vector p = ch.chart->sample_primal(cx.rng);
            worst = std::max(worst, dual::max_component_gap(dual::curvature_pullback(*ch.chart, p),
                                                            dual::curvature_direct(*ch.chart, p)));
        }
        cx.residual("curvature-base/" + ch.tag,
                    "pulled-back curvature equals direct connection curvature", worst, 1e-4,
                    "5 points, all components");
    }
}

// 6. Averaging: product sectional curvature on lifted tangents is the mean
//    of the primal and dual base curvatures.
inline void section_averaging(SectionContext& cx) {
    const auto chart = std::make_shared<graph::LogChart>(2, 1.0, 1.0 / 3.0, 0.0);
    double worst = 0;
    for (int s = 0; s < 20; ++s) {
        const Vector p = chart->sample_primal(cx.rng);
        for (int k = 0; k < 10; ++k)
            worst = std::max(worst, dual::averaging_check(*chart, p, cx.rng.direction(2),
                                                          cx.rng.direction(2)));
    }
    cx.residual("averaging/log-n2", "sec_bar = (sec + sec*) / 2 on lifted tangents", worst,
                1e-5, "20 points x 10 tangent pairs");
}

// 7. Constancy of cross curvature for the log family (constant -4 alpha),
//    flatness for the quadratic cost, constant -alpha base curvature.
inline void section_constancy(SectionContext& cx) {
    for (double a : {0.5, 1.0, 2.0})
        for (int n = 1; n <= 3; ++n) {
            const cost::CostPtr c = cost::log_cost(n, a);
            double worst = 0;
            for (int s = 0; s < 30; ++s) {
                const Vector xi = cx.rng.uniform_vector(n, 0.3, 2.5);
                const Vector eta = cx.rng.uniform_vector(n, 0.3, 2.5);
                const Matrix A = c->mixed_matrix(xi, eta);
                Vector u = cx.rng.direction(n), v = cx.rng.direction(n);
                double h = -0.5 * u.dot(A * v);
                for (int tries = 0; std::abs(h) < 1e-2 && tries < 50; ++tries) {
                    v = cx.rng.direction(n);
                    h = -0.5 * u.dot(A * v);
                }
                const Rank4Coefficients S = product::curvature_canonical(*c, xi, eta);
                const double sec = product::unnormalized_sec_bar(S, graph::iota_primal(u),
                                                                 graph::iota_dual(v));
                worst = std::max(worst, std::abs(-sec / (h * h) - (-4.0 * a)));
            }
            cx.residual("cross-constancy/log-n" + std::to_string(n) + "-a" + fmt_alpha(a),
                        "cross curvature constant equals -4 alpha", worst, 1e-6, "30 samples");
        }
    {
        const cost::CostPtr c = cost::quadratic_cost(2);
        double worst = 0;
        for (int s = 0; s < 30; ++s) {
            const Rank4Coefficients S = product::curvature_canonical(
                *c, cx.rng.uniform_vector(2, -2, 2), cx.rng.uniform_vector(2, -2, 2));
            worst = std::max(worst,
                             std::abs(product::unnormalized_sec_bar(
                                 S, graph::iota_primal(cx.rng.direction(2)),
                                 graph::iota_dual(cx.rng.direction(2)))));
        }
        cx.residual("cross-constancy/quadratic-n2", "quadratic cost is cross-flat", worst,
                    1e-10, "30 samples");
    }
    // Base sectional curvature of log charts is the constant -alpha.
    for (double a : {1.0, 0.5}) {
        const auto chart = std::make_shared<graph::LogChart>(2, a, 1.0 / 3.0, 0.0);
        double worst = 0;
        for (int s = 0; s < 20; ++s) {
            const Vector p = chart->sample_primal(cx.rng);
            const Rank4Coefficients R = dual::curvature_pullback(*chart, p);
            const Matrix g = dual::metric_g(*chart, p);
            Vector X = cx.rng.direction(2), Y = cx.rng.direction(2);
            double denom = X.dot(g * X) * Y.dot(g * Y) - std::pow(X.dot(g * Y), 2);
            for (int tries = 0; denom < 1e-6 && tries < 50; ++tries) {
                Y = cx.rng.direction(2);
                denom = X.dot(g * X) * Y.dot(g * Y) - std::pow(X.dot(g * Y), 2);
            }
            worst = std::max(worst, std::abs(dual::sec_u(R, X, Y) / denom - (-a)));
        }
        cx.residual("base-constancy/log-n2-a" + fmt_alpha(a),
                    "base sectional curvature equals -alpha", worst, 1e-6, "20 points");
    }
    {
        const auto chart = std::make_shared<graph::LogChart>(2, 1.0, 1.0 / 3.0, 0.0);
        const Vector p = Vector::Constant(2, 1.0);
        const Rank4Coefficients R = dual::curvature_pullback(*chart, p);
        cx.pinned("base-curvature-pin/log-n2", "R(1,2,2,1) at the unit point", R(0, 1, 1, 0),
                  -1.0 / 27.0, 1e-6);
    }
}

// 8. Transport regularity quantity: zero for the quadratic cost, zero on
//    null pairs for the log family, positive otherwise, pinned value.
inline void section_regularity(SectionContext& cx) {
    {
        const cost::CostPtr c = cost::quadratic_cost(2);
        double worst = 0;
        for (int s = 0; s < 50; ++s) {
            const Rank4Coefficients S = product::curvature_canonical(
                *c, cx.rng.uniform_vector(2, -2, 2), cx.rng.uniform_vector(2, -2, 2));
            worst = std::max(worst, std::abs(product::mtw_tensor(S, cx.rng.direction(2),
                                                                 cx.rng.direction(2))));
        }
        cx.residual("regularity/quadratic-n2", "regularity tensor vanishes identically", worst,
                    1e-12, "50 samples");
    }
    for (double a : {0.5, 1.0, 2.0})
        for (int n : {2, 3}) {
            const cost::CostPtr c = cost::log_cost(n, a);
            double worst = 0;
            for (int s = 0; s < 200; ++s) {
                const Vector xi = cx.rng.uniform_vector(n, 0.3, 2.5);
                const Vector eta = cx.rng.uniform_vector(n, 0.3, 2.5);
                const Vector u = cx.rng.direction(n);
                const Vector v = product::null_dual_direction(*c, xi, eta, u, cx.rng);
                const Rank4Coefficients S = product::curvature_canonical(*c, xi, eta);
                worst = std::max(worst, std::abs(product::mtw_tensor(S, u, v)));
            }
            cx.residual("regularity-null/log-n" + std::to_string(n) + "-a" + fmt_alpha(a),
                        "regularity tensor vanishes on null pairs", worst, 1e-8,
                        "200 null samples");
        }
    {
        const cost::CostPtr c = cost::log_cost(2, 1.0);
        double min_val = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 100; ++s) {
            const Rank4Coefficients S = product::curvature_canonical(
                *c, cx.rng.uniform_vector(2, 0.3, 2.5), cx.rng.uniform_vector(2, 0.3, 2.5));
            min_val = std::min(min_val, product::mtw_tensor(S, cx.rng.direction(2),
                                                            cx.rng.direction(2)));
        }
        cx.residual("regularity-sign/log-n2-a1", "regularity tensor is nonnegative",
                    std::max(0.0, -min_val), 1e-12, "100 samples");
    }
    {
        const cost::CostPtr c = cost::log_cost(1, 1.0);
        const Vector one = Vector::Constant(1, 1.0);
        const Rank4Coefficients S = product::curvature_canonical(*c, one, one);
        cx.pinned("regularity-pin/log-n1", "regularity value at the unit configuration",
                  product::mtw_tensor(S, one, one), 0.125, 1e-6);
    }
}

// 9. Fourth-derivative identity along split geodesics, with the corollary
//    for the log family and the divergence route to the regularity value.
inline void section_fourth_derivative(SectionContext& cx) {
    struct F4 {
        std::string tag;
        cost::CostPtr c;
        Vector xi, eta, u, v;
        bool quadratic;
        double alpha;  // log family only, else 0
    };
    const auto vec = [](std::initializer_list<double> v) {
        Vector out(static_cast<int>(v.size()));
        int i = 0;
        for (double x : v) out[i++] = x;
        return out;
    };
    std::vector<F4> cases;
    cases.push_back({"quadratic-n1", cost::quadratic_cost(1), vec({0.3}), vec({-0.2}),
                     vec({1.0}), vec({1.0}), true, 0});
    cases.push_back({"quadratic-n2", cost::quadratic_cost(2), vec({0.3, -0.1}),
                     vec({0.2, 0.4}), vec({0.8, 0.6}), vec({0.6, -0.8}), true, 0});
    cases.push_back({"log-n1-unit", cost::log_cost(1, 1.0), vec({1.0}), vec({1.0}),
                     vec({1.0}), vec({1.0}), false, 1.0});
    cases.push_back({"log-n1-offset", cost::log_cost(1, 1.0), vec({1.3}), vec({0.8}),
                     vec({1.0}), vec({1.0}), false, 1.0});
    cases.push_back({"log-n2-a1", cost::log_cost(2, 1.0), vec({1.0, 1.2}), vec({0.9, 1.1}),
                     vec({0.8, 0.3}), vec({0.5, -0.9}), false, 1.0});
    cases.push_back({"log-n2-a0.5", cost::log_cost(2, 0.5), vec({1.0, 1.2}), vec({0.9, 1.1}),
                     vec({0.8, 0.3}), vec({0.5, -0.9}), false, 0.5});
    cases.push_back({"log-n2-a2", cost::log_cost(2, 2.0), vec({1.0, 1.2}), vec({0.9, 1.1}),
                     vec({0.6, 0.2}), vec({0.4, -0.7}), false, 2.0});
    cases.push_back({"log-n3-a1", cost::log_cost(3, 1.0), vec({1.0, 1.2, 0.8}),
                     vec({0.9, 1.1, 1.0}), vec({0.6, 0.3, -0.4}), vec({0.5, -0.2, 0.7}), false,
                     1.0});
    cases.push_back({"cosh-n1", cost::convex_translation_cost(1, std::make_shared<cost::CoshField>()),
                     vec({0.4}), vec({-0.1}), vec({1.0}), vec({1.0}), false, 0});
    cases.push_back({"cosh-n2", cost::convex_translation_cost(2, std::make_shared<cost::CoshField>()),
                     vec({0.4, -0.3}), vec({-0.1, 0.2}), vec({0.7, -0.4}), vec({0.3, 0.8}),
                     false, 0});
    for (const auto& f : cases) {
        const geo::FourthDerivativeReport rep =
            geo::fourth_derivative_check(*f.c, f.xi, f.eta, f.u, f.v);
        const double tol =
            f.quadratic ? 1e-6 : std::max(1e-3, 0.01 * std::abs(rep.rhs));
        cx.residual("fourth-derivative/" + f.tag,
                    "mixed fourth derivative of the four-point function equals -2 sec_bar",
                    rep.gap, tol);
        if (f.alpha > 0) {
            const geo::CorollaryReport cor =
                geo::log_corollary_check(*f.c, f.alpha, f.xi, f.eta, f.u, f.v);
            cx.residual("fourth-derivative-corollary/" + f.tag,
                        "fourth derivative equals -2 alpha times squared pairing", cor.gap,
                        1e-3);
        }
        if (f.tag == "log-n1-unit") {
            cx.pinned("fourth-derivative-pin/lhs", "stencil value at the unit configuration",
                      rep.lhs, -0.125, 1e-3);
            cx.pinned("fourth-derivative-pin/regularity", "divergence route to regularity",
                      rep.mtw_divergence, 0.125, 1e-3);
            const geo::CorollaryReport cor =
                geo::log_corollary_check(*f.c, 1.0, f.xi, f.eta, f.u, f.v);
            cx.pinned("fourth-derivative-pin/pairing", "split metric pairing", cor.pairing,
                      -0.25, 1e-6);
        }
    }
}

// 10. Canonical divergences: geodesic-integral divergence against closed
//     forms and Eguchi structure; reconstruction of a divergence from its
//     mixed-derivative field; four-point preservation under wrapping.
inline void section_canonical(SectionContext& cx) {
    const auto charts = graph::builtin_charts();
    const graph::ChartPtr euclid = charts[0], spd = charts[1], log1 = charts[3],
                          log2 = charts[4];
    {
        double worst_d = 0, worst_h = 0;
        for (int s = 0; s < 10; ++s) {
            const Vector p = euclid->sample_primal(cx.rng), q = euclid->sample_primal(cx.rng);
            worst_d = std::max(worst_d, std::abs(canon::ay_amari_divergence(*euclid, p, q, 128,
                                                                            16) -
                                                 0.5 * (q - p).squaredNorm()));
            if (s < 5)
                worst_h = std::max(worst_h, std::abs(canon::h_function(*euclid, p, q, 128) -
                                                     (q - p).squaredNorm()));
        }
        cx.residual("canonical/euclidean-divergence",
                    "geodesic-integral divergence equals half squared distance", worst_d, 1e-10,
                    "10 pairs");
        cx.residual("canonical/euclidean-endpoint", "endpoint energy equals squared distance",
                    worst_h, 1e-10, "5 pairs");
    }
    {
        const Matrix A = graph::default_spd_matrix();
        double worst = 0;
        for (int s = 0; s < 3; ++s) {
            const Vector p = spd->sample_primal(cx.rng);
            const dual::DivergenceFn D = [&](const Vector& a, const Vector& b) {
                return canon::ay_amari_divergence(*spd, a, b, 128, 16);
            };
            worst = std::max(worst,
                             (dual::eguchi_metric(D, 2, p, {5e-3, 1}) - A).cwiseAbs().maxCoeff());
        }
        cx.residual("canonical/spd-metric", "divergence metric recovers the quadratic form",
                    worst, 1e-4, "3 points");
    }
    {
        double worst_g = 0, worst_gamma = 0, worst_gamma_star = 0;
        for (double p0 : {0.8, 1.0, 1.6}) {
            const canon::AyAmariStructureReport rep =
                canon::ay_amari_structure_check(*log1, Vector::Constant(1, p0), 256);
            worst_g = std::max(worst_g, rep.metric_gap);
            worst_gamma = std::max(worst_gamma, rep.primal_gap);
            worst_gamma_star = std::max(worst_gamma_star, rep.dual_gap);
        }
        cx.residual("canonical/log-n1-metric", "divergence metric recovers g", worst_g, 1e-3,
                    "3 points");
        cx.residual("canonical/log-n1-primal", "divergence primal connection recovers Gamma",
                    worst_gamma, 1e-3);
        cx.residual("canonical/log-n1-dual", "divergence dual connection recovers Gamma*",
                    worst_gamma_star, 1e-3);
    }
    {
        const canon::AyAmariStructureReport rep =
            canon::ay_amari_structure_check(*log2, Vector::Constant(2, 1.1), 256);
        cx.residual("canonical/log-n2-metric", "divergence metric recovers g", rep.metric_gap,
                    1e-3, "1 point");
        cx.residual("canonical/log-n2-connections",
                    "divergence connections recover the conjugate pair",
                    std::max(rep.primal_gap, rep.dual_gap), 2e-3);
    }
    {
        // Wrapped log-chart divergence with its exact mixed derivative.
        const cost::PartialPairFn hook = [](const Vector& x, const Vector& y,
                                            std::span<const int> pr, std::span<const int> du) {
            if (pr.size() != 1 || du.size() != 1)
                throw DomainError("wrapped log divergence: only the mixed block is exact");
            const double s = x[0] + y[0];
            return -1.0 / (s * s);
        };
        const graph::ChartPtr held = log1;
        const cost::CostPtr wrapped = canon::wrap_cost_as_divergence(
            held, Vector::Constant(1, 0.5), Vector::Constant(1, 4.5), 5, hook);
        const Vector x = Vector::Constant(1, 1.0), y = Vector::Constant(1, 4.0);
        const double recovered = canon::recover_cost_from_metric(*wrapped, x, y, 32);
        cx.pinned("canonical/recover-pin", "triangle integral recovers the divergence value",
                  recovered, std::log(1.25), 1e-6);
        cx.residual("canonical/recover-direct",
                    "triangle integral matches the wrapped value",
                    std::abs(recovered - wrapped->value(x, y)), 1e-9);
        double worst = 0;
        for (int s = 0; s < 20; ++s) {
            const auto draw = [&] { return cx.rng.uniform_vector(1, 0.6, 4.0); };
            worst = std::max(worst, canon::delta_preservation_check(*held, *wrapped, draw(),
                                                                    draw(), draw(), draw()));
        }
        cx.residual("canonical/delta-preservation",
                    "wrapping preserves the four-point function", worst, 1e-10, "20 tuples");
    }
    {
        const Vector p = Vector::Constant(1, 1.0), q = Vector::Constant(1, 2.0);
        double worst = 0;
        const std::vector<std::pair<double, double>> windows = {
            {0.2, 0.8}, {0.05, 0.95}, {0.3, 0.6}};
        for (const auto& [s1, s2] : windows)
            worst = std::max(worst, canon::ay_amari_restriction_check(*log1, p, q, s1, s2, 256));
        cx.residual("canonical/restriction", "divergence restricts along its own geodesic",
                    worst, 1e-6, "3 windows");
        cx.residual("canonical/endpoint-consistency",
                    "mixed endpoint derivative equals endpoint energy",
                    canon::h_function_consistency(*log1, p, q), 1e-3);
    }
}

// 11. Entropic block: value nonnegativity and diagonal, marginal accuracy,
//     a brute-force two-state oracle, and the shrinkage map.
inline void section_entropic(SectionContext& cx) {
    const cost::EntropicProblem prob3 = graph::default_entropic_problem(cx.opt.entropic_lambda);
    {
        double min_val = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 100; ++s) {
            const Vector p = cx.rng.simplex_interior(3, 0.02);
            const Vector pp = cx.rng.simplex_interior(3, 0.02);
            min_val = std::min(min_val, cost::d_lambda(prob3, p, pp));
        }
        cx.residual("entropic/nonnegativity", "D_lambda >= 0", std::max(0.0, -min_val), 1e-9,
                    "100 pairs");
    }
    {
        double worst = 0;
        for (int s = 0; s < 20; ++s) {
            const Vector p = cx.rng.simplex_interior(3, 0.02);
            worst = std::max(worst, std::abs(cost::d_lambda(prob3, p, p)));
        }
        cx.residual("entropic/diagonal", "D_lambda[p:p] = 0", worst, 1e-8, "20 points");
    }
    {
        double worst = 0;
        for (int s = 0; s < 10; ++s) {
            const Vector p = cx.rng.simplex_interior(3, 0.02);
            const Vector q = cx.rng.simplex_interior(3, 0.02);
            const cost::SinkhornResult r = cost::sinkhorn_c_lambda(prob3, p, q);
            worst = std::max(worst, (r.coupling.pi.rowwise().sum() - p).cwiseAbs().maxCoeff());
            worst = std::max(
                worst, (r.coupling.pi.colwise().sum().transpose() - q).cwiseAbs().maxCoeff());
        }
        cx.residual("entropic/marginals", "optimal coupling matches both marginals", worst,
                    1e-12, "10 pairs");
    }
    {
        // Two states: the coupling has one free parameter; scan + refine.
        Matrix C2(2, 2);
        C2 << 0, 1, 1, 0;
        double worst = 0;
        for (double lam : {0.5, 1.0}) {
            const cost::EntropicProblem prob2(C2, lam, 1e-13, 100000);
            for (int s = 0; s < 10; ++s) {
                const Vector p = cx.rng.simplex_interior(2, 0.05);
                const Vector q = cx.rng.simplex_interior(2, 0.05);
                const auto plogp = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
                const auto obj = [&](double a) {
                    const double b = p[0] - a, c = q[0] - a, d = 1 - p[0] - q[0] + a;
                    return (b + c) * 1.0 +
                           lam * (plogp(a) + plogp(b) + plogp(c) + plogp(d));
                };
                double lo = std::max(0.0, p[0] + q[0] - 1), hi = std::min(p[0], q[0]);
                double best = lo;
                double best_val = std::numeric_limits<double>::infinity();
                for (int k = 0; k <= 4000; ++k) {
                    const double a = lo + (hi - lo) * k / 4000.0;
                    const double v = obj(a);
                    if (v < best_val) {
                        best_val = v;
                        best = a;
                    }
                }
                double gl = std::max(lo, best - (hi - lo) / 4000.0);
                double gr = std::min(hi, best + (hi - lo) / 4000.0);
                for (int k = 0; k < 200; ++k) {
                    const double m1 = gl + 0.381966011 * (gr - gl);
                    const double m2 = gr - 0.381966011 * (gr - gl);
                    if (obj(m1) < obj(m2)) gr = m2;
                    else gl = m1;
                }
                const double brute = obj(0.5 * (gl + gr));
                const double solver = cost::sinkhorn_c_lambda(prob2, p, q).value;
                worst = std::max(worst, std::abs(solver - brute));
            }
        }
        cx.residual("entropic/two-state-oracle", "solver value matches grid minimization",
                    worst, 1e-4, "10 pairs x 2 lambdas");
    }
    {
        double worst = 0;
        for (int s = 0; s < 5; ++s) {
            const Vector p = cx.rng.simplex_interior(3, 0.05);
            const Vector mirror = cost::shrinkage_map(prob3, p, 1e-9);
            const Vector closed = cost::shrinkage_closed_form(prob3, p);
            worst = std::max(worst, (mirror - closed).cwiseAbs().maxCoeff());
        }
        cx.residual("entropic/shrinkage-agreement",
                    "mirror-descent minimizer matches the linear closed form", worst, 1e-6,
                    "5 points");
    }
    {
        Matrix C0 = Matrix::Zero(3, 3);
        const cost::EntropicProblem prob0(C0, 1.0, 1e-13, 100000);
        const Vector p = cx.rng.simplex_interior(3, 0.1);
        const Vector q = cost::shrinkage_map(prob0, p, 1e-10);
        cx.residual("entropic/zero-cost-uniform",
                    "free marginal under zero cost is uniform",
                    (q - Vector::Constant(3, 1.0 / 3)).cwiseAbs().maxCoeff(), 1e-8);
    }
    {
        Matrix Cm = Matrix::Constant(3, 3, 1.0);
        Cm.diagonal().setZero();
        const cost::EntropicProblem probm(Cm, 5e-3, 1e-13, 100000);
        const Vector p = cx.rng.simplex_interior(3, 0.1);
        cx.residual("entropic/small-lambda-identity",
                    "shrinkage approaches the identity as lambda shrinks",
                    (cost::shrinkage_closed_form(probm, p) - p).cwiseAbs().maxCoeff(), 1e-8);
    }
}

// 12. Determinism: a representative random-sampling section re-run under
//     the same seed serializes to identical bytes.
inline void section_determinism(SectionContext& cx) {
    const auto run_once = [&] {
        SectionContext probe(cx.opt, "signature");
        section_signature(probe);
        report::Report r;
        r.seed = cx.opt.seed;
        r.tol_scale = cx.opt.tol_scale;
        r.entries = std::move(probe.entries);
        return report::to_json(r).dump();
    };
    const std::string a = run_once(), b = run_once();
    cx.count("determinism/replay", "identical seed yields byte-identical results",
             a == b ? 0 : 1);
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

struct Section {
    std::string name;
    std::function<void(SectionContext&)> fn;
};

inline const std::vector<Section>& all_sections() {
    static const std::vector<Section> sections = {
        {"signature", section_signature},
        {"metric-restriction", section_metric_restriction},
        {"divergence-identities", section_divergence_identities},
        {"duality", section_duality},
        {"curvature-pipelines", section_curvature_pipelines},
        {"averaging", section_averaging},
        {"constancy", section_constancy},
        {"regularity", section_regularity},
        {"fourth-derivative", section_fourth_derivative},
        {"canonical", section_canonical},
        {"entropic", section_entropic},
        {"determinism", section_determinism},
    };
    return sections;
}

inline std::vector<std::string> section_names() {
    std::vector<std::string> names;
    for (const auto& s : all_sections()) names.push_back(s.name);
    return names;
}

// Runs the requested sections on up to `jobs` threads. Entries are appended
// in section declaration order regardless of scheduling; a section that
// throws contributes a single failing entry instead of aborting the run.
inline report::Report run_verify(const SuiteOptions& opt) {
    std::vector<const Section*> selected;
    for (const auto& s : all_sections()) {
        if (opt.sections.empty() ||
            std::find(opt.sections.begin(), opt.sections.end(), s.name) != opt.sections.end())
            selected.push_back(&s);
    }
    for (const auto& want : opt.sections) {
        bool known = false;
        for (const auto& s : all_sections()) known = known || s.name == want;
        if (!known) throw ConstructionError("unknown section: " + want);
    }

    std::vector<Entries> results(selected.size());
    std::atomic<size_t> next{0};
    const int workers = std::max(1, std::min<int>(opt.jobs, static_cast<int>(selected.size())));
    const auto work = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= selected.size()) return;
            SectionContext cx(opt, selected[i]->name);
            try {
                selected[i]->fn(cx);
            } catch (const std::exception& e) {
                cx.entries.push_back({"section/" + selected[i]->name, "section completed", 1.0,
                                      0.0, 0.0, false, e.what()});
            }
            results[i] = std::move(cx.entries);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    report::Report rep;
    rep.seed = opt.seed;
    rep.tol_scale = opt.tol_scale;
    for (auto& r : results)
        for (auto& e : r) rep.entries.push_back(std::move(e));
    return rep;
}

}  // namespace otgeom::suite
