// Tests for the induced base geometry: metric, conjugate connections,
// divergence-derived (Eguchi) oracles, and the two curvature pipelines.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "otgeom/dualistic.hpp"

using namespace otgeom;
using Catch::Matchers::WithinAbs;

namespace {

graph::LogChart log_chart_n1() { return graph::LogChart(1, 1.0, 0.5, 0.5 * std::log(2.0)); }
graph::LogChart log_chart_n2() { return graph::LogChart(2, 1.0, 1.0 / 3.0, 0.0); }

}  // namespace

TEST_CASE("base metric pins at the unit point", "[dualistic]") {
    const auto c1 = log_chart_n1();
    Vector one1 = Vector::Ones(1);
    const Matrix g1 = dual::metric_g(c1, one1);
    REQUIRE_THAT(g1(0, 0), WithinAbs(0.25, 1e-14));

    const auto c2 = log_chart_n2();
    Vector one2 = Vector::Ones(2);
    const Matrix g2 = dual::metric_g(c2, one2);
    REQUIRE_THAT(g2(0, 0), WithinAbs(2.0 / 9.0, 1e-14));
    REQUIRE_THAT(g2(1, 1), WithinAbs(2.0 / 9.0, 1e-14));
    REQUIRE_THAT(g2(0, 1), WithinAbs(-1.0 / 9.0, 1e-14));
    REQUIRE_THAT(g2(1, 0), WithinAbs(-1.0 / 9.0, 1e-14));
    REQUIRE_THAT(g2.determinant(), WithinAbs(1.0 / 27.0, 1e-14));
}

TEST_CASE("metric is symmetric positive definite on sampled points", "[dualistic]") {
    Rng rng(301);
    for (const auto& chart : graph::builtin_charts()) {
        INFO("chart " << chart->name());
        for (int k = 0; k < 8; ++k) {
            const Vector p = chart->sample_primal(rng);
            const Matrix g = dual::metric_g(*chart, p);
            REQUIRE_THAT((g - g.transpose()).cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-10));
            REQUIRE(num::symmetric_eigenvalues(0.5 * (g + g.transpose())).minCoeff() > 0.0);
        }
    }
}

TEST_CASE("primal and dual metrics are congruent through the chart", "[dualistic]") {
    Rng rng(302);
    const auto c2 = log_chart_n2();
    graph::QuadraticChart spd(graph::spd_generator(graph::default_spd_matrix()));
    const std::vector<const graph::GraphChart*> charts{&c2, &spd};
    for (const auto* chart : charts) {
        INFO("chart " << chart->name());
        for (int k = 0; k < 8; ++k) {
            const Vector p = chart->sample_primal(rng);
            const Matrix J = chart->jacobian(p);
            const Matrix g = dual::metric_g(*chart, p);
            const Matrix gstar = dual::metric_g_dual(*chart, chart->forward(p));
            const Matrix pulled = J.transpose() * gstar * J;
            REQUIRE_THAT((g - pulled).cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-10));
        }
    }
}

TEST_CASE("connection pair is conjugate with respect to the metric", "[dualistic]") {
    Rng rng(303);
    for (const auto& chart : graph::builtin_charts()) {
        INFO("chart " << chart->name());
        for (int k = 0; k < 5; ++k) {
            const Vector p = chart->sample_primal(rng);
            REQUIRE_THAT(dual::duality_check(*chart, p), WithinAbs(0.0, 1e-6));
        }
    }
}

TEST_CASE("conjugacy splits the metric derivative at the unit point", "[dualistic]") {
    // For the one-dimensional log chart at p = 1: d_1 g_11 = -1/2 splits as
    // Gamma_{11,1} + Gamma*_{11,1} = -1/4 + -1/4.
    const auto chart = log_chart_n1();
    Vector one = Vector::Ones(1);
    const Matrix g = dual::metric_g(chart, one);
    const auto gamma_low = dual::lower_with_metric(dual::primal_connection(chart, one), g);
    const auto gamma_star = dual::dual_connection_primal_lower(chart, one);
    REQUIRE_THAT(gamma_low(0, 0, 0), WithinAbs(-0.25, 1e-10));
    REQUIRE_THAT(gamma_star(0, 0, 0), WithinAbs(-0.25, 1e-8));

    const double h = 1e-5;
    Vector hi = one, lo = one;
    hi[0] += h;
    lo[0] -= h;
    const double dg = (dual::metric_g(chart, hi)(0, 0) - dual::metric_g(chart, lo)(0, 0)) /
                      (2.0 * h);
    REQUIRE_THAT(dg, WithinAbs(-0.5, 1e-8));
    REQUIRE_THAT(dg - gamma_low(0, 0, 0) - gamma_star(0, 0, 0), WithinAbs(0.0, 1e-8));
}

TEST_CASE("product connection restricts to the conjugate pair", "[dualistic]") {
    Rng rng(304);
    const auto c2 = log_chart_n2();
    graph::QuadraticChart lse(graph::log_sum_exp_generator(2));
    const std::vector<const graph::GraphChart*> charts{&c2, &lse};
    for (const auto* chart : charts) {
        INFO("chart " << chart->name());
        for (int k = 0; k < 5; ++k) {
            const Vector p = chart->sample_primal(rng);
            const auto report = dual::decomposition_check(*chart, p);
            REQUIRE_THAT(report.primal_gap, WithinAbs(0.0, 1e-10));
            REQUIRE_THAT(report.dual_gap, WithinAbs(0.0, 1e-6));
        }
    }
}

TEST_CASE("divergence-derived metric matches the closed-form metric", "[dualistic]") {
    Rng rng(305);
    const auto c2 = log_chart_n2();
    const dual::DivergenceFn D = [&](const Vector& a, const Vector& b) {
        return graph::c_divergence(c2, a, b);
    };
    for (int k = 0; k < 5; ++k) {
        const Vector p = c2.sample_primal(rng);
        const Matrix ge = dual::eguchi_metric(D, 2, p);
        const Matrix g = dual::metric_g(c2, p);
        REQUIRE_THAT((ge - g).cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-6));
    }
}

TEST_CASE("divergence-derived connections match the closed-form pair", "[dualistic]") {
    Rng rng(306);
    const auto c2 = log_chart_n2();
    const dual::DivergenceFn D = [&](const Vector& a, const Vector& b) {
        return graph::c_divergence(c2, a, b);
    };
    for (int k = 0; k < 3; ++k) {
        const Vector p = c2.sample_primal(rng);
        const Matrix g = dual::metric_g(c2, p);
        const auto gamma_low = dual::lower_with_metric(dual::primal_connection(c2, p), g);
        const auto gamma_star = dual::dual_connection_primal_lower(c2, p);
        const auto e_primal = dual::eguchi_primal_connection(D, 2, p);
        const auto e_dual = dual::eguchi_dual_connection(D, 2, p);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int m = 0; m < 2; ++m) {
                    REQUIRE_THAT(e_primal(i, j, m) - gamma_low(i, j, m),
                                 WithinAbs(0.0, 1e-5));
                    REQUIRE_THAT(e_dual(i, j, m) - gamma_star(i, j, m),
                                 WithinAbs(0.0, 1e-5));
                }
    }
}

TEST_CASE("split metric restricts to the divergence metric on lifted tangents",
          "[dualistic]") {
    Rng rng(307);
    const auto c2 = log_chart_n2();
    const dual::DivergenceFn D = [&](const Vector& a, const Vector& b) {
        return graph::c_divergence(c2, a, b);
    };
    for (int k = 0; k < 5; ++k) {
        const Vector p = c2.sample_primal(rng);
        const Matrix ge = dual::eguchi_metric(D, 2, p);
        const Vector u = rng.uniform_vector(2, -1.0, 1.0);
        const Vector v = rng.uniform_vector(2, -1.0, 1.0);
        REQUIRE_THAT(dual::metric_restriction_check(c2, p, u, v, ge),
                     WithinAbs(0.0, 1e-6));
    }
}

TEST_CASE("base curvature pin at the unit point", "[dualistic]") {
    const auto c2 = log_chart_n2();
    Vector one = Vector::Ones(2);
    const auto R = dual::curvature_pullback(c2, one);
    REQUIRE_THAT(R(0, 1, 1, 0), WithinAbs(-1.0 / 27.0, 1e-12));
    // Antisymmetry in the first pair.
    REQUIRE_THAT(R(1, 0, 1, 0), WithinAbs(1.0 / 27.0, 1e-12));
    REQUIRE_THAT(R(0, 0, 1, 0), WithinAbs(0.0, 1e-12));
}

TEST_CASE("one-dimensional base curvature vanishes identically", "[dualistic]") {
    const auto c1 = log_chart_n1();
    Rng rng(308);
    for (int k = 0; k < 5; ++k) {
        const Vector p = c1.sample_primal(rng);
        const auto R = dual::curvature_pullback(c1, p);
        REQUIRE_THAT(R(0, 0, 0, 0), WithinAbs(0.0, 1e-13));
    }
}

TEST_CASE("direct and pullback curvature pipelines agree", "[dualistic]") {
    Rng rng(309);
    const auto c2 = log_chart_n2();
    graph::QuadraticChart lse(graph::log_sum_exp_generator(2));
    const std::vector<const graph::GraphChart*> charts{&c2, &lse};
    for (const auto* chart : charts) {
        INFO("chart " << chart->name());
        for (int k = 0; k < 3; ++k) {
            const Vector p = chart->sample_primal(rng);
            const auto direct = dual::curvature_direct(*chart, p);
            const auto pulled = dual::curvature_pullback(*chart, p);
            REQUIRE_THAT(dual::max_component_gap(direct, pulled), WithinAbs(0.0, 1e-4));
        }
    }
}

TEST_CASE("log charts have constant negative base sectional curvature", "[dualistic]") {
    Rng rng(310);
    for (const double alpha : {1.0, 0.5}) {
        const graph::LogChart chart(2, alpha, 1.0 / 3.0, 0.0);
        for (int k = 0; k < 8; ++k) {
            const Vector p = chart.sample_primal(rng);
            const Matrix g = dual::metric_g(chart, p);
            const Vector u = rng.direction(2);
            Vector v = rng.direction(2);
            double denom = u.dot(g * u) * v.dot(g * v) - std::pow(u.dot(g * v), 2);
            while (std::abs(denom) < 1e-6) {
                v = rng.direction(2);
                denom = u.dot(g * u) * v.dot(g * v) - std::pow(u.dot(g * v), 2);
            }
            const auto R = dual::curvature_pullback(chart, p);
            const double sec = dual::sec_u(R, u, v) / denom;
            REQUIRE_THAT(sec, WithinAbs(-alpha, 1e-8));
        }
    }
}

TEST_CASE("quadratic charts are flat", "[dualistic]") {
    Rng rng(311);
    graph::QuadraticChart lse(graph::log_sum_exp_generator(2));
    for (int k = 0; k < 5; ++k) {
        const Vector p = lse.sample_primal(rng);
        const auto R = dual::curvature_pullback(lse, p);
        double worst = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int m = 0; m < 2; ++m)
                    for (int l = 0; l < 2; ++l) worst = std::max(worst, std::abs(R(i, j, m, l)));
        REQUIRE_THAT(worst, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("product sectional curvature averages the base pair", "[dualistic]") {
    Rng rng(312);
    const auto c2 = log_chart_n2();
    graph::QuadraticChart lse(graph::log_sum_exp_generator(2));
    graph::QuadraticChart spd(graph::spd_generator(graph::default_spd_matrix()));
    const std::vector<const graph::GraphChart*> charts{&c2, &lse, &spd};
    for (const auto* chart : charts) {
        INFO("chart " << chart->name());
        for (int k = 0; k < 8; ++k) {
            const Vector p = chart->sample_primal(rng);
            const Vector u = rng.direction(2);
            const Vector v = rng.direction(2);
            REQUIRE_THAT(dual::averaging_check(*chart, p, u, v), WithinAbs(0.0, 1e-10));
        }
    }
}
