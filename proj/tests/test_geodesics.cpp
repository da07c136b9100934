// Tests for geodesic integration (base and product), boundary-value solves,
// and the mixed fourth-derivative identity for the four-point function.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "otgeom/geodesics.hpp"

using namespace otgeom;
using Catch::Matchers::WithinAbs;

namespace {

graph::LogChart log_chart_n1() { return graph::LogChart(1, 1.0, 0.5, 0.5 * std::log(2.0)); }
graph::LogChart log_chart_n2() { return graph::LogChart(2, 1.0, 1.0 / 3.0, 0.0); }

}  // namespace

TEST_CASE("one-dimensional log chart geodesics are exponentials", "[geodesics]") {
    // With symbols Gamma(x) = -1/x the solution through (p0, w p0) is
    // p0 * exp(w t).
    const auto chart = log_chart_n1();
    const double p0 = 1.3, w = 0.7;
    Vector x0(1), v0(1);
    x0 << p0;
    v0 << w * p0;
    const auto path = geo::integrate_primal_geodesic(chart, x0, v0, 0.0, 1.0, 128);
    for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        REQUIRE_THAT(path.position(t)[0], WithinAbs(p0 * std::exp(w * t), 1e-7));
        REQUIRE_THAT(path.velocity(t)[0], WithinAbs(w * p0 * std::exp(w * t), 1e-6));
    }
    REQUIRE_THAT(geo::geodesic_residual(path, geo::primal_connection_field(chart)),
                 WithinAbs(0.0, 1e-5));
}

TEST_CASE("dual geodesics of the log chart are exponentials in dual coordinates",
          "[geodesics]") {
    const auto chart = log_chart_n1();
    const double q0 = 0.8, w = -0.4;
    Vector e0(1), w0(1);
    e0 << q0;
    w0 << w * q0;
    const auto path = geo::integrate_dual_geodesic(chart, e0, w0, 0.0, 1.0, 128);
    REQUIRE_THAT(path.position(1.0)[0], WithinAbs(q0 * std::exp(w), 1e-7));
}

TEST_CASE("quadratic chart geodesics are straight lines", "[geodesics]") {
    graph::QuadraticChart chart(graph::spd_generator(graph::default_spd_matrix()));
    Rng rng(401);
    const Vector x0 = rng.uniform_vector(2, -1.0, 1.0);
    const Vector v0 = rng.uniform_vector(2, -1.0, 1.0);
    const auto path = geo::integrate_primal_geodesic(chart, x0, v0, 0.0, 1.0, 64);
    for (const double t : {0.0, 0.3, 0.6, 1.0}) {
        REQUIRE_THAT((path.position(t) - (x0 + t * v0)).norm(), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT((path.velocity(t) - v0).norm(), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("boundary solve recovers the exponential rate", "[geodesics]") {
    const auto chart = log_chart_n1();
    Vector x0(1), target(1);
    x0 << 1.0;
    target << 2.0;
    const Vector v = geo::primal_geodesic_bvp(chart, x0, target);
    REQUIRE_THAT(v[0], WithinAbs(std::log(2.0), 1e-9));
    const auto path = geo::integrate_primal_geodesic(chart, x0, v, 0.0, 1.0, 128);
    REQUIRE_THAT(path.position(1.0)[0], WithinAbs(2.0, 1e-10));
}

TEST_CASE("boundary solve works between random points of the planar log chart",
          "[geodesics]") {
    const auto chart = log_chart_n2();
    Rng rng(402);
    for (int k = 0; k < 3; ++k) {
        const Vector a = chart.sample_primal(rng);
        const Vector b = chart.sample_primal(rng);
        const Vector v = geo::primal_geodesic_bvp(chart, a, b);
        const auto path = geo::integrate_primal_geodesic(chart, a, v, 0.0, 1.0, 128);
        REQUIRE_THAT((path.position(1.0) - b).norm(), WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("product geodesics freeze a factor with one-sided initial data",
          "[geodesics]") {
    const auto c = cost::log_cost(2, 1.0);
    Vector xi(2), eta(2), u(2);
    xi << 1.0, 1.2;
    eta << 0.9, 1.1;
    u << 0.3, -0.2;
    const auto g = geo::integrate_product_geodesic(
        *c, ProductPoint{xi, eta}, TangentPair{u, Vector::Zero(2)}, 0.0, 1.0, 64);
    for (const double t : {0.25, 0.6, 1.0}) {
        const ProductPoint x = g.position(t);
        const TangentPair vel = g.velocity(t);
        REQUIRE_THAT((x.eta - eta).norm(), WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(vel.b.norm(), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("product geodesics conserve their split-metric speed", "[geodesics]") {
    const auto c = cost::log_cost(2, 1.0);
    Vector xi(2), eta(2), u(2), v(2);
    xi << 1.0, 1.2;
    eta << 0.9, 1.1;
    u << 0.25, -0.15;
    v << -0.1, 0.2;
    const auto g = geo::integrate_product_geodesic(*c, ProductPoint{xi, eta},
                                                   TangentPair{u, v}, 0.0, 1.0, 128);
    const auto speed = [&](double t) {
        const ProductPoint x = g.position(t);
        const TangentPair vel = g.velocity(t);
        return product::metric_h(*c, x.xi, x.eta, vel, vel);
    };
    const double at0 = speed(0.0);
    for (const double t : {0.25, 0.5, 0.75, 1.0}) {
        REQUIRE_THAT(speed(t), WithinAbs(at0, 1e-8));
    }
}

TEST_CASE("fourth derivative of the four-point function vanishes for quadratic costs",
          "[geodesics]") {
    const auto c = cost::quadratic_cost(2);
    Vector xi(2), eta(2), u(2), v(2);
    xi << 0.4, -0.3;
    eta << 0.1, 0.6;
    u << 1.0, 0.5;
    v << -0.7, 0.9;
    const auto rep = geo::fourth_derivative_check(*c, xi, eta, u, v);
    REQUIRE_THAT(rep.rhs, WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(rep.lhs, WithinAbs(0.0, 1e-8));
    REQUIRE_THAT(rep.gap, WithinAbs(0.0, 1e-8));
}

TEST_CASE("fourth-derivative pins for the unit log configuration", "[geodesics]") {
    const auto c = cost::log_cost(1, 1.0);
    Vector one = Vector::Ones(1);
    const auto rep = geo::fourth_derivative_check(*c, one, one, one, one);
    REQUIRE_THAT(rep.rhs, WithinAbs(-0.125, 1e-12));
    REQUIRE_THAT(rep.lhs, WithinAbs(-0.125, 1e-3));
    REQUIRE_THAT(rep.gap, WithinAbs(0.0, 1e-3));
    REQUIRE_THAT(rep.mtw_divergence, WithinAbs(0.125, 1e-3));
    REQUIRE_THAT(rep.mtw_algebraic, WithinAbs(0.125, 1e-12));
}

TEST_CASE("divergence and algebraic regularity quantities agree off the diagonal",
          "[geodesics]") {
    const auto c = cost::log_cost(2, 1.0);
    Vector xi(2), eta(2), u(2), v(2);
    xi << 1.1, 0.9;
    eta << 1.0, 1.3;
    u << 0.8, -0.4;
    v << 0.3, 0.6;
    const auto rep = geo::fourth_derivative_check(*c, xi, eta, u, v);
    REQUIRE_THAT(rep.gap, WithinAbs(0.0, 2e-3));
    REQUIRE_THAT(rep.mtw_divergence - rep.mtw_algebraic, WithinAbs(0.0, 2e-3));
}

TEST_CASE("log-family corollary collapses the curvature side to the pairing",
          "[geodesics]") {
    const auto c = cost::log_cost(1, 1.0);
    Vector one = Vector::Ones(1);
    const auto rep = geo::log_corollary_check(*c, 1.0, one, one, one, one);
    REQUIRE_THAT(rep.pairing, WithinAbs(-0.25, 1e-12));
    REQUIRE_THAT(rep.predicted, WithinAbs(-0.125, 1e-12));
    REQUIRE_THAT(rep.gap, WithinAbs(0.0, 1e-3));

    const auto c2 = cost::log_cost(2, 0.5);
    Vector xi(2), eta(2), u(2), v(2);
    xi << 1.2, 0.8;
    eta << 1.0, 1.1;
    u << 0.5, 0.4;
    v << -0.3, 0.7;
    const auto rep2 = geo::log_corollary_check(*c2, 0.5, xi, eta, u, v);
    REQUIRE_THAT(rep2.gap, WithinAbs(0.0, 2e-3));
}
