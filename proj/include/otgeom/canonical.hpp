#pragma once

// Canonical divergences: a chart's divergence re-wrapped as a cost on the
// base (and the four-point function it preserves), reconstruction of a
// divergence from its mixed-derivative field by a triangle integral along a
// path, and the geodesic-integral divergence of a metric/connection pair
// with its restriction, structure, and endpoint-derivative identities.

#include "otgeom/geodesics.hpp"
#include "otgeom/quadrature.hpp"

namespace otgeom::canon {

using graph::GraphChart;

// The divergence of a chart, packaged as a cost on base x base. Degenerate
// on the diagonal by construction, so it feeds the same geometric machinery
// with the roles of "cost" and "divergence" exchanged.
inline cost::CostPtr wrap_cost_as_divergence(const graph::ChartPtr& chart, const Vector& lo,
                                             const Vector& hi, int grid_per_axis = 5,
                                             cost::PartialPairFn exact_partial = nullptr) {
    const graph::ChartPtr held = chart;
    return cost::divergence_as_cost(
        held->dim(),
        [held](const Vector& p, const Vector& pprime) {
            return graph::c_divergence(*held, p, pprime);
        },
        lo, hi, grid_per_axis, std::move(exact_partial));
}

// The wrapped divergence has the same four-point function as the original
// cost composed with (identity x forward map): the potentials cancel in the
// four-term combination. Returns the absolute residual on one quadruple.
inline double delta_preservation_check(const GraphChart& chart, const cost::CostModel& wrapped,
                                       const Vector& p, const Vector& pprime, const Vector& p0,
                                       const Vector& p0prime) {
    const double delta_wrapped =
        product::cross_difference(wrapped, {p, pprime}, {p0, p0prime});
    const double delta_cost = product::cross_difference(
        chart.cost_model(), {p, chart.forward(pprime)}, {p0, chart.forward(p0prime)});
    return std::abs(delta_wrapped - delta_cost);
}

// Reconstruction of a divergence value from its mixed second-derivative
// field: for any smooth path gamma on [0, T],
//   D[gamma(0) : gamma(T)] = integral over {0 <= s <= t <= T} of
//                            -dot(gamma'(s), M(gamma(s), gamma(t)) gamma'(t))
// with M(p, q) the (primal, dual) mixed block of D. Exact for every path.
inline double recover_cost_from_metric(
    const std::function<Matrix(const Vector&, const Vector&)>& mixed,
    const std::function<Vector(double)>& gamma, const std::function<Vector(double)>& gamma_dot,
    double T, int order = 32) {
    const auto integrand = [&](double s, double t) {
        return -gamma_dot(s).dot(mixed(gamma(s), gamma(t)) * gamma_dot(t));
    };
    return num::quadrature_triangle(integrand, T, order);
}

// Convenience: straight-line path from x to y, mixed block taken from the
// wrapped divergence-cost's own partials.
inline double recover_cost_from_metric(const cost::CostModel& divergence_cost, const Vector& x,
                                       const Vector& y, int order = 32) {
    const Vector d = y - x;
    return recover_cost_from_metric(
        [&divergence_cost](const Vector& p, const Vector& q) {
            return divergence_cost.mixed_matrix(p, q);
        },
        [&](double t) { return Vector(x + t * d); }, [&](double) { return d; }, 1.0, order);
}

// ---------------------------------------------------------------------------
// Geodesic-integral divergence of (g, primal connection)
// ---------------------------------------------------------------------------

// D[p : q] = integral_0^1 t g_{gamma(t)}(gamma', gamma') dt along the
// primal-connection geodesic with gamma(0) = p, gamma(1) = q. Reduces to
// the Bregman divergence in the dually flat case and to |q - p|^2 / 2 for
// the Euclidean chart.
inline double ay_amari_divergence(const GraphChart& chart, const Vector& p, const Vector& q,
                                  int steps = 256, int quad_order = 32, double bvp_tol = 1e-12) {
    const Vector v0 = geo::primal_geodesic_bvp(chart, p, q, bvp_tol, steps);
    const geo::GeodesicPath path =
        geo::integrate_geodesic(geo::primal_connection_field(chart), chart.dim(), p, v0, 0.0,
                                1.0, steps);
    return num::integrate_1d(
        [&](double t) {
            const Vector x = path.position(t), v = path.velocity(t);
            return t * v.dot(dual::metric_g(chart, x) * v);
        },
        0.0, 1.0, quad_order);
}

// Restriction identity along one geodesic: for 0 <= s1 < s2 <= 1,
// D[gamma(s1) : gamma(s2)] = integral_{s1}^{s2} (t - s1) g(gamma', gamma')
// dt. The left side re-runs the whole pipeline; the right side only
// reweights the given path. Returns the absolute gap.
inline double ay_amari_restriction_check(const GraphChart& chart, const Vector& p,
                                         const Vector& q, double s1, double s2,
                                         int steps = 256) {
    const Vector v0 = geo::primal_geodesic_bvp(chart, p, q, 1e-12, steps);
    const geo::GeodesicPath path =
        geo::integrate_geodesic(geo::primal_connection_field(chart), chart.dim(), p, v0, 0.0,
                                1.0, steps);
    const double direct = ay_amari_divergence(chart, path.position(s1), path.position(s2), steps);
    const double weighted = num::integrate_1d(
        [&](double t) {
            const Vector x = path.position(t), v = path.velocity(t);
            return (t - s1) * v.dot(dual::metric_g(chart, x) * v);
        },
        s1, s2, 32);
    return std::abs(direct - weighted);
}

// Eguchi structure of the geodesic-integral divergence against the chart's
// own metric and connection pair, all by finite differences of D alone.
struct AyAmariStructureReport {
    double metric_gap = 0;   // Eguchi metric vs g
    double primal_gap = 0;   // Eguchi primal connection vs Gamma lowered
    double dual_gap = 0;     // Eguchi dual connection vs Gamma* lowered
};

inline AyAmariStructureReport ay_amari_structure_check(const GraphChart& chart, const Vector& p,
                                                       int steps = 256) {
    const int n = chart.dim();
    const dual::DivergenceFn D = [&](const Vector& a, const Vector& b) {
        return ay_amari_divergence(chart, a, b, steps);
    };
    AyAmariStructureReport rep;
    const Matrix g_fd = dual::eguchi_metric(D, n, p, {5e-3, 1});
    const Matrix g = dual::metric_g(chart, p);
    rep.metric_gap = (g_fd - g).cwiseAbs().maxCoeff();

    const Rank3Coefficients gamma_fd = dual::eguchi_primal_connection(D, n, p, {0.02, 1});
    const Rank3Coefficients gamma =
        dual::lower_with_metric(dual::primal_connection(chart, p), g);
    const Rank3Coefficients gamma_star_fd = dual::eguchi_dual_connection(D, n, p, {0.02, 1});
    const Rank3Coefficients gamma_star = dual::dual_connection_primal_lower(chart, p);
    for (size_t t = 0; t < gamma.a.size(); ++t) {
        rep.primal_gap = std::max(rep.primal_gap, std::abs(gamma_fd.a[t] - gamma.a[t]));
        rep.dual_gap = std::max(rep.dual_gap, std::abs(gamma_star_fd.a[t] - gamma_star.a[t]));
    }
    return rep;
}

// Endpoint energy H(p, q) = g_{gamma(1)}(gamma'(1), gamma'(1)) of the
// connecting geodesic; equals |q - p|^2 for the Euclidean chart.
inline double h_function(const GraphChart& chart, const Vector& p, const Vector& q,
                         int steps = 256) {
    const Vector v0 = geo::primal_geodesic_bvp(chart, p, q, 1e-12, steps);
    const geo::GeodesicPath path =
        geo::integrate_geodesic(geo::primal_connection_field(chart), chart.dim(), p, v0, 0.0,
                                1.0, steps);
    const Vector v1 = path.velocity(1.0);
    return v1.dot(dual::metric_g(chart, path.position(1.0)) * v1);
}

// Mixed endpoint derivative of the divergence along its own geodesic:
// -d^2/ds1 ds2 D[gamma(s1) : gamma(s2)] at (0, 1) equals H(p, q). The left
// side re-enters the full pipeline at perturbed endpoints; gamma is
// integrated on a slightly larger window so the stencil stays on the path.
inline double h_function_consistency(const GraphChart& chart, const Vector& p, const Vector& q,
                                     double fd_step = 0.02, int steps = 256) {
    const Vector v0 = geo::primal_geodesic_bvp(chart, p, q, 1e-12, steps);
    const geo::GeodesicPath path =
        geo::integrate_geodesic(geo::primal_connection_field(chart), chart.dim(), p, v0, -0.1,
                                1.1, steps);
    const auto Dss = [&](double s1, double s2) {
        return ay_amari_divergence(chart, path.position(s1), path.position(s2), steps);
    };
    const double h = fd_step;
    const double mixed = (Dss(h, 1 + h) - Dss(h, 1 - h) - Dss(-h, 1 + h) + Dss(-h, 1 - h)) /
                         (4 * h * h);
    return std::abs(-mixed - h_function(chart, p, q, steps));
}

}  // namespace otgeom::canon
