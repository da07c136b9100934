#pragma once

// Dualistic (information-geometric) structure a graph chart induces on its
// base: the Riemannian metric g, the conjugate connection pair, duality and
// product-decomposition checks, Eguchi finite-difference oracles driven by
// the divergence alone, and two independent curvature pipelines on the base
// together with the averaging identity tying them to the product curvature.

#include "otgeom/graph_chart.hpp"
#include "otgeom/product_geometry.hpp"

namespace otgeom::dual {

using graph::GraphChart;

// g_ij(xi) = -c_{i:m} J^m_j at the graph point (p, f(p)). Symmetry of the
// result is the integrability of the chart, not an assumption of the code.
inline Matrix metric_g(const GraphChart& chart, const Vector& xi) {
    const Vector eta = chart.forward(xi);
    return -chart.cost_model().mixed_matrix(xi, eta) * chart.jacobian(xi);
}

// The same metric in dual coordinates: g_ij(eta) = -c_{m:i} (J^{-1})^m_j.
inline Matrix metric_g_dual(const GraphChart& chart, const Vector& eta) {
    const Vector xi = chart.inverse(eta);
    const Matrix Jinv =
        num::inverse_guarded(chart.jacobian(xi), 1e12, "chart jacobian");
    return -chart.cost_model().mixed_matrix(xi, eta).transpose() * Jinv;
}

// Primal connection Gamma_{ij}^k = c_{ij:m} c^{m:k} at the graph point; the
// same contraction as the purely primal product symbols.
inline Rank3Coefficients primal_connection(const GraphChart& chart, const Vector& xi) {
    return product::levi_civita_symbols(chart.cost_model(), xi, chart.forward(xi)).primal;
}

// Dual connection in dual coordinates: Gamma*_{ij}^k = c^{k:m} c_{m:ij}.
inline Rank3Coefficients dual_connection_dual_coords(const GraphChart& chart,
                                                     const Vector& eta) {
    return product::levi_civita_symbols(chart.cost_model(), chart.inverse(eta), eta).dual;
}

// Second derivative of the forward map, H^m_{ij} = d^2 eta_m / dxi_i dxi_j,
// by central differences of the exact Jacobian (symmetrized over i, j).
inline Rank3Coefficients forward_hessian(const GraphChart& chart, const Vector& xi,
                                         double step = 1e-5) {
    const int n = chart.dim();
    Rank3Coefficients H(n, {Slot::dual, Slot::primal, Slot::primal});
    std::vector<Matrix> dJ(n);
    for (int j = 0; j < n; ++j) {
        Vector xp = xi, xm = xi;
        xp[j] += step;
        xm[j] -= step;
        dJ[j] = (chart.jacobian(xp) - chart.jacobian(xm)) / (2 * step);
    }
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) H(m, i, j) = 0.5 * (dJ[j](m, i) + dJ[i](m, j));
    return H;
}

// Dual connection expressed in primal coordinates, all indices lowered:
// Gamma*_{ij,k}(xi) = -[ c_{k:ma} J^m_i J^a_j + c_{k:m} H^m_{ij} ].
inline Rank3Coefficients dual_connection_primal_lower(const GraphChart& chart,
                                                      const Vector& xi,
                                                      double hessian_step = 1e-5) {
    const int n = chart.dim();
    const Vector eta = chart.forward(xi);
    const Matrix J = chart.jacobian(xi);
    const Matrix A = chart.cost_model().mixed_matrix(xi, eta);
    const Rank3Coefficients H = forward_hessian(chart, xi, hessian_step);
    Rank3Coefficients G(n, {Slot::primal, Slot::primal, Slot::primal});
    for (int k = 0; k < n; ++k) {
        Matrix third(n, n);  // c_{k:ma}
        for (int m = 0; m < n; ++m)
            for (int a = m; a < n; ++a) {
                third(m, a) = chart.cost_model().d(xi, eta, {k}, {m, a});
                third(a, m) = third(m, a);
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double pulled = 0, correction = 0;
                for (int m = 0; m < n; ++m) {
                    for (int a = 0; a < n; ++a) pulled += third(m, a) * J(m, i) * J(a, j);
                    correction += A(k, m) * H(m, i, j);
                }
                G(i, j, k) = -(pulled + correction);
            }
    }
    return G;
}

// Lower the primal connection with g: Gamma_{ij,k} = Gamma_{ij}^m g_{mk}.
inline Rank3Coefficients lower_with_metric(const Rank3Coefficients& gamma, const Matrix& g) {
    const int n = gamma.n;
    Rank3Coefficients out(n, gamma.slots);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0;
                for (int m = 0; m < n; ++m) s += gamma(i, j, m) * g(m, k);
                out(i, j, k) = s;
            }
    return out;
}

// Conjugacy of the connection pair: max_{kij} | d_k g_ij - Gamma_{ki,j} -
// Gamma*_{kj,i} |, the metric derivative taken by central differences of g
// along the chart.
inline double duality_check(const GraphChart& chart, const Vector& xi, double step = 1e-5) {
    const int n = chart.dim();
    const Matrix g = metric_g(chart, xi);
    const Rank3Coefficients gamma_low = lower_with_metric(primal_connection(chart, xi), g);
    const Rank3Coefficients gamma_star = dual_connection_primal_lower(chart, xi);
    double worst = 0;
    for (int k = 0; k < n; ++k) {
        Vector xp = xi, xm = xi;
        xp[k] += step;
        xm[k] -= step;
        const Matrix dg = (metric_g(chart, xp) - metric_g(chart, xm)) / (2 * step);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst,
                                 std::abs(dg(i, j) - gamma_low(k, i, j) - gamma_star(k, j, i)));
    }
    return worst;
}

// Restriction of the product connection to lifted fields against the pair
// (primal connection, dual connection pushed through the chart). The primal
// component matches by construction; the dual component is the content.
struct DecompositionReport {
    double primal_gap = 0;
    double dual_gap = 0;
};

inline DecompositionReport decomposition_check(const GraphChart& chart, const Vector& xi,
                                               double hessian_step = 1e-5) {
    const int n = chart.dim();
    const Vector eta = chart.forward(xi);
    const Matrix J = chart.jacobian(xi);
    const product::ProductChristoffel bar =
        product::levi_civita_symbols(chart.cost_model(), xi, eta);
    const Rank3Coefficients gamma = primal_connection(chart, xi);
    const Matrix g = metric_g(chart, xi);
    const Matrix ginv = num::inverse_guarded(0.5 * (g + g.transpose()), 1e12, "base metric");
    const Rank3Coefficients gamma_star_low = dual_connection_primal_lower(chart, xi, hessian_step);
    const Rank3Coefficients H = forward_hessian(chart, xi, hessian_step);

    DecompositionReport rep;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                rep.primal_gap = std::max(rep.primal_gap,
                                          std::abs(bar.primal(i, j, k) - gamma(i, j, k)));
                // product side: H^k_{ij} + Gamma-dual_{ab}^k J^a_i J^b_j
                double lhs = H(k, i, j);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) lhs += bar.dual(a, b, k) * J(a, i) * J(b, j);
                // chart side: J^k_m Gamma*^m_{ij}
                double rhs = 0;
                for (int m = 0; m < n; ++m) {
                    double raised = 0;
                    for (int q = 0; q < n; ++q) raised += gamma_star_low(i, j, q) * ginv(q, m);
                    rhs += J(k, m) * raised;
                }
                rep.dual_gap = std::max(rep.dual_gap, std::abs(lhs - rhs));
            }
    return rep;
}

// Independent restriction check: h on lifted tangents against the Eguchi
// metric of the induced divergence, computed from D alone.
using DivergenceFn = std::function<double(const Vector&, const Vector&)>;

inline Matrix eguchi_metric(const DivergenceFn& D, int n, const Vector& xi,
                            num::FdScheme scheme = {1e-3, 1}) {
    const auto flat = [&](const Vector& z) {
        return D(z.head(n), z.tail(n));
    };
    Vector z(2 * n);
    z.head(n) = xi;
    z.tail(n) = xi;
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::array<int, 2> coords{i, n + j};
            g(i, j) = -num::central_fd(flat, z, coords, scheme);
        }
    return g;
}

// Eguchi connection coefficients, all indices lowered.
inline Rank3Coefficients eguchi_primal_connection(const DivergenceFn& D, int n,
                                                  const Vector& xi,
                                                  num::FdScheme scheme = {5e-3, 1}) {
    const auto flat = [&](const Vector& z) { return D(z.head(n), z.tail(n)); };
    Vector z(2 * n);
    z.head(n) = xi;
    z.tail(n) = xi;
    Rank3Coefficients G(n, {Slot::primal, Slot::primal, Slot::primal});
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const std::array<int, 3> coords{i, j, n + k};
                G(i, j, k) = -num::central_fd(flat, z, coords, scheme);
                G(j, i, k) = G(i, j, k);
            }
    return G;
}

inline Rank3Coefficients eguchi_dual_connection(const DivergenceFn& D, int n, const Vector& xi,
                                                num::FdScheme scheme = {5e-3, 1}) {
    const auto flat = [&](const Vector& z) { return D(z.head(n), z.tail(n)); };
    Vector z(2 * n);
    z.head(n) = xi;
    z.tail(n) = xi;
    Rank3Coefficients G(n, {Slot::primal, Slot::primal, Slot::primal});
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const std::array<int, 3> coords{n + i, n + j, k};
                G(i, j, k) = -num::central_fd(flat, z, coords, scheme);
                G(j, i, k) = G(i, j, k);
            }
    return G;
}

// |h(lift u, lift v) - u . g_eguchi v| at one chart point: pullback of the
// split metric against the divergence-derived metric.
inline double metric_restriction_check(const GraphChart& chart, const Vector& xi,
                                       const Vector& u, const Vector& v,
                                       const Matrix& g_eguchi) {
    const Vector eta = chart.forward(xi);
    const double h = product::metric_h(chart.cost_model(), xi, eta, chart.lift(xi, u),
                                       chart.lift(xi, v));
    return std::abs(h - u.dot(g_eguchi * v));
}

// ---------------------------------------------------------------------------
// Base curvature: two pipelines
// ---------------------------------------------------------------------------

// Pullback of the canonical product block through the chart:
// R_{ijkl}(xi) = -2 S(i,a,b,k) J^a_j J^b_l + 2 S(j,a,b,k) J^a_i J^b_l.
inline Rank4Coefficients curvature_pullback(const GraphChart& chart, const Vector& xi) {
    const int n = chart.dim();
    const Vector eta = chart.forward(xi);
    const Rank4Coefficients S = product::curvature_canonical(chart.cost_model(), xi, eta);
    const Matrix J = chart.jacobian(xi);
    Rank4Coefficients R(n, {Slot::primal, Slot::primal, Slot::primal, Slot::primal});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double acc = 0;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            acc += (-2.0 * S(i, a, b, k) * J(a, j) +
                                    2.0 * S(j, a, b, k) * J(a, i)) *
                                   J(b, l);
                    R(i, j, k, l) = acc;
                }
    return R;
}

// Dual-coordinate mirror: R*_{ijkl}(eta) = -2 S(a,i,k,b) K^a_j K^b_l +
// 2 S(a,j,k,b) K^a_i K^b_l with K the inverse Jacobian.
inline Rank4Coefficients curvature_dual_pullback(const GraphChart& chart, const Vector& eta) {
    const int n = chart.dim();
    const Vector xi = chart.inverse(eta);
    const Rank4Coefficients S = product::curvature_canonical(chart.cost_model(), xi, eta);
    const Matrix K = num::inverse_guarded(chart.jacobian(xi), 1e12, "chart jacobian");
    Rank4Coefficients R(n, {Slot::dual, Slot::dual, Slot::dual, Slot::dual});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double acc = 0;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            acc += (-2.0 * S(a, i, k, b) * K(a, j) +
                                    2.0 * S(a, j, k, b) * K(a, i)) *
                                   K(b, l);
                    R(i, j, k, l) = acc;
                }
    return R;
}

// Direct pipeline: curvature of the primal connection by the coordinate
// formula, the symbol field differentiated along the chart by central
// differences, lowered with g on the last slot.
inline Rank4Coefficients curvature_direct(const GraphChart& chart, const Vector& xi,
                                          double step = 1e-4) {
    const int n = chart.dim();
    std::vector<Rank3Coefficients> dG;
    dG.reserve(n);
    for (int a = 0; a < n; ++a) {
        Vector xp = xi, xm = xi;
        xp[a] += step;
        xm[a] -= step;
        const Rank3Coefficients gp = primal_connection(chart, xp);
        const Rank3Coefficients gm = primal_connection(chart, xm);
        Rank3Coefficients d(n, gp.slots);
        for (size_t t = 0; t < d.a.size(); ++t) d.a[t] = (gp.a[t] - gm.a[t]) / (2 * step);
        dG.push_back(std::move(d));
    }
    const Rank3Coefficients G = primal_connection(chart, xi);
    const Matrix g = metric_g(chart, xi);
    Rank4Coefficients R(n, {Slot::primal, Slot::primal, Slot::primal, Slot::primal});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vector up(n);
                for (int l = 0; l < n; ++l) {
                    double r = dG[i](j, k, l) - dG[j](i, k, l);
                    for (int m = 0; m < n; ++m)
                        r += G(j, k, m) * G(i, m, l) - G(i, k, m) * G(j, m, l);
                    up[l] = r;
                }
                for (int l = 0; l < n; ++l) {
                    double low = 0;
                    for (int m = 0; m < n; ++m) low += up[m] * g(m, l);
                    R(i, j, k, l) = low;
                }
            }
    return R;
}

inline double max_component_gap(const Rank4Coefficients& x, const Rank4Coefficients& y) {
    double worst = 0;
    for (size_t t = 0; t < x.a.size(); ++t) worst = std::max(worst, std::abs(x.a[t] - y.a[t]));
    return worst;
}

// Unnormalized sectional curvature R(X, Y, Y, X) from an n^4 block.
inline double sec_u(const Rank4Coefficients& R, const Vector& X, const Vector& Y) {
    const int n = R.n;
    double acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += R(i, j, k, l) * X[i] * Y[j] * Y[k] * X[l];
    return acc;
}

// Averaging identity at a chart point: the product sectional curvature of
// lifted tangents is the mean of the primal and dual base curvatures.
// Returns |sec_bar - (sec + sec*) / 2|.
inline double averaging_check(const GraphChart& chart, const Vector& xi, const Vector& u,
                              const Vector& v) {
    const Vector eta = chart.forward(xi);
    const Matrix J = chart.jacobian(xi);
    const Rank4Coefficients S = product::curvature_canonical(chart.cost_model(), xi, eta);
    const double sec_bar = product::unnormalized_sec_bar(S, chart.lift(xi, u), chart.lift(xi, v));
    const double sec_primal = sec_u(curvature_pullback(chart, xi), u, v);
    const double sec_dual = sec_u(curvature_dual_pullback(chart, eta), J * u, J * v);
    return std::abs(sec_bar - 0.5 * (sec_primal + sec_dual));
}

}  // namespace otgeom::dual
