#pragma once

// Gauss-Legendre quadrature on intervals and on the triangle 0 <= s <= t <= T,
// the latter as an iterated rule. Nodes come from Newton iteration on the
// Legendre recurrence, so arbitrary orders up to 64 are available without
// tabulation.

#include "otgeom/core.hpp"

#include <functional>

namespace otgeom::num {

struct QuadRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Nodes and weights of the order-k Gauss-Legendre rule; exact for polynomials
// of degree 2k-1.
inline const QuadRule& gauss_legendre(int order) {
    static thread_local std::vector<QuadRule> cache(65);
    if (order < 1 || order > 64) throw DomainError("gauss_legendre: order out of range 1..64");
    QuadRule& rule = cache[order];
    if (!rule.nodes.empty()) return rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        // Chebyshev-based initial guess, then Newton on P_order.
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

inline double integrate_1d(const std::function<double(double)>& fn, double a, double b, int order) {
    const QuadRule& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < order; ++i) acc += rule.weights[i] * fn(mid + half * rule.nodes[i]);
    return acc * half;
}

// Integral of fn(s, t) over the triangle {0 <= s <= t <= T}, iterated
// Gauss-Legendre with `order` nodes per axis.
inline double quadrature_triangle(const std::function<double(double, double)>& fn, double T,
                                  int order) {
    return integrate_1d(
        [&](double t) {
            return integrate_1d([&](double s) { return fn(s, t); }, 0.0, t, order);
        },
        0.0, T, order);
}

}  // namespace otgeom::num
