#pragma once

// Central finite differences for mixed partial derivatives up to total order
// four, with optional Richardson extrapolation. This is the derivative oracle
// the whole toolkit is cross-checked against, so it stays independent of any
// closed-form derivative code.

#include "otgeom/core.hpp"

#include <functional>
#include <map>
#include <span>

namespace otgeom::num {

// Central scheme: step size plus 0..2 Richardson halving levels. Each level
// raises the truncation order by two.
struct FdScheme {
    double step = 1e-5;
    int richardson_levels = 0;
};

// Step choice balancing truncation against roundoff: small steps for the
// well-conditioned low orders, larger steps plus one extrapolation level as
// the 1/h^order roundoff amplification grows.
inline FdScheme default_fd_scheme(int total_order) {
    if (total_order <= 2) return {1e-4, 0};
    if (total_order == 3) return {5e-3, 1};
    return {1e-2, 1};
}

namespace detail {

// O(h^2) central stencils; node offsets are integer multiples of the step.
struct Stencil {
    std::vector<std::pair<int, double>> taps;  // (offset, coefficient)
    int h_power;
};

inline Stencil central_stencil(int order) {
    switch (order) {
        case 1: return {{{-1, -0.5}, {1, 0.5}}, 1};
        case 2: return {{{-1, 1.0}, {0, -2.0}, {1, 1.0}}, 2};
        case 3: return {{{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}, 3};
        case 4: return {{{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}}, 4};
        default: throw DomainError("central_fd: derivative order out of range 1..4");
    }
}

inline double tensor_stencil_eval(const std::function<double(const Vector&)>& fn, const Vector& at,
                                  const std::vector<std::pair<int, int>>& coord_orders, double h) {
    // Tensor product of per-coordinate stencils, accumulated recursively.
    double total = 0.0;
    Vector x = at;
    double hpow = 1.0;
    for (const auto& [coord, order] : coord_orders) {
        (void)coord;
        for (int k = 0; k < order; ++k) hpow *= h;
    }
    std::function<void(std::size_t, double)> rec = [&](std::size_t level, double coeff) {
        if (level == coord_orders.size()) {
            total += coeff * fn(x);
            return;
        }
        const auto [coord, order] = coord_orders[level];
        const Stencil st = central_stencil(order);
        const double saved = x[coord];
        for (const auto& [offset, c] : st.taps) {
            x[coord] = saved + offset * h;
            rec(level + 1, coeff * c);
        }
        x[coord] = saved;
    };
    rec(0, 1.0);
    return total / hpow;
}

}  // namespace detail

// Mixed partial of fn at `at` with respect to the listed coordinates
// (repetition raises the order in that coordinate; at most 4 entries total).
// Domain violations surface as whatever fn throws on stencil points.
inline double central_fd(const std::function<double(const Vector&)>& fn, const Vector& at,
                         std::span<const int> coords, FdScheme scheme) {
    if (coords.size() > 4) throw DomainError("central_fd: multi-index longer than 4");
    if (coords.empty()) return fn(at);
    if (!(scheme.step > 0)) throw DomainError("central_fd: step must be positive");
    std::map<int, int> orders;  // coordinate -> derivative order (deterministic order)
    for (int c : coords) {
        if (c < 0 || c >= at.size()) throw DomainError("central_fd: coordinate index out of range");
        ++orders[c];
    }
    std::vector<std::pair<int, int>> coord_orders(orders.begin(), orders.end());

    // Richardson table on step halving; each halving gains two orders.
    const int levels = std::clamp(scheme.richardson_levels, 0, 2);
    std::vector<double> row(levels + 1);
    for (int i = 0; i <= levels; ++i)
        row[i] = detail::tensor_stencil_eval(fn, at, coord_orders, scheme.step / (1 << i));
    double factor = 4.0;
    for (int j = 0; j < levels; ++j) {
        for (int i = 0; i < levels - j; ++i) row[i] = (factor * row[i + 1] - row[i]) / (factor - 1.0);
        factor *= 4.0;
    }
    return row[0];
}

inline double central_fd(const std::function<double(const Vector&)>& fn, const Vector& at,
                         std::span<const int> coords) {
    return central_fd(fn, at, coords, default_fd_scheme(static_cast<int>(coords.size())));
}

// Convenience for functions on a product space: differentiate fn(xi, eta) by
// the listed primal coordinates of xi and dual coordinates of eta.
inline double central_fd_product(const std::function<double(const Vector&, const Vector&)>& fn,
                                 const Vector& xi, const Vector& eta,
                                 std::span<const int> primal, std::span<const int> dual,
                                 FdScheme scheme) {
    const int n = static_cast<int>(xi.size());
    Vector flat(xi.size() + eta.size());
    flat << xi, eta;
    std::vector<int> coords;
    coords.reserve(primal.size() + dual.size());
    for (int i : primal) coords.push_back(i);
    for (int j : dual) coords.push_back(n + j);
    auto split = [&](const Vector& z) {
        return fn(z.head(xi.size()), z.tail(eta.size()));
    };
    return central_fd(split, flat, coords, scheme);
}

inline double central_fd_product(const std::function<double(const Vector&, const Vector&)>& fn,
                                 const Vector& xi, const Vector& eta,
                                 std::span<const int> primal, std::span<const int> dual) {
    return central_fd_product(fn, xi, eta, primal, dual,
                              default_fd_scheme(static_cast<int>(primal.size() + dual.size())));
}

}  // namespace otgeom::num
