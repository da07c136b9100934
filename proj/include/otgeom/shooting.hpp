#pragma once

// Newton shooting for two-point boundary problems: find the initial velocity
// whose unit-time trajectory hits a target point. The endpoint map is supplied
// by the caller (typically a geodesic integrator); its Jacobian is taken by
// forward differences.

#include "otgeom/core.hpp"

#include <functional>

namespace otgeom::num {

// endpoint(start, v) must return the position at t = 1 of the trajectory with
// initial position `start` and initial velocity `v`.
using EndpointMap = std::function<Vector(const Vector&, const Vector&)>;

struct ShootOptions {
    double tol = 1e-10;
    int max_iters = 60;
    double jacobian_step = 1e-6;
};

// Returns the initial velocity with ||endpoint(start, v) - target|| <= tol.
// Newton steps are damped by halving while the residual fails to decrease;
// running out of iterations raises ConvergenceError with the best residual.
inline Vector shoot_bvp(const EndpointMap& endpoint, const Vector& start, const Vector& target,
                        double tol, ShootOptions opt = {}) {
    opt.tol = tol;
    const int n = static_cast<int>(start.size());
    Vector v = target - start;  // exact for flat connections
    Vector res = endpoint(start, v) - target;
    double best = res.norm();
    for (int iter = 0; iter < opt.max_iters; ++iter) {
        if (best <= opt.tol) return v;
        // Forward-difference Jacobian of the endpoint in the velocity.
        Matrix jac(n, n);
        const double h = opt.jacobian_step * std::max(1.0, v.norm());
        for (int j = 0; j < n; ++j) {
            Vector vp = v;
            vp[j] += h;
            jac.col(j) = (endpoint(start, vp) - target - res) / h;
        }
        Vector step;
        try {
            step = solve_guarded(jac, res, 1e14, "shooting Jacobian");
        } catch (const DegeneracyError&) {
            throw ConvergenceError("shoot_bvp: singular shooting Jacobian", best);
        }
        // Damped update: halve until the residual improves (or give up on
        // this direction after a few halvings).
        double lambda = 1.0;
        for (int back = 0; back < 8; ++back) {
            const Vector v_try = v - lambda * step;
            const Vector res_try = endpoint(start, v_try) - target;
            if (res_try.norm() < best) {
                v = v_try;
                res = res_try;
                best = res.norm();
                break;
            }
            lambda *= 0.5;
            if (back == 7) {
                v = v_try;
                res = res_try;
                best = std::min(best, res.norm());
            }
        }
    }
    if (best <= opt.tol) return v;
    throw ConvergenceError("shoot_bvp: no convergence", best);
}

}  // namespace otgeom::num
