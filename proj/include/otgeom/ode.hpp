#pragma once

// Fixed-step classical RK4 integration with stored samples and cubic Hermite
// dense output. Adaptive and stiff methods are out of scope; step counts are
// chosen by callers so that later stencil evaluations land on exact samples.

#include "otgeom/core.hpp"

#include <functional>

namespace otgeom::num {

using OdeRhs = std::function<Vector(double, const Vector&)>;

struct Trajectory {
    std::vector<double> t;
    std::vector<Vector> y;
    bool completed = true;
    double t_last = 0.0;  // last time with a valid (finite, in-domain) state
};

// Classical 4th-order Runge-Kutta with `steps` equal steps over t_span.
// A non-finite state aborts with IntegrationError carrying the last valid
// time; an optional domain predicate instead truncates the trajectory and
// clears `completed` (local charts want a usable partial path, not a throw).
inline Trajectory integrate_ode(const OdeRhs& rhs, const Vector& y0, double t0, double t1,
                                int steps,
                                const std::function<bool(const Vector&)>& in_domain = nullptr) {
    if (steps < 16) throw DomainError("integrate_ode: need at least 16 steps");
    Trajectory out;
    out.t.reserve(steps + 1);
    out.y.reserve(steps + 1);
    const double h = (t1 - t0) / steps;
    Vector y = y0;
    double t = t0;
    out.t.push_back(t);
    out.y.push_back(y);
    out.t_last = t;
    for (int k = 0; k < steps; ++k) {
        const Vector k1 = rhs(t, y);
        const Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const Vector k4 = rhs(t + h, y + h * k3);
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = t0 + (k + 1) * h;
        if (!y.allFinite())
            throw IntegrationError("integrate_ode: non-finite state", out.t_last);
        if (in_domain && !in_domain(y)) {
            out.completed = false;
            return out;
        }
        out.t.push_back(t);
        out.y.push_back(y);
        out.t_last = t;
    }
    return out;
}

// Cubic Hermite interpolant over stored (t, y) samples with derivatives
// re-evaluated from the right-hand side at the samples.
class HermitePath {
public:
    HermitePath() = default;
    HermitePath(Trajectory traj, const OdeRhs& rhs) : traj_(std::move(traj)) {
        deriv_.reserve(traj_.t.size());
        for (std::size_t i = 0; i < traj_.t.size(); ++i)
            deriv_.push_back(rhs(traj_.t[i], traj_.y[i]));
    }

    double t_min() const { return std::min(traj_.t.front(), traj_.t.back()); }
    double t_max() const { return std::max(traj_.t.front(), traj_.t.back()); }
    const Trajectory& trajectory() const { return traj_; }

    Vector value(double t) const { return eval(t, 0); }
    Vector derivative(double t) const { return eval(t, 1); }
    Vector second_derivative(double t) const { return eval(t, 2); }

private:
    Vector eval(double t, int deriv_order) const {
        if (traj_.t.size() < 2) throw DomainError("HermitePath: too few samples");
        // Locate the interval (samples may run in decreasing time).
        const bool increasing = traj_.t.back() > traj_.t.front();
        std::size_t lo = 0;
        for (std::size_t i = 0; i + 1 < traj_.t.size(); ++i) {
            const double a = traj_.t[i], b = traj_.t[i + 1];
            if ((increasing && t >= a - 1e-12 && t <= b + 1e-12) ||
                (!increasing && t <= a + 1e-12 && t >= b - 1e-12)) {
                lo = i;
                break;
            }
            lo = i;  // extrapolate from last interval if beyond range
        }
        const double t0 = traj_.t[lo], t1 = traj_.t[lo + 1];
        const double dt = t1 - t0;
        const double s = (t - t0) / dt;
        const Vector &y0 = traj_.y[lo], &y1 = traj_.y[lo + 1];
        const Vector m0 = deriv_[lo] * dt, m1 = deriv_[lo + 1] * dt;
        switch (deriv_order) {
            case 0: {
                const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
                const double h10 = s * (1 - s) * (1 - s);
                const double h01 = s * s * (3 - 2 * s);
                const double h11 = s * s * (s - 1);
                return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
            }
            case 1: {
                const double d00 = 6 * s * s - 6 * s;
                const double d10 = 3 * s * s - 4 * s + 1;
                const double d01 = -6 * s * s + 6 * s;
                const double d11 = 3 * s * s - 2 * s;
                return (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / dt;
            }
            case 2: {
                const double e00 = 12 * s - 6;
                const double e10 = 6 * s - 4;
                const double e01 = -12 * s + 6;
                const double e11 = 6 * s - 2;
                return (e00 * y0 + e10 * m0 + e01 * y1 + e11 * m1) / (dt * dt);
            }
            default: throw DomainError("HermitePath: derivative order out of range");
        }
    }

    Trajectory traj_;
    std::vector<Vector> deriv_;
};

}  // namespace otgeom::num
