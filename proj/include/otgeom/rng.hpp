#pragma once

// Deterministic random sampling. Distribution mapping is done by hand (not via
// std::uniform_real_distribution) so that a fixed seed yields the same stream
// on every standard library, which the reproducible-report contract needs.

#include "otgeom/core.hpp"

#include <cstdint>
#include <random>

namespace otgeom {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller (deterministic, portable).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    Vector uniform_vector(const Vector& lo, const Vector& hi) {
        Vector v(lo.size());
        for (int i = 0; i < v.size(); ++i) v[i] = uniform(lo[i], hi[i]);
        return v;
    }

    Vector uniform_vector(int n, double a, double b) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(a, b);
        return v;
    }

    // Direction vector of unit Euclidean norm.
    Vector direction(int n) {
        Vector v(n);
        double norm2 = 0.0;
        do {
            for (int i = 0; i < n; ++i) v[i] = normal();
            norm2 = v.squaredNorm();
        } while (norm2 < 1e-12);
        return v / std::sqrt(norm2);
    }

    // Strictly positive probability vector of length m (interior of the
    // simplex), with every coordinate at least margin.
    Vector simplex_interior(int m, double margin = 0.05) {
        Vector v(m);
        for (int i = 0; i < m; ++i) v[i] = margin + uniform01();
        return v / v.sum();
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace otgeom
