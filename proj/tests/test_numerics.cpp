// Numerical substrate: eigen/signature helpers, finite differences,
// quadrature, the RK4 integrator with Hermite sampling, and the shooting
// solver. Reference values are independent closed forms.

#include "otgeom/finite_diff.hpp"
#include "otgeom/ode.hpp"
#include "otgeom/quadrature.hpp"
#include "otgeom/rng.hpp"
#include "otgeom/shooting.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace otgeom;
using Catch::Matchers::WithinAbs;

TEST_CASE("symmetric eigenvalues and signature", "[numerics]") {
    SECTION("split block matrix has balanced spectrum") {
        // h = -1/2 [[0, A], [A^T, 0]] with A = I_2: eigenvalues +-1/2 twice.
        Matrix h = Matrix::Zero(4, 4);
        h.block(0, 2, 2, 2) = -0.5 * Matrix::Identity(2, 2);
        h.block(2, 0, 2, 2) = -0.5 * Matrix::Identity(2, 2);
        const Vector ev = num::symmetric_eigenvalues(h);
        REQUIRE_THAT(ev[0], WithinAbs(-0.5, 1e-14));
        REQUIRE_THAT(ev[1], WithinAbs(-0.5, 1e-14));
        REQUIRE_THAT(ev[2], WithinAbs(0.5, 1e-14));
        REQUIRE_THAT(ev[3], WithinAbs(0.5, 1e-14));
        const auto sig = num::signature(h);
        REQUIRE(sig.first == 2);
        REQUIRE(sig.second == 2);
    }
    SECTION("tiny eigenvalues are treated as zero") {
        Matrix m = Vector::Zero(3).asDiagonal();
        m(0, 0) = 2.0;
        m(1, 1) = -3.0;
        m(2, 2) = 1e-20;
        const auto sig = num::signature(m);
        REQUIRE(sig.first == 1);
        REQUIRE(sig.second == 1);
    }
    SECTION("asymmetric input is rejected") {
        Matrix m(2, 2);
        m << 0, 1, 0, 0;
        REQUIRE_THROWS_AS(num::symmetric_eigenvalues(m), DomainError);
    }
}

TEST_CASE("guarded linear algebra", "[numerics]") {
    Matrix a(2, 2);
    a << 4, 1, 1, 3;
    const Matrix inv = num::inverse_guarded(a, 1e12, "test matrix");
    REQUIRE_THAT((a * inv - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), WithinAbs(0, 1e-14));
    Vector b(2);
    b << 1, 2;
    const Vector x = num::solve_guarded(a, b, 1e12, "test solve");
    REQUIRE_THAT((a * x - b).cwiseAbs().maxCoeff(), WithinAbs(0, 1e-14));

    Matrix sing(2, 2);
    sing << 1, 1, 1, 1 + 1e-15;
    REQUIRE_THROWS_AS(num::inverse_guarded(sing, 1e12, "singular"), DegeneracyError);
}

TEST_CASE("central differences recover polynomial partials", "[numerics]") {
    // f(z) = z0^2 z1 + z1^3: every requested partial has a closed form.
    const auto f = [](const Vector& z) { return z[0] * z[0] * z[1] + z[1] * z[1] * z[1]; };
    Vector at(2);
    at << 1.0, 2.0;
    const std::vector<int> c0 = {0}, c01 = {0, 1}, c001 = {0, 0, 1}, c1111 = {1, 1, 1, 1};
    REQUIRE_THAT(num::central_fd(f, at, c0), WithinAbs(4.0, 1e-8));         // 2 z0 z1
    REQUIRE_THAT(num::central_fd(f, at, c01), WithinAbs(2.0, 1e-7));        // 2 z0
    REQUIRE_THAT(num::central_fd(f, at, c001), WithinAbs(2.0, 1e-5));       // constant
    REQUIRE_THAT(num::central_fd(f, at, c1111), WithinAbs(0.0, 1e-3));      // cubic term dies
    const std::vector<int> c11 = {1, 1};
    REQUIRE_THAT(num::central_fd(f, at, c11), WithinAbs(12.0, 1e-5));       // 6 z1

    const auto g = [](const Vector& xi, const Vector& eta) { return xi.dot(eta); };
    Vector xi(1), eta(1);
    xi << 0.7;
    eta << -0.3;
    const std::vector<int> p = {0}, d = {0};
    REQUIRE_THAT(num::central_fd_product(g, xi, eta, p, d), WithinAbs(1.0, 1e-9));
}

TEST_CASE("quadrature rules", "[numerics]") {
    REQUIRE_THAT(num::integrate_1d([](double x) { return x * x; }, 0, 1, 8),
                 WithinAbs(1.0 / 3.0, 1e-14));
    REQUIRE_THAT(num::integrate_1d([](double x) { return std::cos(x); }, 0, 1.5707963267948966, 16),
                 WithinAbs(1.0, 1e-13));
    // Triangle 0 <= s <= t <= 1: area 1/2, and the moment of s t is 1/8.
    REQUIRE_THAT(num::quadrature_triangle([](double, double) { return 1.0; }, 1.0, 8),
                 WithinAbs(0.5, 1e-13));
    REQUIRE_THAT(num::quadrature_triangle([](double s, double t) { return s * t; }, 1.0, 8),
                 WithinAbs(0.125, 1e-13));
}

TEST_CASE("RK4 integration and Hermite sampling", "[numerics]") {
    const num::OdeRhs rhs = [](double, const Vector& y) { return y; };
    Vector y0(1);
    y0 << 1.0;
    const num::Trajectory tr = num::integrate_ode(rhs, y0, 0.0, 1.0, 128);
    REQUIRE(tr.completed);
    REQUIRE_THAT(tr.y.back()[0], WithinAbs(std::exp(1.0), 1e-9));

    SECTION("the integrator converges at fourth order") {
        const auto err = [&](int steps) {
            return std::abs(num::integrate_ode(rhs, y0, 0.0, 1.0, steps).y.back()[0] -
                            std::exp(1.0));
        };
        const double order = std::log2(err(16) / err(32));
        REQUIRE(order > 3.8);
        REQUIRE(order < 4.3);
    }

    SECTION("Hermite interpolation matches value and two derivatives") {
        // y'' = -y as a first-order system; y(t) = sin t in the first slot.
        const num::OdeRhs osc = [](double, const Vector& y) {
            Vector dy(2);
            dy << y[1], -y[0];
            return dy;
        };
        Vector start(2);
        start << 0.0, 1.0;
        const num::HermitePath path(num::integrate_ode(osc, start, 0.0, 3.0, 256), osc);
        for (double t : {0.3, 1.1, 2.7}) {
            REQUIRE_THAT(path.value(t)[0], WithinAbs(std::sin(t), 1e-9));
            REQUIRE_THAT(path.derivative(t)[0], WithinAbs(std::cos(t), 1e-7));
            REQUIRE_THAT(path.second_derivative(t)[0], WithinAbs(-std::sin(t), 1e-5));
        }
    }

    SECTION("domain guards stop the trajectory") {
        const num::Trajectory clipped = num::integrate_ode(
            rhs, y0, 0.0, 1.0, 128, [](const Vector& y) { return y[0] < 2.0; });
        REQUIRE_FALSE(clipped.completed);
        REQUIRE(clipped.t_last < 1.0);
    }
}

TEST_CASE("shooting solver", "[numerics]") {
    SECTION("affine endpoint map converges immediately") {
        const num::EndpointMap endpoint = [](const Vector& start, const Vector& v) {
            return (start + v).eval();
        };
        Vector start(2), target(2);
        start << 1.0, -1.0;
        target << 0.25, 0.75;
        const Vector v = num::shoot_bvp(endpoint, start, target, 1e-12);
        REQUIRE_THAT((start + v - target).cwiseAbs().maxCoeff(), WithinAbs(0, 1e-12));
    }
    SECTION("exponential endpoint map against a bisection oracle") {
        const num::EndpointMap endpoint = [](const Vector& start, const Vector& v) {
            return (start.array() * v.array().exp()).matrix().eval();
        };
        Vector start(1), target(1);
        start << 1.0;
        target << 2.0;
        const Vector v = num::shoot_bvp(endpoint, start, target, 1e-12);
        // Independent oracle: solve e^w = 2 by bisection.
        double lo = 0.0, hi = 2.0;
        for (int k = 0; k < 80; ++k) {
            const double mid = 0.5 * (lo + hi);
            (std::exp(mid) < 2.0 ? lo : hi) = mid;
        }
        REQUIRE_THAT(v[0], WithinAbs(0.5 * (lo + hi), 1e-10));
        REQUIRE_THAT(v[0], WithinAbs(std::log(2.0), 1e-10));
    }
}

TEST_CASE("random sampling helpers", "[numerics]") {
    Rng a(7), b(7), c(8);
    REQUIRE(a.uniform01() == b.uniform01());
    REQUIRE(a.raw() == b.raw());
    REQUIRE(a.uniform01() != c.uniform01());

    Rng rng(123);
    const Vector dir = rng.direction(5);
    REQUIRE_THAT(dir.norm(), WithinAbs(1.0, 1e-12));
    const Vector s = rng.simplex_interior(4, 0.05);
    REQUIRE_THAT(s.sum(), WithinAbs(1.0, 1e-12));
    REQUIRE(s.minCoeff() > 0.0);
    for (int k = 0; k < 50; ++k) {
        const double x = rng.uniform(-2.0, 3.0);
        REQUIRE(x >= -2.0);
        REQUIRE(x <= 3.0);
    }
}

TEST_CASE("coefficient containers index symmetrically stored data", "[numerics]") {
    Rank3Coefficients r3(2, {Slot::primal, Slot::primal, Slot::dual});
    r3(0, 1, 1) = 2.5;
    REQUIRE(r3(0, 1, 1) == 2.5);
    REQUIRE(r3(1, 1, 1) == 0.0);
    Rank4Coefficients r4(3, {Slot::primal, Slot::dual, Slot::dual, Slot::primal});
    r4(2, 0, 1, 2) = -1.25;
    REQUIRE(r4(2, 0, 1, 2) == -1.25);
}
