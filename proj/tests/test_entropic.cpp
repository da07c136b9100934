// Entropic transport: the log-domain solver against independent references
// (independence coupling for zero cost, a one-parameter scan for two states),
// the shrinkage operator, and the induced divergence on the simplex.

#include "otgeom/entropic.hpp"
#include "otgeom/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace otgeom;
using Catch::Matchers::WithinAbs;

namespace {

Matrix three_state_metric() {
    Matrix C(3, 3);
    C << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    return C;
}

double entropy_term(const Vector& p) {
    double s = 0;
    for (int i = 0; i < p.size(); ++i) s += p[i] > 0 ? p[i] * std::log(p[i]) : 0.0;
    return s;
}

}  // namespace

TEST_CASE("problem validation", "[entropic]") {
    Matrix C = three_state_metric();
    REQUIRE_NOTHROW(cost::EntropicProblem(C, 1.0));
    C(1, 1) = 0.5;
    REQUIRE_THROWS_AS(cost::EntropicProblem(C, 1.0), ConstructionError);
    C = three_state_metric();
    C(0, 2) = -1.0;
    REQUIRE_THROWS_AS(cost::EntropicProblem(C, 1.0), ConstructionError);
    REQUIRE_THROWS_AS(cost::EntropicProblem(three_state_metric(), 0.0), ConstructionError);
    REQUIRE_THROWS_AS(cost::EntropicProblem(Matrix::Zero(1, 1), 1.0), ConstructionError);
}

TEST_CASE("zero cost reduces to the independence coupling", "[entropic]") {
    const cost::EntropicProblem prob(Matrix::Zero(3, 3), 0.7, 1e-13, 100000);
    Rng rng(11);
    for (int s = 0; s < 5; ++s) {
        const Vector p = rng.simplex_interior(3, 0.05), q = rng.simplex_interior(3, 0.05);
        const cost::SinkhornResult r = cost::sinkhorn_c_lambda(prob, p, q);
        // Optimal coupling is p q^T; the value is the sum of both entropies.
        REQUIRE_THAT((r.coupling.pi - p * q.transpose()).cwiseAbs().maxCoeff(),
                     WithinAbs(0, 1e-12));
        REQUIRE_THAT(r.value, WithinAbs(0.7 * (entropy_term(p) + entropy_term(q)), 1e-12));
    }
}

TEST_CASE("marginals are matched to solver tolerance", "[entropic]") {
    const cost::EntropicProblem prob(three_state_metric(), 1.0, 1e-13, 100000);
    Rng rng(23);
    for (int s = 0; s < 10; ++s) {
        const Vector p = rng.simplex_interior(3, 0.02), q = rng.simplex_interior(3, 0.02);
        const cost::SinkhornResult r = cost::sinkhorn_c_lambda(prob, p, q);
        REQUIRE(r.residual <= 1e-12);
        REQUIRE_THAT((r.coupling.pi.rowwise().sum() - p).cwiseAbs().maxCoeff(),
                     WithinAbs(0, 1e-12));
        REQUIRE_THAT((r.coupling.pi.colwise().sum().transpose() - q).cwiseAbs().maxCoeff(),
                     WithinAbs(0, 1e-12));
        REQUIRE(r.coupling.pi.minCoeff() > 0.0);
    }
}

TEST_CASE("two-state values match a brute-force scan", "[entropic]") {
    Matrix C(2, 2);
    C << 0, 1, 1, 0;
    const auto plogp = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
    Rng rng(31);
    for (double lam : {0.5, 1.0, 2.0}) {
        const cost::EntropicProblem prob(C, lam, 1e-13, 100000);
        for (int s = 0; s < 8; ++s) {
            const Vector p = rng.simplex_interior(2, 0.05), q = rng.simplex_interior(2, 0.05);
            const auto obj = [&](double a) {
                const double b = p[0] - a, c = q[0] - a, d = 1 - p[0] - q[0] + a;
                return b + c + lam * (plogp(a) + plogp(b) + plogp(c) + plogp(d));
            };
            const double lo = std::max(0.0, p[0] + q[0] - 1), hi = std::min(p[0], q[0]);
            double best = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= 20000; ++k)
                best = std::min(best, obj(lo + (hi - lo) * k / 20000.0));
            REQUIRE_THAT(cost::sinkhorn_c_lambda(prob, p, q).value, WithinAbs(best, 1e-6));
        }
    }
}

TEST_CASE("value agrees with the closed form at the shrinkage point", "[entropic]") {
    const cost::EntropicProblem prob(three_state_metric(), 1.3, 1e-13, 100000);
    Rng rng(43);
    for (int s = 0; s < 10; ++s) {
        const Vector p = rng.simplex_interior(3, 0.02);
        const Vector q = cost::shrinkage_closed_form(prob, p);
        REQUIRE_THAT(cost::sinkhorn_c_lambda(prob, p, q).value,
                     WithinAbs(cost::entropic_value_at_shrinkage(prob, p), 1e-10));
    }
}

TEST_CASE("shrinkage: kernel rows, closed form, and mirror descent", "[entropic]") {
    const cost::EntropicProblem prob(three_state_metric(), 1.0, 1e-13, 100000);
    const Matrix B = cost::shrinkage_kernel(prob);
    for (int i = 0; i < 3; ++i) REQUIRE_THAT(B.row(i).sum(), WithinAbs(1.0, 1e-14));
    REQUIRE(B.minCoeff() > 0.0);

    Rng rng(57);
    for (int s = 0; s < 5; ++s) {
        const Vector p = rng.simplex_interior(3, 0.05);
        const Vector closed = cost::shrinkage_closed_form(prob, p);
        REQUIRE_THAT(closed.sum(), WithinAbs(1.0, 1e-14));
        const Vector mirror = cost::shrinkage_map(prob, p, 1e-9);
        REQUIRE_THAT((mirror - closed).cwiseAbs().maxCoeff(), WithinAbs(0, 1e-6));
        // The closed form is the value minimizer over the second marginal.
        const double at_min = cost::sinkhorn_c_lambda(prob, p, closed).value;
        for (int k = 0; k < 5; ++k) {
            const Vector other = rng.simplex_interior(3, 0.02);
            REQUIRE(cost::sinkhorn_c_lambda(prob, p, other).value >= at_min - 1e-10);
        }
    }
}

TEST_CASE("induced divergence is nonnegative and vanishes at equality", "[entropic]") {
    const cost::EntropicProblem prob(three_state_metric(), 1.0, 1e-13, 100000);
    Rng rng(71);
    for (int s = 0; s < 20; ++s) {
        const Vector p = rng.simplex_interior(3, 0.02), q = rng.simplex_interior(3, 0.02);
        REQUIRE(cost::d_lambda(prob, p, q) >= -1e-10);
        REQUIRE(cost::d_lambda(prob, p, p) == 0.0);  // bit-exact by construction
    }
}

TEST_CASE("iteration cap raises a convergence error", "[entropic]") {
    const cost::EntropicProblem prob(three_state_metric(), 0.05, 1e-14, 3);
    Vector p(3), q(3);
    p << 0.90, 0.05, 0.05;
    q << 0.05, 0.05, 0.90;
    try {
        cost::sinkhorn_c_lambda(prob, p, q);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        REQUIRE(e.residual > 0.0);
    }
}

TEST_CASE("simplex embedding round trip", "[entropic]") {
    Vector chart(2);
    chart << 0.5, 0.3;
    const Vector full = cost::simplex_embed(chart);
    REQUIRE(full.size() == 3);
    REQUIRE_THAT(full.sum(), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(full[2], WithinAbs(0.2, 1e-15));
    REQUIRE_THAT((cost::simplex_chart(full) - chart).cwiseAbs().maxCoeff(), WithinAbs(0, 1e-15));
}
