#pragma once

// The analytic cost families: quadratic, logarithmic with parameter alpha,
// translation-invariant costs built from a strictly convex field, and costs
// wrapping a user-supplied divergence. All but the last carry exact partials
// of every order the toolkit queries.

#include "otgeom/cost.hpp"

#include <functional>
#include <utility>

namespace otgeom::cost {

// ---------------------------------------------------------------------------
// Quadratic cost c(p, q) = 1/2 |p - q|^2
// ---------------------------------------------------------------------------

class QuadraticCost final : public CostModel {
public:
    explicit QuadraticCost(int n) : n_(n) {
        if (n < 1) throw ConstructionError("QuadraticCost: dimension must be >= 1");
    }

    int dim() const override { return n_; }
    std::string name() const override { return "quadratic"; }
    bool has_exact_partials() const override { return true; }

    double value(const Vector& xi, const Vector& eta) const override {
        check_point(xi, eta);
        return 0.5 * (xi - eta).squaredNorm();
    }

    double partial(const Vector& xi, const Vector& eta, std::span<const int> primal,
                   std::span<const int> dual) const override {
        check_point(xi, eta);
        const std::size_t total = primal.size() + dual.size();
        if (total == 0) return value(xi, eta);
        const Vector z = xi - eta;
        if (total == 1) {
            if (primal.size() == 1) return z[primal[0]];
            return -z[dual[0]];
        }
        if (total == 2) {
            const int i = primal.size() > 0 ? primal[0] : dual[0];
            const int j = primal.size() > 1 ? primal[1] : dual[dual.size() - 1];
            const double sign = (primal.size() == 1) ? -1.0 : 1.0;  // one slot of each kind
            return (i == j) ? sign : 0.0;
        }
        return 0.0;  // polynomial of degree two
    }

private:
    int n_;
};

// ---------------------------------------------------------------------------
// Logarithmic cost c(p, q) = (1/alpha) log(1 + alpha p.q) on (0,inf)^n x (0,inf)^n
// ---------------------------------------------------------------------------

class LogCost final : public CostModel {
public:
    LogCost(int n, double alpha) : n_(n), alpha_(alpha) {
        if (n < 1) throw ConstructionError("LogCost: dimension must be >= 1");
        if (!(alpha > 0)) throw ConstructionError("LogCost: alpha must be positive");
    }

    int dim() const override { return n_; }
    std::string name() const override { return "log"; }
    double alpha() const { return alpha_; }
    bool has_exact_partials() const override { return true; }

    bool in_domain(const Vector& xi, const Vector& eta) const override {
        return CostModel::in_domain(xi, eta) && (xi.array() > 0).all() && (eta.array() > 0).all();
    }

    double value(const Vector& xi, const Vector& eta) const override {
        check_point(xi, eta);
        return std::log1p(alpha_ * xi.dot(eta)) / alpha_;
    }

    // The inner product s = p.q is bilinear, so by the chain rule a mixed
    // partial is a sum over partial matchings between primal and dual slots:
    // matched pairs contribute a Kronecker delta, unmatched primal slot i a
    // factor q_i, unmatched dual slot j a factor p_j, and the outer function
    // g(s) = log(1 + alpha s)/alpha differentiates to
    // g^(k) = (-1)^(k-1) (k-1)! alpha^(k-1) / (1 + alpha s)^k.
    double partial(const Vector& xi, const Vector& eta, std::span<const int> primal,
                   std::span<const int> dual) const override {
        check_point(xi, eta);
        const double u = 1.0 + alpha_ * xi.dot(eta);
        const std::size_t a = primal.size(), b = dual.size();
        if (a + b == 0) return std::log(u) / alpha_;

        auto g_deriv = [&](std::size_t k) {
            double fact = 1.0, apow = 1.0;
            for (std::size_t m = 1; m + 1 <= k; ++m) fact *= static_cast<double>(m);
            for (std::size_t m = 1; m + 1 <= k; ++m) apow *= alpha_;
            const double sign = (k % 2 == 0) ? -1.0 : 1.0;
            return sign * fact * apow / std::pow(u, static_cast<double>(k));
        };

        double total = 0.0;
        std::vector<bool> dual_used(b, false);
        // Recurse over primal slots; each is matched to an unused dual slot
        // (delta factor) or left unmatched (factor q_i).
        std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t slot,
                                                                        std::size_t matched,
                                                                        double factor) {
            if (slot == a) {
                double term = factor;
                for (std::size_t j = 0; j < b; ++j)
                    if (!dual_used[j]) term *= xi[dual[j]];
                total += term * g_deriv(a + b - matched);
                return;
            }
            rec(slot + 1, matched, factor * eta[primal[slot]]);  // unmatched primal slot
            for (std::size_t j = 0; j < b; ++j) {
                if (dual_used[j] || primal[slot] != dual[j]) continue;
                dual_used[j] = true;
                rec(slot + 1, matched + 1, factor);
                dual_used[j] = false;
            }
        };
        rec(0, 0, 1.0);
        return total;
    }

private:
    int n_;
    double alpha_;
};

// ---------------------------------------------------------------------------
// Translation-invariant cost c(p, q) = Psi(p - q), Psi strictly convex
// ---------------------------------------------------------------------------

// A scalar field with exact partials by multi-index, used as the profile of a
// translation-invariant cost.
class ConvexField {
public:
    virtual ~ConvexField() = default;
    virtual std::string name() const = 0;
    virtual double partial(const Vector& z, std::span<const int> idx) const = 0;
    double operator()(const Vector& z) const { return partial(z, {}); }
};

// Psi(z) = 1/2 |z|^2 — reduces the translation cost to the quadratic cost.
class HalfSquareField final : public ConvexField {
public:
    std::string name() const override { return "half_square"; }
    double partial(const Vector& z, std::span<const int> idx) const override {
        switch (idx.size()) {
            case 0: return 0.5 * z.squaredNorm();
            case 1: return z[idx[0]];
            case 2: return idx[0] == idx[1] ? 1.0 : 0.0;
            default: return 0.0;
        }
    }
};

// Psi(z) = sum_i cosh(z_i) — separable, all derivative orders available.
class CoshField final : public ConvexField {
public:
    std::string name() const override { return "cosh"; }
    double partial(const Vector& z, std::span<const int> idx) const override {
        if (idx.empty()) {
            double s = 0.0;
            for (int i = 0; i < z.size(); ++i) s += std::cosh(z[i]);
            return s;
        }
        for (std::size_t k = 1; k < idx.size(); ++k)
            if (idx[k] != idx[0]) return 0.0;  // separable field
        const double x = z[idx[0]];
        return (idx.size() % 2 == 0) ? std::cosh(x) : std::sinh(x);
    }
};

// Psi(z) = 1/4 |z|^4 + 1/2 |z|^2 — polynomial with non-constant Hessian.
class QuarticField final : public ConvexField {
public:
    std::string name() const override { return "quartic"; }
    double partial(const Vector& z, std::span<const int> idx) const override {
        const double r = z.squaredNorm();
        auto delta = [&](std::size_t u, std::size_t v) { return idx[u] == idx[v] ? 1.0 : 0.0; };
        switch (idx.size()) {
            case 0: return 0.25 * r * r + 0.5 * r;
            case 1: return (r + 1.0) * z[idx[0]];
            case 2: return 2.0 * z[idx[0]] * z[idx[1]] + (r + 1.0) * delta(0, 1);
            case 3:
                return 2.0 * (delta(1, 2) * z[idx[0]] + delta(0, 2) * z[idx[1]] +
                              delta(0, 1) * z[idx[2]]);
            case 4:
                return 2.0 * (delta(0, 1) * delta(2, 3) + delta(0, 2) * delta(1, 3) +
                              delta(0, 3) * delta(1, 2));
            default: return 0.0;
        }
    }
};

class ConvexTranslationCost final : public CostModel {
public:
    ConvexTranslationCost(int n, std::shared_ptr<const ConvexField> field)
        : n_(n), field_(std::move(field)) {
        if (n < 1) throw ConstructionError("ConvexTranslationCost: dimension must be >= 1");
        if (!field_) throw ConstructionError("ConvexTranslationCost: null field");
    }

    int dim() const override { return n_; }
    std::string name() const override { return "convex_" + field_->name(); }
    bool has_exact_partials() const override { return true; }

    double value(const Vector& xi, const Vector& eta) const override {
        check_point(xi, eta);
        return field_->partial(xi - eta, {});
    }

    // Each dual-slot derivative of Psi(p - q) contributes a factor -1.
    double partial(const Vector& xi, const Vector& eta, std::span<const int> primal,
                   std::span<const int> dual) const override {
        check_point(xi, eta);
        std::vector<int> idx(primal.begin(), primal.end());
        idx.insert(idx.end(), dual.begin(), dual.end());
        const double sign = (dual.size() % 2 == 0) ? 1.0 : -1.0;
        return sign * field_->partial(xi - eta, idx);
    }

private:
    int n_;
    std::shared_ptr<const ConvexField> field_;
};

// ---------------------------------------------------------------------------
// A divergence on M x M used directly as a cost
// ---------------------------------------------------------------------------

using ScalarPairFn = std::function<double(const Vector&, const Vector&)>;
// Optional exact-partial hook: (x, x', primal idx, dual idx) -> value.
using PartialPairFn =
    std::function<double(const Vector&, const Vector&, std::span<const int>, std::span<const int>)>;

class DivergenceCost final : public CostModel {
public:
    // Validates the divergence axioms by sampling a grid over [lo, hi]^2:
    // nonnegative everywhere, zero on the diagonal.
    DivergenceCost(int n, ScalarPairFn divergence, const Vector& lo, const Vector& hi,
                   int grid_per_axis = 5, PartialPairFn exact_partial = nullptr)
        : n_(n), fn_(std::move(divergence)), lo_(lo), hi_(hi),
          exact_partial_(std::move(exact_partial)) {
        if (n < 1) throw ConstructionError("DivergenceCost: dimension must be >= 1");
        if (lo.size() != n || hi.size() != n)
            throw ConstructionError("DivergenceCost: sample box dimension mismatch");
        std::vector<Vector> grid;
        const int g = std::max(2, grid_per_axis);
        std::function<void(int, Vector&)> build = [&](int axis, Vector& x) {
            if (axis == n_) {
                grid.push_back(x);
                return;
            }
            for (int k = 0; k < g; ++k) {
                x[axis] = lo_[axis] + (hi_[axis] - lo_[axis]) * k / (g - 1.0);
                build(axis + 1, x);
            }
        };
        Vector x(n_);
        build(0, x);
        for (const Vector& a : grid) {
            if (std::abs(fn_(a, a)) > 1e-12)
                throw ConstructionError("DivergenceCost: nonzero on the diagonal");
            for (const Vector& b : grid)
                if (fn_(a, b) < -1e-12)
                    throw ConstructionError("DivergenceCost: negative value sampled");
        }
    }

    int dim() const override { return n_; }
    std::string name() const override { return "divergence_cost"; }
    bool has_exact_partials() const override { return exact_partial_ != nullptr; }

    double value(const Vector& xi, const Vector& eta) const override {
        check_point(xi, eta);
        return fn_(xi, eta);
    }

    double partial(const Vector& xi, const Vector& eta, std::span<const int> primal,
                   std::span<const int> dual) const override {
        if (exact_partial_) {
            check_point(xi, eta);
            return exact_partial_(xi, eta, primal, dual);
        }
        return CostModel::partial(xi, eta, primal, dual);
    }

private:
    int n_;
    ScalarPairFn fn_;
    Vector lo_, hi_;
    PartialPairFn exact_partial_;
};

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

inline CostPtr quadratic_cost(int n) { return std::make_shared<QuadraticCost>(n); }

inline CostPtr log_cost(int n, double alpha) { return std::make_shared<LogCost>(n, alpha); }

inline CostPtr convex_translation_cost(int n, std::shared_ptr<const ConvexField> field) {
    return std::make_shared<ConvexTranslationCost>(n, std::move(field));
}

inline CostPtr divergence_as_cost(int n, ScalarPairFn divergence, const Vector& lo,
                                  const Vector& hi, int grid_per_axis = 5,
                                  PartialPairFn exact_partial = nullptr) {
    return std::make_shared<DivergenceCost>(n, std::move(divergence), lo, hi, grid_per_axis,
                                            std::move(exact_partial));
}

}  // namespace otgeom::cost
