#pragma once

// Charts on the graph of an optimal map: a cost, a forward map f from the
// primal domain into the dual one, its inverse and exact Jacobian, and a
// Kantorovich potential pair (phi, psi) that is tight exactly on the graph
// {(p, f(p))}. The induced divergence D[p : p'] = c(p, f(p')) - phi(p) -
// psi(f(p')) is nonnegative with equality iff p = p'.

#include "otgeom/costs_basic.hpp"
#include "otgeom/entropic.hpp"
#include "otgeom/rng.hpp"

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace otgeom::graph {

using cost::CostModel;
using cost::CostPtr;

class GraphChart {
public:
    virtual ~GraphChart() = default;

    virtual int dim() const = 0;
    virtual std::string name() const = 0;
    virtual const CostModel& cost_model() const = 0;
    virtual Vector forward(const Vector& xi) const = 0;   // eta = f(xi)
    virtual Vector inverse(const Vector& eta) const = 0;  // f^{-1}(eta)
    virtual Matrix jacobian(const Vector& xi) const = 0;  // d eta / d xi, exact
    virtual double phi(const Vector& xi) const = 0;
    virtual double psi(const Vector& eta) const = 0;
    virtual bool in_primal_domain(const Vector& xi) const = 0;
    virtual Vector sample_primal(Rng& rng) const = 0;
    virtual Vector sample_dual(Rng& rng) const = 0;

    // Tangent lift onto the graph: u on the base goes to (u, J u).
    TangentPair lift(const Vector& xi, const Vector& u) const {
        return TangentPair{u, jacobian(xi) * u};
    }
};

using ChartPtr = std::shared_ptr<const GraphChart>;

// Factor injections and projections for product tangents.
inline TangentPair iota_primal(const Vector& u) {
    return {u, Vector::Zero(u.size())};
}
inline TangentPair iota_dual(const Vector& v) {
    return {Vector::Zero(v.size()), v};
}
inline TangentPair iota_split(const Vector& u, const Vector& v) { return {u, v}; }
inline const Vector& project_pi0(const TangentPair& w) { return w.a; }
inline const Vector& project_pi1(const TangentPair& w) { return w.b; }

// Potential transform at a dual point, through an explicit inverse map:
// psi(q) = c(f^{-1}(q), q) - phi(f^{-1}(q)). When phi is the tight primal
// potential of the graph of f, this is the matching dual potential.
inline double c_transform(const CostModel& c, const std::function<double(const Vector&)>& phi,
                          const std::function<Vector(const Vector&)>& inverse_map,
                          const Vector& eta) {
    const Vector xi = inverse_map(eta);
    return c.value(xi, eta) - phi(xi);
}

// The divergence a chart induces.
inline double c_divergence(const GraphChart& chart, const Vector& p, const Vector& pprime) {
    const Vector q = chart.forward(pprime);
    return chart.cost_model().value(p, q) - chart.phi(p) - chart.psi(q);
}

// |D[p:p'] + D[p':p] - delta((p,f(p)), (p',f(p')))|: the symmetrized
// divergence is the cross-difference of the lifted points.
inline double symmetrization_identity(const GraphChart& chart, const Vector& p,
                                      const Vector& pprime) {
    const CostModel& c = chart.cost_model();
    const Vector q = chart.forward(p), qp = chart.forward(pprime);
    const double delta =
        c.value(p, qp) + c.value(pprime, q) - c.value(p, q) - c.value(pprime, qp);
    return std::abs(c_divergence(chart, p, pprime) + c_divergence(chart, pprime, p) - delta);
}

// |D[p:p'] + D[p':p''] - D[p:p''] + delta((p, f(p')), (p', f(p'')))|: the
// generalized cosine law, with the correction term an off-graph
// cross-difference.
inline double three_point_identity(const GraphChart& chart, const Vector& p,
                                   const Vector& pprime, const Vector& psecond) {
    const CostModel& c = chart.cost_model();
    const Vector qp = chart.forward(pprime), qs = chart.forward(psecond);
    const double delta = c.value(p, qs) + c.value(pprime, qp) - c.value(p, qp) -
                         c.value(pprime, qs);
    return std::abs(c_divergence(chart, p, pprime) + c_divergence(chart, pprime, psecond) -
                    c_divergence(chart, p, psecond) + delta);
}

// Construction-time health report for a chart, from random sampling.
struct ChartValidation {
    double max_on_graph_residual = 0;   // |c(p,f(p)) - phi(p) - psi(f(p))|
    double min_fenchel_gap = 0;         // min of c(p,q) - phi(p) - psi(q), off graph
    double max_roundtrip_error = 0;     // |f^{-1}(f(p)) - p|
    double max_jacobian_fd_error = 0;   // exact J vs finite differences
    double max_jacobian_cond = 0;
    double min_metric_eigenvalue = 0;   // restriction g = -A J must be SPD
    bool ok = false;
};

inline ChartValidation validate_chart(const GraphChart& chart, Rng& rng, int samples = 40) {
    ChartValidation v;
    v.min_fenchel_gap = std::numeric_limits<double>::infinity();
    v.min_metric_eigenvalue = std::numeric_limits<double>::infinity();
    const CostModel& c = chart.cost_model();
    const int n = chart.dim();
    for (int s = 0; s < samples; ++s) {
        const Vector p = chart.sample_primal(rng);
        const Vector q = chart.forward(p);
        v.max_on_graph_residual = std::max(
            v.max_on_graph_residual, std::abs(c.value(p, q) - chart.phi(p) - chart.psi(q)));
        v.max_roundtrip_error = std::max(v.max_roundtrip_error, (chart.inverse(q) - p).norm());

        const Vector q_rand = chart.sample_dual(rng);
        v.min_fenchel_gap = std::min(
            v.min_fenchel_gap, c.value(p, q_rand) - chart.phi(p) - chart.psi(q_rand));

        const Matrix J = chart.jacobian(p);
        Matrix Jfd(n, n);
        const double h = std::max(c.fd_scheme(1).step, 1e-6);
        for (int j = 0; j < n; ++j) {
            Vector pp = p, pm = p;
            pp[j] += h;
            pm[j] -= h;
            Jfd.col(j) = (chart.forward(pp) - chart.forward(pm)) / (2 * h);
        }
        v.max_jacobian_fd_error = std::max(v.max_jacobian_fd_error, (J - Jfd).cwiseAbs().maxCoeff());

        const Eigen::JacobiSVD<Matrix> svd(J);
        const double smin = svd.singularValues().minCoeff();
        v.max_jacobian_cond =
            std::max(v.max_jacobian_cond,
                     smin > 0 ? svd.singularValues().maxCoeff() / smin
                              : std::numeric_limits<double>::infinity());

        const Matrix g = -c.mixed_matrix(p, q) * J;
        const Matrix gs = 0.5 * (g + g.transpose());
        v.min_metric_eigenvalue =
            std::min(v.min_metric_eigenvalue, num::symmetric_eigenvalues(gs).minCoeff());
    }
    v.ok = v.max_on_graph_residual <= 1e-8 && v.min_fenchel_gap >= -1e-9 &&
           v.max_roundtrip_error <= 1e-8 && v.max_jacobian_cond < 1e8 &&
           v.min_metric_eigenvalue > 0;
    return v;
}

// ---------------------------------------------------------------------------
// Quadratic-cost charts: f is the gradient of a smooth strictly convex
// generator F; phi(p) = |p|^2/2 - F(p) and psi(q) = |q|^2/2 - F*(q) are the
// tight pair, and D becomes the Bregman divergence of F.
// ---------------------------------------------------------------------------

struct ConvexGenerator {
    std::string name;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<Matrix(const Vector&)> hessian;
    std::function<Vector(const Vector&)> gradient_inverse;
    std::function<double(const Vector&)> conjugate;  // F*(q)
    std::function<bool(const Vector&)> dual_domain;  // where F* is finite
    std::function<Vector(Rng&)> sample_primal;
    std::function<Vector(Rng&)> sample_dual;
    int n = 0;
};

class QuadraticChart final : public GraphChart {
public:
    explicit QuadraticChart(ConvexGenerator gen)
        : gen_(std::move(gen)), cost_(cost::quadratic_cost(gen_.n)) {}

    int dim() const override { return gen_.n; }
    std::string name() const override { return "quadratic/" + gen_.name; }
    const CostModel& cost_model() const override { return *cost_; }
    Vector forward(const Vector& xi) const override { return gen_.gradient(xi); }
    Vector inverse(const Vector& eta) const override { return gen_.gradient_inverse(eta); }
    Matrix jacobian(const Vector& xi) const override { return gen_.hessian(xi); }
    double phi(const Vector& xi) const override { return 0.5 * xi.squaredNorm() - gen_.value(xi); }
    double psi(const Vector& eta) const override {
        return 0.5 * eta.squaredNorm() - gen_.conjugate(eta);
    }
    bool in_primal_domain(const Vector& xi) const override {
        return xi.size() == gen_.n && xi.allFinite();
    }
    Vector sample_primal(Rng& rng) const override { return gen_.sample_primal(rng); }
    Vector sample_dual(Rng& rng) const override { return gen_.sample_dual(rng); }

private:
    ConvexGenerator gen_;
    CostPtr cost_;
};

inline ConvexGenerator half_square_generator(int n) {
    ConvexGenerator g;
    g.n = n;
    g.name = "half-square";
    g.value = [](const Vector& p) { return 0.5 * p.squaredNorm(); };
    g.gradient = [](const Vector& p) { return p; };
    g.hessian = [n](const Vector&) { return Matrix::Identity(n, n); };
    g.gradient_inverse = [](const Vector& q) { return q; };
    g.conjugate = [](const Vector& q) { return 0.5 * q.squaredNorm(); };
    g.dual_domain = [](const Vector&) { return true; };
    g.sample_primal = [n](Rng& r) { return r.uniform_vector(n, -2.0, 2.0); };
    g.sample_dual = [n](Rng& r) { return r.uniform_vector(n, -2.0, 2.0); };
    return g;
}

inline ConvexGenerator spd_generator(Matrix A) {
    ConvexGenerator g;
    const int n = static_cast<int>(A.rows());
    if (A.rows() != A.cols() || num::symmetric_eigenvalues(0.5 * (A + A.transpose())).minCoeff() <= 0)
        throw ConstructionError("spd_generator: matrix must be symmetric positive definite");
    const Matrix Ainv = num::inverse_guarded(A, 1e12, "spd generator matrix");
    g.n = n;
    g.name = "spd";
    g.value = [A](const Vector& p) { return 0.5 * p.dot(A * p); };
    g.gradient = [A](const Vector& p) { return Vector(A * p); };
    g.hessian = [A](const Vector&) { return A; };
    g.gradient_inverse = [Ainv](const Vector& q) { return Vector(Ainv * q); };
    g.conjugate = [Ainv](const Vector& q) { return 0.5 * q.dot(Ainv * q); };
    g.dual_domain = [](const Vector&) { return true; };
    g.sample_primal = [n](Rng& r) { return r.uniform_vector(n, -2.0, 2.0); };
    g.sample_dual = [n](Rng& r) { return r.uniform_vector(n, -2.0, 2.0); };
    return g;
}

// F(p) = log(1 + sum_i e^{p_i}); the gradient fills the open "corner of the
// simplex" {q > 0, sum q < 1} and the conjugate is the entropy of the
// completed distribution.
inline ConvexGenerator log_sum_exp_generator(int n) {
    ConvexGenerator g;
    g.n = n;
    g.name = "log-sum-exp";
    const auto soft = [](const Vector& p) {
        const double m = std::max(0.0, p.maxCoeff());
        const double z = std::exp(-m) + (p.array() - m).exp().sum();
        return Vector(((p.array() - m).exp() / z).matrix());
    };
    g.value = [](const Vector& p) {
        const double m = std::max(0.0, p.maxCoeff());
        return m + std::log(std::exp(-m) + (p.array() - m).exp().sum());
    };
    g.gradient = soft;
    g.hessian = [soft](const Vector& p) {
        const Vector s = soft(p);
        return Matrix(Matrix(s.asDiagonal()) - s * s.transpose());
    };
    g.gradient_inverse = [](const Vector& q) {
        const double rest = 1.0 - q.sum();
        if (!(q.array() > 0).all() || !(rest > 0))
            throw DomainError("log-sum-exp inverse: point outside the open corner");
        return Vector((q.array() / rest).log().matrix());
    };
    g.conjugate = [](const Vector& q) {
        const double rest = 1.0 - q.sum();
        if (!(q.array() > 0).all() || !(rest > 0))
            throw DomainError("log-sum-exp conjugate: point outside the open corner");
        return (q.array() * q.array().log()).sum() + rest * std::log(rest);
    };
    g.dual_domain = [](const Vector& q) {
        return (q.array() > 0).all() && q.sum() < 1.0;
    };
    g.sample_primal = [n](Rng& r) { return r.uniform_vector(n, -2.0, 2.0); };
    g.sample_dual = [n](Rng& r) {
        Vector full = r.simplex_interior(n + 1, 0.05);
        return Vector(full.head(n));
    };
    return g;
}

// ---------------------------------------------------------------------------
// Log-cost charts: f(p)_i = tau / p_i with tau = s / (alpha (1 - s n)),
// phi = (s/alpha) sum log p_i + kappa; the matching dual potential has the
// same shape. Strictly positive orthant on both sides.
// ---------------------------------------------------------------------------

class LogChart final : public GraphChart {
public:
    LogChart(int n, double alpha, double s, double kappa, double lo = 0.4, double hi = 2.5)
        : n_(n), alpha_(alpha), s_(s), kappa_(kappa), lo_(lo), hi_(hi),
          cost_(cost::log_cost(n, alpha)) {
        if (!(s > 0) || !(s * n < 1))
            throw ConstructionError("LogChart: need 0 < s and s*n < 1");
        tau_ = s / (alpha * (1.0 - s * n));
        kappa_dual_ = std::log1p(alpha * n * tau_) / alpha - (s * n / alpha) * std::log(tau_) -
                      kappa;
    }

    int dim() const override { return n_; }
    std::string name() const override { return "log/n" + std::to_string(n_); }
    const CostModel& cost_model() const override { return *cost_; }
    Vector forward(const Vector& xi) const override { return Vector(tau_ / xi.array()); }
    Vector inverse(const Vector& eta) const override { return Vector(tau_ / eta.array()); }
    Matrix jacobian(const Vector& xi) const override {
        return Matrix(Vector(-tau_ / xi.array().square()).asDiagonal());
    }
    double phi(const Vector& xi) const override {
        return (s_ / alpha_) * xi.array().log().sum() + kappa_;
    }
    double psi(const Vector& eta) const override {
        return (s_ / alpha_) * eta.array().log().sum() + kappa_dual_;
    }
    bool in_primal_domain(const Vector& xi) const override {
        return xi.size() == n_ && (xi.array() > 0).all();
    }
    Vector sample_primal(Rng& rng) const override { return rng.uniform_vector(n_, lo_, hi_); }
    Vector sample_dual(Rng& rng) const override { return rng.uniform_vector(n_, lo_, hi_); }

    double tau() const { return tau_; }
    double alpha() const { return alpha_; }

private:
    int n_;
    double alpha_, s_, kappa_, lo_, hi_, tau_ = 0, kappa_dual_ = 0;
    CostPtr cost_;
};

// ---------------------------------------------------------------------------
// Entropic chart: f is the shrinkage map in simplex coordinates, psi = 0,
// phi the closed-form value of the regularized cost at the free-marginal
// optimum. The induced divergence is D_lambda.
// ---------------------------------------------------------------------------

class EntropicChart final : public GraphChart {
public:
    explicit EntropicChart(cost::EntropicProblem prob, double margin = 0.02)
        : cost_(std::make_shared<cost::EntropicCost>(std::move(prob), 1e-4)), margin_(margin) {
        B_ = cost::shrinkage_kernel(cost_->problem());
        Bt_ = B_.transpose();
    }

    int dim() const override { return cost_->dim(); }
    std::string name() const override { return "entropic"; }
    const CostModel& cost_model() const override { return *cost_; }
    Vector forward(const Vector& xi) const override {
        return cost::simplex_chart(Bt_ * cost::simplex_embed(xi));
    }
    Vector inverse(const Vector& eta) const override {
        const Vector p = num::solve_guarded(Bt_, cost::simplex_embed(eta), 1e12,
                                            "entropic chart inverse");
        return cost::simplex_chart(p);
    }
    Matrix jacobian(const Vector& xi) const override {
        const int n = dim();
        Matrix J(n, n);
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m) J(m, i) = B_(i, m) - B_(n, m);
        (void)xi;
        return J;
    }
    double phi(const Vector& xi) const override {
        return cost::entropic_value_at_shrinkage(cost_->problem(), cost::simplex_embed(xi));
    }
    double psi(const Vector&) const override { return 0.0; }
    bool in_primal_domain(const Vector& xi) const override {
        if (xi.size() != dim() || !xi.allFinite()) return false;
        if (!(xi.array() > 0).all() || !(xi.sum() < 1.0)) return false;
        return cost_->in_domain(xi, forward(xi));
    }
    Vector sample_primal(Rng& rng) const override {
        return cost::simplex_chart(rng.simplex_interior(dim() + 1, margin_));
    }
    Vector sample_dual(Rng& rng) const override {
        // Stay inside the shrinkage image so potentials remain tight-able.
        return forward(sample_primal(rng));
    }

private:
    std::shared_ptr<const cost::EntropicCost> cost_;
    double margin_;
    Matrix B_, Bt_;
};

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

inline cost::EntropicProblem default_entropic_problem(double lambda = 1.0) {
    Matrix C(3, 3);
    C << 0, 1, 2,
         1, 0, 1,
         2, 1, 0;
    return cost::EntropicProblem(std::move(C), lambda, 1e-13, 100000);
}

inline Matrix default_spd_matrix() {
    Matrix A(2, 2);
    A << 2.0, 0.5,
         0.5, 1.5;
    return A;
}

// The analytic built-in charts; the entropic chart is constructed separately
// because it carries a problem instance.
inline std::vector<ChartPtr> builtin_charts() {
    std::vector<ChartPtr> out;
    out.push_back(std::make_shared<QuadraticChart>(half_square_generator(2)));
    out.push_back(std::make_shared<QuadraticChart>(spd_generator(default_spd_matrix())));
    out.push_back(std::make_shared<QuadraticChart>(log_sum_exp_generator(2)));
    out.push_back(std::make_shared<LogChart>(1, 1.0, 0.5, 0.5 * std::log(2.0)));
    out.push_back(std::make_shared<LogChart>(2, 1.0, 1.0 / 3.0, 0.0));
    return out;
}

inline ChartPtr entropic_chart(double lambda = 1.0) {
    return std::make_shared<EntropicChart>(default_entropic_problem(lambda));
}

}  // namespace otgeom::graph
