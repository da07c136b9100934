#pragma once

// Entropically regularized transport on a finite state space: log-domain
// Sinkhorn iteration for the regularized cost C_lambda, the shrinkage map
// (free-column-marginal minimizer), and a CostModel exposing C_lambda on
// simplex charts so the geometric machinery can run on it.

#include "otgeom/cost.hpp"

#include <algorithm>
#include <limits>

namespace otgeom::cost {

struct EntropicProblem {
    Matrix C;               // state-to-state cost, zero diagonal, nonnegative
    double lambda = 1.0;    // entropy regularizer
    double sinkhorn_tol = 1e-10;  // l1 marginal residual target
    int max_iters = 10000;

    EntropicProblem(Matrix cost_matrix, double lam, double tol = 1e-10, int iters = 10000)
        : C(std::move(cost_matrix)), lambda(lam), sinkhorn_tol(tol), max_iters(iters) {
        if (C.rows() != C.cols() || C.rows() < 2)
            throw ConstructionError("EntropicProblem: cost matrix must be square, >= 2 states");
        if (!(lambda > 0)) throw ConstructionError("EntropicProblem: lambda must be positive");
        for (int i = 0; i < C.rows(); ++i) {
            if (C(i, i) != 0.0) throw ConstructionError("EntropicProblem: diagonal must be zero");
            for (int j = 0; j < C.cols(); ++j)
                if (C(i, j) < 0) throw ConstructionError("EntropicProblem: negative cost entry");
        }
    }

    int states() const { return static_cast<int>(C.rows()); }
};

struct Coupling {
    Matrix pi;
    Vector row_marginal;
    Vector col_marginal;
};

struct SinkhornResult {
    double value = 0.0;  // C_lambda(p, q)
    Coupling coupling;
    int iterations = 0;
    double residual = 0.0;
};

namespace detail {

inline double log_sum_exp(const Vector& v) {
    const double m = v.maxCoeff();
    return m + std::log((v.array() - m).exp().sum());
}

inline void check_simplex_interior(const Vector& p, int m, const char* who) {
    if (p.size() != m) throw DomainError(std::string(who) + ": wrong state count");
    if (!(p.array() > 0).all()) throw DomainError(std::string(who) + ": probabilities must be positive");
    if (std::abs(p.sum() - 1.0) > 1e-9) throw DomainError(std::string(who) + ": probabilities must sum to 1");
}

}  // namespace detail

// Minimize <C, pi> - lambda H(pi) over couplings of (p, q), H the Shannon
// entropy, by alternating marginal scaling in the log domain. The reported
// value is the dual objective with its feasibility correction, which is
// insensitive (to second order) to the remaining marginal residual.
inline SinkhornResult sinkhorn_c_lambda(const EntropicProblem& prob, const Vector& p,
                                        const Vector& q) {
    const int m = prob.states();
    detail::check_simplex_interior(p, m, "sinkhorn");
    detail::check_simplex_interior(q, m, "sinkhorn");
    const Matrix logK = -prob.C / prob.lambda;
    const Vector logp = p.array().log(), logq = q.array().log();
    Vector phi = Vector::Zero(m), psi = Vector::Zero(m);

    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < prob.max_iters; ++iter) {
        for (int i = 0; i < m; ++i) phi[i] = logp[i] - detail::log_sum_exp(logK.row(i).transpose() + psi);
        for (int j = 0; j < m; ++j) psi[j] = logq[j] - detail::log_sum_exp(logK.col(j) + phi);
        // Column marginals are now exact; measure the row defect.
        residual = 0.0;
        for (int i = 0; i < m; ++i) {
            const double row = std::exp(detail::log_sum_exp(logK.row(i).transpose() + psi) + phi[i]);
            residual += std::abs(row - p[i]);
        }
        if (residual <= prob.sinkhorn_tol) break;
    }
    if (residual > prob.sinkhorn_tol)
        throw ConvergenceError("sinkhorn: iteration cap reached", residual);

    SinkhornResult out;
    out.iterations = iter + 1;
    out.residual = residual;
    out.coupling.pi = Matrix(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out.coupling.pi(i, j) = std::exp(phi[i] + psi[j] + logK(i, j));
    out.coupling.row_marginal = p;
    out.coupling.col_marginal = q;
    const double mass = out.coupling.pi.sum();
    out.value = prob.lambda * (p.dot(phi) + q.dot(psi)) + prob.lambda * (1.0 - mass);
    return out;
}

// Row-normalized Gibbs kernel B_ij = exp(-C_ij/lambda) / Z_i. The minimizer
// of C_lambda(p, .) is the linear map q = B^T p: with the column marginal
// free, the optimal coupling is row-separable.
inline Matrix shrinkage_kernel(const EntropicProblem& prob) {
    const int m = prob.states();
    Matrix B(m, m);
    for (int i = 0; i < m; ++i) {
        const Vector row = -prob.C.row(i).transpose() / prob.lambda;
        const double lse = detail::log_sum_exp(row);
        for (int j = 0; j < m; ++j) B(i, j) = std::exp(row[j] - lse);
    }
    return B;
}

inline Vector shrinkage_closed_form(const EntropicProblem& prob, const Vector& p) {
    detail::check_simplex_interior(p, prob.states(), "shrinkage");
    return shrinkage_kernel(prob).transpose() * p;
}

// C_lambda(p, q) at the free-marginal optimum q = B^T p has the closed form
// lambda * sum_i p_i log(p_i / Z_i), Z_i the row normalizer of the kernel.
inline double entropic_value_at_shrinkage(const EntropicProblem& prob, const Vector& p) {
    detail::check_simplex_interior(p, prob.states(), "entropic value");
    double acc = 0.0;
    for (int i = 0; i < prob.states(); ++i) {
        const Vector row = -prob.C.row(i).transpose() / prob.lambda;
        acc += p[i] * (std::log(p[i]) - detail::log_sum_exp(row));
    }
    return prob.lambda * acc;
}

// argmin over the open simplex of q -> C_lambda(p, q), by exponentiated
// gradient (mirror descent in the entropy geometry). The gradient is the
// column dual potential of the inner Sinkhorn solve; first-order optimality
// is the sup-norm of the centered gradient.
inline Vector shrinkage_map(const EntropicProblem& prob, const Vector& p, double tol = 1e-7,
                            int max_iters = 2000) {
    const int m = prob.states();
    detail::check_simplex_interior(p, m, "shrinkage_map");
    Vector q = Vector::Constant(m, 1.0 / m);
    double eta = 1.0 / prob.lambda;
    double grad_norm = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        const SinkhornResult sr = sinkhorn_c_lambda(prob, p, q);
        const double value = sr.value;
        // dC_lambda/dq_j = lambda * psi_j up to an additive constant;
        // recover psi from the coupling: pi_ij = exp(phi_i + psi_j + logK).
        Vector grad(m);
        for (int j = 0; j < m; ++j)
            grad[j] = prob.lambda *
                      (std::log(sr.coupling.pi(0, j)) + prob.C(0, j) / prob.lambda);
        grad.array() -= grad.mean();
        grad_norm = grad.cwiseAbs().maxCoeff();
        if (grad_norm <= tol) return q;
        // Multiplicative update with a non-increasing step size: accept when
        // the objective does not increase beyond inner-solver noise, shrink
        // otherwise. A step of order 1/lambda contracts linearly here, so the
        // step must never be grown mid-run -- that oscillates near the
        // optimum and stalls above tight tolerances.
        Vector q_try = (q.array().log() - eta * grad.array()).exp();
        q_try /= q_try.sum();
        const double v_try = sinkhorn_c_lambda(prob, p, q_try).value;
        if (v_try <= value + 1e-12)
            q = q_try;
        else
            eta *= 0.5;
    }
    if (grad_norm <= tol) return q;
    throw ConvergenceError("shrinkage_map: no convergence", grad_norm);
}

// D_lambda[p : p'] = C_lambda(p, K p') - C_lambda(p, K p), the divergence the
// shrinkage chart induces (potential on the second factor identically zero).
inline double d_lambda(const EntropicProblem& prob, const Vector& p, const Vector& pprime) {
    const Vector kp = shrinkage_closed_form(prob, p);
    const Vector kpp = shrinkage_closed_form(prob, pprime);
    return sinkhorn_c_lambda(prob, p, kpp).value - sinkhorn_c_lambda(prob, p, kp).value;
}

// ---------------------------------------------------------------------------
// C_lambda as a CostModel on simplex charts
// ---------------------------------------------------------------------------

// Chart convention: a distribution over 1+n states is represented by its
// first n coordinates; the last coordinate is eliminated. This keeps the
// mixed derivative block square and invertible as the framework requires.
inline Vector simplex_embed(const Vector& xi) {
    Vector p(xi.size() + 1);
    p.head(xi.size()) = xi;
    p[xi.size()] = 1.0 - xi.sum();
    return p;
}

inline Vector simplex_chart(const Vector& p) { return p.head(p.size() - 1); }

class EntropicCost final : public CostModel {
public:
    EntropicCost(EntropicProblem prob, double interior_margin = 1e-6)
        : prob_(std::move(prob)), margin_(interior_margin) {}

    int dim() const override { return prob_.states() - 1; }
    std::string name() const override { return "entropic"; }
    const EntropicProblem& problem() const { return prob_; }

    bool in_domain(const Vector& xi, const Vector& eta) const override {
        return chart_ok(xi) && chart_ok(eta);
    }

    double value(const Vector& xi, const Vector& eta) const override {
        check_point(xi, eta);
        return sinkhorn_c_lambda(prob_, simplex_embed(xi), simplex_embed(eta)).value;
    }

    // Solver noise sits near machine precision, but second and third
    // differences still need larger steps than the analytic default.
    num::FdScheme fd_scheme(int total_order) const override {
        if (total_order <= 1) return {1e-5, 0};
        if (total_order == 2) return {1e-4, 0};
        return {2e-3, 0};
    }

private:
    bool chart_ok(const Vector& xi) const {
        if (xi.size() != dim() || !xi.allFinite()) return false;
        if (!(xi.array() > margin_).all()) return false;
        return xi.sum() < 1.0 - margin_;
    }

    EntropicProblem prob_;
    double margin_;
};

inline CostPtr entropic_cost(EntropicProblem prob, double interior_margin = 1e-6) {
    return std::make_shared<EntropicCost>(std::move(prob), interior_margin);
}

}  // namespace otgeom::cost
