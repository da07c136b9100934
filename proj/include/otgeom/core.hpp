#pragma once

// Core dense-numerics types and helpers shared by every module: vector/matrix
// aliases, coefficient holders for rank-3/4 tensors with per-slot primal/dual
// tags, the error taxonomy, symmetric eigenvalues, and guarded linear solves.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace otgeom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

// Input outside the declared domain of an operation or cost.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A matrix that the framework assumes invertible is numerically singular.
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative solver ran out of iterations; carries the best residual seen.
struct ConvergenceError : std::runtime_error {
    double residual;
    ConvergenceError(const std::string& what, double res)
        : std::runtime_error(what + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

// A chart or cost failed its construction-time validation.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An ODE trajectory left the finite (or declared) region; carries the last
// valid time reached.
struct IntegrationError : std::runtime_error {
    double t_last;
    IntegrationError(const std::string& what, double t)
        : std::runtime_error(what + " (last valid t=" + std::to_string(t) + ")"), t_last(t) {}
};

// ---------------------------------------------------------------------------
// Small tensor holders
// ---------------------------------------------------------------------------

// Slot tag: does an index run over the first-factor (primal) coordinates or
// the second-factor (dual) coordinates?
enum class Slot : bool { primal = false, dual = true };

// Dense rank-3 coefficient array, n^3 entries, row-major in (i,j,k), with a
// per-slot primal/dual tag.
struct Rank3Coefficients {
    int n = 0;
    std::array<Slot, 3> slots{};
    std::vector<double> a;

    Rank3Coefficients() = default;
    Rank3Coefficients(int dim, std::array<Slot, 3> s)
        : n(dim), slots(s), a(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

    double& operator()(int i, int j, int k) { return a[(static_cast<std::size_t>(i) * n + j) * n + k]; }
    double operator()(int i, int j, int k) const { return a[(static_cast<std::size_t>(i) * n + j) * n + k]; }
};

// Dense rank-4 coefficient array, n^4 entries, row-major in (i,j,k,l).
struct Rank4Coefficients {
    int n = 0;
    std::array<Slot, 4> slots{};
    std::vector<double> a;

    Rank4Coefficients() = default;
    Rank4Coefficients(int dim, std::array<Slot, 4> s)
        : n(dim), slots(s), a(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

    double& operator()(int i, int j, int k, int l) {
        return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
    }
};

// A point of the product space M x M': primal block xi, dual block eta.
struct ProductPoint {
    Vector xi;
    Vector eta;
};

// A tangent vector of the product space split into its M-part and M'-part.
struct TangentPair {
    Vector a;  // components along the primal factor
    Vector b;  // components along the dual factor
};

// ---------------------------------------------------------------------------
// Linear algebra helpers
// ---------------------------------------------------------------------------

namespace num {

inline bool all_finite(const Vector& v) { return v.allFinite(); }

// Eigenvalues of a symmetric matrix, sorted ascending. Rejects non-square or
// asymmetric input; the solver guarantees reconstruction to machine accuracy.
inline Vector symmetric_eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) throw DomainError("symmetric_eigenvalues: matrix not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw DomainError("symmetric_eigenvalues: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw DomainError("symmetric_eigenvalues: solver failed");
    return es.eigenvalues();  // ascending
}

// Signature of a symmetric matrix: (#positive, #negative) eigenvalues, using a
// scale-relative zero cutoff.
inline std::pair<int, int> signature(const Matrix& m, double rel_cutoff = 1e-12) {
    const Vector ev = symmetric_eigenvalues(m);
    const double cutoff = rel_cutoff * std::max(1.0, ev.cwiseAbs().maxCoeff());
    int pos = 0, neg = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev[i] > cutoff) ++pos;
        else if (ev[i] < -cutoff) ++neg;
    }
    return {pos, neg};
}

// Partial-pivot LU inverse with a condition-number guard: the framework
// assumes non-degeneracy, so an ill-conditioned matrix is an error, not a
// warning. Condition estimated in the 1-norm from the explicit inverse.
inline Matrix inverse_guarded(const Matrix& m, double cond_limit = 1e12,
                              const char* what = "matrix") {
    if (m.rows() != m.cols()) throw DomainError(std::string(what) + ": not square");
    Eigen::PartialPivLU<Matrix> lu(m);
    const Matrix inv = lu.inverse();
    if (!inv.allFinite()) throw DegeneracyError(std::string(what) + ": singular");
    const double cond = m.cwiseAbs().colwise().sum().maxCoeff() *
                        inv.cwiseAbs().colwise().sum().maxCoeff();
    if (!(cond < cond_limit)) throw DegeneracyError(std::string(what) + ": condition number " +
                                                    std::to_string(cond) + " exceeds limit");
    return inv;
}

inline Vector solve_guarded(const Matrix& m, const Vector& rhs, double cond_limit = 1e12,
                            const char* what = "matrix") {
    return inverse_guarded(m, cond_limit, what) * rhs;
}

}  // namespace num
}  // namespace otgeom
