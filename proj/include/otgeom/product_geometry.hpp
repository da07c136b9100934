#pragma once

// Pseudo-Riemannian geometry induced by a nondegenerate cost on the product
// of primal and dual domains: the cross-difference four-point function, the
// split metric of signature (n, n), Levi-Civita symbols (block-diagonal in
// the split), the canonical curvature block S with one closed-form and one
// finite-difference pipeline, the unnormalized cross sectional curvature,
// and the transport regularity tensor it restricts to.

#include "otgeom/cost.hpp"
#include "otgeom/rng.hpp"

#include <cmath>

namespace otgeom::product {

using cost::CostModel;

// delta(x, x0) = c(xi, eta0) + c(xi0, eta) - c(xi, eta) - c(xi0, eta0).
// Vanishes when either argument pair coincides; second cross-derivatives
// reproduce the metric, fourth reproduce curvature.
inline double cross_difference(const CostModel& c, const ProductPoint& x,
                               const ProductPoint& x0) {
    return c.value(x.xi, x0.eta) + c.value(x0.xi, x.eta) - c.value(x.xi, x.eta) -
           c.value(x0.xi, x0.eta);
}

// Full 2n x 2n matrix of the split metric h = 1/2 [[0, -A], [-A^T, 0]] with
// A(i,j) the mixed second partial (primal i, dual j). Indices 0..n-1 primal,
// n..2n-1 dual.
inline Matrix metric_h_full(const CostModel& c, const Vector& xi, const Vector& eta) {
    const int n = c.dim();
    const Matrix A = c.mixed_matrix(xi, eta);
    Matrix h = Matrix::Zero(2 * n, 2 * n);
    h.topRightCorner(n, n) = -0.5 * A;
    h.bottomLeftCorner(n, n) = -0.5 * A.transpose();
    return h;
}

inline double metric_h(const CostModel& c, const Vector& xi, const Vector& eta,
                       const TangentPair& u, const TangentPair& v) {
    const Matrix A = c.mixed_matrix(xi, eta);
    return -0.5 * (u.a.dot(A * v.b) + v.a.dot(A * u.b));
}

inline std::pair<int, int> metric_signature(const CostModel& c, const Vector& xi,
                                            const Vector& eta) {
    return num::signature(metric_h_full(c, xi, eta));
}

// Independent consistency check: h(v,v) must equal -1/2 the mixed second
// cross-derivative d^2/ds dt of delta(x + s v, x + t v) at s = t = 0,
// evaluated by a central finite-difference stencil on the four-point
// function alone. Returns the absolute discrepancy.
inline double metric_h_intrinsic_check(const CostModel& c, const Vector& xi,
                                       const Vector& eta, const TangentPair& v) {
    const double step = std::max(c.fd_scheme(2).step, 1e-4);
    const auto shifted = [&](double s) {
        return ProductPoint{xi + s * v.a, eta + s * v.b};
    };
    const auto G = [&](double s, double t) { return cross_difference(c, shifted(s), shifted(t)); };
    const double mixed = (G(step, step) - G(step, -step) - G(-step, step) + G(-step, -step)) /
                         (4.0 * step * step);
    return std::abs(metric_h(c, xi, eta, v, v) + 0.5 * mixed);
}

// Levi-Civita symbols of h. The split blocks decouple: the purely primal and
// purely dual symbols are the only nonzero ones.
struct ProductChristoffel {
    int n = 0;
    Rank3Coefficients primal;  // Gamma_{ij}^k, all primal
    Rank3Coefficients dual;    // Gamma_{ij}^k, all dual

    // Acceleration term: component k of -Gamma[v, v] for a product velocity.
    TangentPair acceleration(const TangentPair& v) const {
        TangentPair acc{Vector::Zero(n), Vector::Zero(n)};
        for (int k = 0; k < n; ++k) {
            double sp = 0, sd = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    sp += primal(i, j, k) * v.a[i] * v.a[j];
                    sd += dual(i, j, k) * v.b[i] * v.b[j];
                }
            acc.a[k] = -sp;
            acc.b[k] = -sd;
        }
        return acc;
    }
};

inline ProductChristoffel levi_civita_symbols(const CostModel& c, const Vector& xi,
                                              const Vector& eta) {
    const int n = c.dim();
    const Matrix Ainv = c.mixed_matrix_inverse(xi, eta);
    ProductChristoffel out;
    out.n = n;
    out.primal = Rank3Coefficients(n, {Slot::primal, Slot::primal, Slot::primal});
    out.dual = Rank3Coefficients(n, {Slot::dual, Slot::dual, Slot::dual});
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Vector cp(n), cd(n);  // c_{ij:m} and c_{m:ij}
            for (int m = 0; m < n; ++m) {
                cp[m] = c.d(xi, eta, {i, j}, {m});
                cd[m] = c.d(xi, eta, {m}, {i, j});
            }
            for (int k = 0; k < n; ++k) {
                double gp = 0, gd = 0;
                for (int m = 0; m < n; ++m) {
                    gp += cp[m] * Ainv(m, k);      // contract with inverse mixed block
                    gd += Ainv(k, m) * cd[m];
                }
                out.primal(i, j, k) = gp;
                out.primal(j, i, k) = gp;
                out.dual(i, j, k) = gd;
                out.dual(j, i, k) = gd;
            }
        }
    return out;
}

// Canonical curvature block S(i, j, k, l) = R(primal i, dual j, dual k,
// primal l) of the Levi-Civita curvature of h, lowered on the last slot.
// Closed form: S = 1/2 (-c_{il:jk} + c_{il:b} c^{b:a} c_{a:jk}).
// Every component of the full curvature tensor is +-S of a permutation, so
// this block is the whole tensor; it is symmetric in (i,l) and in (j,k).
inline Rank4Coefficients curvature_canonical(const CostModel& c, const Vector& xi,
                                             const Vector& eta) {
    const int n = c.dim();
    const Matrix Ainv = c.mixed_matrix_inverse(xi, eta);
    Rank4Coefficients S(n, {Slot::primal, Slot::dual, Slot::dual, Slot::primal});
    for (int i = 0; i < n; ++i)
        for (int l = i; l < n; ++l) {
            Vector mixed3(n);  // c_{il:b}
            for (int b = 0; b < n; ++b) mixed3[b] = c.d(xi, eta, {i, l}, {b});
            const Vector contracted = Ainv.transpose() * mixed3;  // index a
            for (int j = 0; j < n; ++j)
                for (int k = j; k < n; ++k) {
                    double quart = c.d(xi, eta, {i, l}, {j, k});
                    double corr = 0;
                    for (int a = 0; a < n; ++a) corr += contracted[a] * c.d(xi, eta, {a}, {j, k});
                    const double s = 0.5 * (-quart + corr);
                    S(i, j, k, l) = s;
                    S(i, k, j, l) = s;
                    S(l, j, k, i) = s;
                    S(l, k, j, i) = s;
                }
        }
    return S;
}

// Component of the full lowered curvature tensor on the product, indices in
// 0..2n-1 (primal first). Nonzero only when both the first and the second
// index pair mix primal with dual; the sign tracks the orientation of each
// pair and the remaining slots read off the canonical block.
inline double rbar_component(const Rank4Coefficients& S, int A, int B, int C, int D) {
    const int n = S.n;
    const auto primal = [n](int idx) { return idx < n; };
    if (primal(A) == primal(B) || primal(C) == primal(D)) return 0.0;
    const double sign1 = primal(A) ? 1.0 : -1.0;
    const double sign2 = primal(C) ? -1.0 : 1.0;
    const int i = primal(A) ? A : B;
    const int j = primal(A) ? B - n : A - n;
    const int k = primal(C) ? D - n : C - n;
    const int l = primal(C) ? C : D;
    return sign1 * sign2 * S(i, j, k, l);
}

// Full curvature by the textbook coordinate formula R_{ABC}^E =
// dA Gamma_{BC}^E - dB Gamma_{AC}^E + Gamma_{BC}^F Gamma_{AF}^E -
// Gamma_{AC}^F Gamma_{BF}^E, with the symbol fields differentiated by
// central differences, then lowered with h on the last slot. Slower and
// noisier than the closed form; used to cross-validate it. Returns the
// (2n)^4 tensor, row-major.
class FullCurvatureFd {
public:
    FullCurvatureFd(const CostModel& c, const Vector& xi, const Vector& eta, double step = 1e-4)
        : n_(c.dim()) {
        const int N = 2 * n_;
        const auto symbols_at = [&](int axis, double shift) {
            Vector x = xi, e = eta;
            if (axis < n_) x[axis] += shift;
            else e[axis - n_] += shift;
            return levi_civita_symbols(c, x, e);
        };
        // gamma[A][B][C] with product indices; block-diagonal structure.
        const auto full = [&](const ProductChristoffel& g, int A, int B, int C) -> double {
            const bool pa = A < n_, pb = B < n_, pc = C < n_;
            if (pa != pb || pb != pc) return 0.0;
            return pa ? g.primal(A, B, C) : g.dual(A - n_, B - n_, C - n_);
        };
        const ProductChristoffel here = levi_civita_symbols(c, xi, eta);
        std::vector<ProductChristoffel> plus, minus;
        plus.reserve(N);
        minus.reserve(N);
        for (int A = 0; A < N; ++A) {
            plus.push_back(symbols_at(A, step));
            minus.push_back(symbols_at(A, -step));
        }
        const Matrix h = metric_h_full(c, xi, eta);
        a_.assign(static_cast<size_t>(N) * N * N * N, 0.0);
        for (int A = 0; A < N; ++A)
            for (int B = 0; B < N; ++B)
                for (int C = 0; C < N; ++C) {
                    Vector up = Vector::Zero(N);  // R_{ABC}^E before lowering
                    for (int E = 0; E < N; ++E) {
                        double r = (full(plus[A], B, C, E) - full(minus[A], B, C, E) -
                                    full(plus[B], A, C, E) + full(minus[B], A, C, E)) /
                                   (2.0 * step);
                        for (int F = 0; F < N; ++F)
                            r += full(here, B, C, F) * full(here, A, F, E) -
                                 full(here, A, C, F) * full(here, B, F, E);
                        up[E] = r;
                    }
                    for (int D = 0; D < N; ++D) {
                        double low = 0;
                        for (int E = 0; E < N; ++E) low += up[E] * h(E, D);
                        at(A, B, C, D) = low;
                    }
                }
    }

    double operator()(int A, int B, int C, int D) const {
        const int N = 2 * n_;
        return a_[static_cast<size_t>(((A * N + B) * N + C)) * N + D];
    }

    int dim() const { return n_; }

private:
    double& at(int A, int B, int C, int D) {
        const int N = 2 * n_;
        return a_[static_cast<size_t>(((A * N + B) * N + C)) * N + D];
    }
    int n_;
    std::vector<double> a_;
};

// Max abs deviation between the finite-difference curvature and the closed
// form reconstructed from the canonical block, over all (2n)^4 components.
inline double curvature_cross_check(const CostModel& c, const Vector& xi, const Vector& eta,
                                    double step = 1e-4) {
    const Rank4Coefficients S = curvature_canonical(c, xi, eta);
    const FullCurvatureFd fd(c, xi, eta, step);
    const int N = 2 * c.dim();
    double worst = 0;
    for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
            for (int C = 0; C < N; ++C)
                for (int D = 0; D < N; ++D)
                    worst = std::max(worst, std::abs(fd(A, B, C, D) - rbar_component(S, A, B, C, D)));
    return worst;
}

// Contraction of the canonical block against four split-factor vectors.
inline double s_contract(const Rank4Coefficients& S, const Vector& a, const Vector& b,
                         const Vector& cvec, const Vector& d) {
    const int n = S.n;
    double acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += S(i, j, k, l) * a[i] * b[j] * cvec[k] * d[l];
    return acc;
}

// Unnormalized sectional curvature R(X, Y, Y, X) for product tangents
// X = (aX, bX), Y = (aY, bY), expanded through the canonical block.
inline double unnormalized_sec_bar(const Rank4Coefficients& S, const TangentPair& X,
                                   const TangentPair& Y) {
    return s_contract(S, X.a, Y.b, Y.b, X.a) - s_contract(S, X.a, Y.b, X.b, Y.a) -
           s_contract(S, Y.a, X.b, Y.b, X.a) + s_contract(S, Y.a, X.b, X.b, Y.a);
}

// Transport regularity quantity: twice the unnormalized sectional curvature
// of the split pair (u + 0, 0 + vbar). Nonnegativity on h-orthogonal pairs
// is the classical smoothness criterion for the cost.
inline double mtw_tensor(const Rank4Coefficients& S, const Vector& u, const Vector& vbar) {
    return 2.0 * s_contract(S, u, vbar, vbar, u);
}

// A dual direction vbar with h(u + 0, 0 + vbar) = 0: h pairs split vectors
// through the mixed block, so the null set is the orthogonal complement of
// A^T u. Needs n >= 2 to be nontrivial.
inline Vector null_dual_direction(const CostModel& c, const Vector& xi, const Vector& eta,
                                  const Vector& u, Rng& rng) {
    const int n = c.dim();
    if (n < 2) throw DomainError("null_dual_direction: needs dimension >= 2");
    const Vector w = c.mixed_matrix(xi, eta).transpose() * u;
    const double wn = w.norm();
    if (wn < 1e-14) throw DegeneracyError("null_dual_direction: A^T u vanishes");
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vector v = rng.direction(n);
        v -= (v.dot(w) / (wn * wn)) * w;
        if (v.norm() > 1e-8) return v / v.norm();
    }
    throw DegeneracyError("null_dual_direction: could not find a transverse direction");
}

}  // namespace otgeom::product
