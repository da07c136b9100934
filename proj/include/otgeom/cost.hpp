#pragma once

// CostModel: a smooth transport cost c(xi, eta) on a product of two
// n-dimensional coordinate patches, with partial-derivative access by mixed
// multi-index. Costs either supply exact derivatives or inherit the central
// finite-difference fallback. Non-degeneracy (invertible mixed second
// derivative block) is assumed throughout and enforced on access.

#include "otgeom/core.hpp"
#include "otgeom/finite_diff.hpp"

#include <initializer_list>
#include <memory>
#include <span>
#include <string>

namespace otgeom::cost {

class CostModel {
public:
    virtual ~CostModel() = default;

    virtual int dim() const = 0;
    virtual std::string name() const = 0;

    virtual bool in_domain(const Vector& xi, const Vector& eta) const {
        return xi.size() == dim() && eta.size() == dim() && xi.allFinite() && eta.allFinite();
    }

    virtual double value(const Vector& xi, const Vector& eta) const = 0;

    virtual bool has_exact_partials() const { return false; }

    // Mixed partial: differentiate by the listed primal coordinates of xi and
    // dual coordinates of eta (repetition raises the order). Default falls
    // back to central differences on value().
    virtual double partial(const Vector& xi, const Vector& eta, std::span<const int> primal,
                           std::span<const int> dual) const {
        check_point(xi, eta);
        return num::central_fd_product([this](const Vector& x, const Vector& e) { return value(x, e); },
                                       xi, eta, primal, dual,
                                       fd_scheme(static_cast<int>(primal.size() + dual.size())));
    }

    // Step policy for the finite-difference fallback; noisy costs override.
    virtual num::FdScheme fd_scheme(int total_order) const {
        return num::default_fd_scheme(total_order);
    }

    double d(const Vector& xi, const Vector& eta, std::initializer_list<int> primal,
             std::initializer_list<int> dual) const {
        return partial(xi, eta, std::span<const int>(primal.begin(), primal.size()),
                       std::span<const int>(dual.begin(), dual.size()));
    }

    // The n x n mixed block (rows: primal index, cols: dual index) of second
    // derivatives — the object every geometric quantity is built from.
    Matrix mixed_matrix(const Vector& xi, const Vector& eta) const {
        const int n = dim();
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = d(xi, eta, {i}, {j});
        return m;
    }

    // Inverse of the mixed block (rows: dual index, cols: primal index), with
    // the degeneracy guard demanded by the non-degeneracy assumption.
    Matrix mixed_matrix_inverse(const Vector& xi, const Vector& eta) const {
        return num::inverse_guarded(mixed_matrix(xi, eta), 1e12, "mixed derivative block");
    }

protected:
    void check_point(const Vector& xi, const Vector& eta) const {
        if (!in_domain(xi, eta)) throw DomainError(name() + ": point outside cost domain");
    }
};

using CostPtr = std::shared_ptr<const CostModel>;

}  // namespace otgeom::cost
