#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "langevin/matkit.hpp"

namespace langevin {

// Potential energy V of a target density proportional to exp(-V).
class PotentialTarget {
public:
    virtual ~PotentialTarget() = default;
    virtual Eigen::Index dim() const = 0;
    virtual double value(const Vector& q) const = 0;
    virtual Vector gradient(const Vector& q) const = 0;
    // Precision of the Gaussian part, when the target has a natural one.
    virtual std::optional<SymMatrix> precision() const { return std::nullopt; }
};

class GaussianTarget final : public PotentialTarget {
public:
    // Throws std::invalid_argument unless the precision is SPD.
    explicit GaussianTarget(SymMatrix precision);

    Eigen::Index dim() const override { return s_.dim(); }
    double value(const Vector& q) const override;
    Vector gradient(const Vector& q) const override;
    std::optional<SymMatrix> precision() const override { return s_; }

private:
    SymMatrix s_;
};

// Derivatives of a one-dimensional well U; only these enter the bridge
// functional.
struct WellSpec {
    std::string name;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    std::function<double(double)> d3;
};

// U(x) = (x^2 - 1)^2 / 2.
WellSpec double_well();

// Path-space target of a diffusion bridge on [0, 1] with Dirichlet ends,
// discretized on d interior grid points.
class BridgeTarget final : public PotentialTarget {
public:
    BridgeTarget(int grid_size, double beta, WellSpec well);

    Eigen::Index dim() const override { return d_; }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    std::optional<SymMatrix> precision() const override;

    double beta() const { return beta_; }
    double spacing() const { return delta_; }
    // delta^{-2} tridiag(1, -2, 1)
    const Matrix& laplacian() const { return laplacian_; }
    const WellSpec& well() const { return well_; }

    double psi_tilde(const Vector& x) const;
    Vector psi_tilde_gradient(const Vector& x) const;

private:
    Vector apply_laplacian(const Vector& x) const;

    int d_;
    double beta_;
    double delta_;
    Matrix laplacian_;
    WellSpec well_;
};

BridgeTarget bridge_build(int grid_size, double beta, WellSpec well = double_well());

// SPD precision -(beta*delta/2) A of the Gaussian reference measure.
SymMatrix bridge_precision(const BridgeTarget& t);

double psi_tilde(const BridgeTarget& t, const Vector& x);

}  // namespace langevin
