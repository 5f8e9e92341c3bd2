#include "langevin/targets.hpp"

#include <stdexcept>

namespace langevin {

GaussianTarget::GaussianTarget(SymMatrix precision) : s_(std::move(precision)) {
    const SymEig e = sym_eig(s_);
    if (e.values.size() == 0 || !(e.values(0) > 0.0)) {
        throw std::invalid_argument("GaussianTarget: precision must be positive definite");
    }
}

double GaussianTarget::value(const Vector& q) const { return 0.5 * q.dot(s_.mat() * q); }

Vector GaussianTarget::gradient(const Vector& q) const { return s_.mat() * q; }

WellSpec double_well() {
    return WellSpec{
        "double_well",
        [](double x) { return 2.0 * x * (x * x - 1.0); },
        [](double x) { return 2.0 * (3.0 * x * x - 1.0); },
        [](double x) { return 12.0 * x; },
    };
}

BridgeTarget::BridgeTarget(int grid_size, double beta, WellSpec well)
    : d_(grid_size), beta_(beta), well_(std::move(well)) {
    if (grid_size < 1) throw std::invalid_argument("BridgeTarget: grid size must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("BridgeTarget: beta must be positive");
    if (!well_.d1 || !well_.d2 || !well_.d3) {
        throw std::invalid_argument("BridgeTarget: well derivatives missing");
    }
    delta_ = 1.0 / (d_ + 1);
    const double inv2 = 1.0 / (delta_ * delta_);
    laplacian_ = Matrix::Zero(d_, d_);
    for (int i = 0; i < d_; ++i) {
        laplacian_(i, i) = -2.0 * inv2;
        if (i + 1 < d_) {
            laplacian_(i, i + 1) = inv2;
            laplacian_(i + 1, i) = inv2;
        }
    }
}

Vector BridgeTarget::apply_laplacian(const Vector& x) const {
    const double inv2 = 1.0 / (delta_ * delta_);
    Vector out(d_);
    for (int i = 0; i < d_; ++i) {
        double acc = -2.0 * x(i);
        if (i > 0) acc += x(i - 1);
        if (i + 1 < d_) acc += x(i + 1);
        out(i) = inv2 * acc;
    }
    return out;
}

double BridgeTarget::psi_tilde(const Vector& x) const {
    double sum = 0.0;
    for (int i = 0; i < d_; ++i) {
        const double u1 = well_.d1(x(i));
        sum += u1 * u1 - well_.d2(x(i)) / beta_;
    }
    return 0.5 * beta_ * delta_ * sum;
}

Vector BridgeTarget::psi_tilde_gradient(const Vector& x) const {
    Vector g(d_);
    for (int i = 0; i < d_; ++i) {
        const double xi = x(i);
        g(i) = 0.5 * beta_ * delta_ * (2.0 * well_.d1(xi) * well_.d2(xi) - well_.d3(xi) / beta_);
    }
    return g;
}

double BridgeTarget::value(const Vector& x) const {
    return psi_tilde(x) - 0.25 * beta_ * delta_ * x.dot(apply_laplacian(x));
}

Vector BridgeTarget::gradient(const Vector& x) const {
    return psi_tilde_gradient(x) - 0.5 * beta_ * delta_ * apply_laplacian(x);
}

std::optional<SymMatrix> BridgeTarget::precision() const {
    return SymMatrix(Matrix(-0.5 * beta_ * delta_ * laplacian_));
}

BridgeTarget bridge_build(int grid_size, double beta, WellSpec well) {
    return BridgeTarget(grid_size, beta, std::move(well));
}

SymMatrix bridge_precision(const BridgeTarget& t) { return *t.precision(); }

double psi_tilde(const BridgeTarget& t, const Vector& x) { return t.psi_tilde(x); }

}  // namespace langevin
