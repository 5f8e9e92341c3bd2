#include "langevin/perturbation_design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "langevin/errors.hpp"

namespace langevin {

namespace {

bool is_diagonal(const Matrix& m) {
    Matrix off = m;
    off.diagonal().setZero();
    return max_abs(off) == 0.0;
}

}  // namespace

Matrix zero_diagonal_transform(const SymMatrix& k0) {
    const Eigen::Index d = k0.dim();
    const double scale = max_abs(k0);
    if (std::abs(k0.mat().trace()) > 1e-10 * scale) {
        throw std::invalid_argument("zero_diagonal_transform: input is not traceless");
    }
    if (scale == 0.0) return Matrix::Identity(d, d);

    Matrix u;
    if (is_diagonal(k0)) {
        u = Matrix::Identity(d, d);
    } else {
        u = sym_eig(k0).vectors.transpose();
    }
    Matrix current = u * k0.mat() * u.transpose();
    const double negligible = 1e-12 * k0.mat().norm();

    for (Eigen::Index i = 0; i + 1 < d; ++i) {
        const double di = current(i, i);
        if (std::abs(di) <= negligible) continue;
        Eigen::Index partner = -1;
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double dj = current(j, j);
            if (dj * di >= 0.0) continue;
            if (partner < 0 || std::abs(dj) > std::abs(current(partner, partner))) partner = j;
        }
        if (partner < 0) {
            throw NumericalError("zero_diagonal_transform: no opposite-sign partner");
        }
        const double alpha = std::atan(std::sqrt(-di / current(partner, partner)));
        const double c = std::cos(alpha), s = std::sin(alpha);
        Matrix rot = Matrix::Identity(d, d);
        rot(i, i) = c;
        rot(i, partner) = -s;
        rot(partner, i) = s;
        rot(partner, partner) = c;
        u = (rot * u).eval();
        current = u * k0.mat() * u.transpose();
    }

    if (current.diagonal().cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw NumericalError("zero_diagonal_transform: diagonal did not vanish");
    }
    return u;
}

DesignResult optimal_j_unit(const SymMatrix& k) {
    const Eigen::Index d = k.dim();
    const Matrix id = Matrix::Identity(d, d);
    const SymMatrix k0(Matrix(k.mat() - (k.mat().trace() / static_cast<double>(d)) * id));
    const Matrix u = zero_diagonal_transform(k0);
    const Matrix rotated = u * k0.mat() * u.transpose();

    Vector a(d);
    for (Eigen::Index i = 0; i < d; ++i) a(i) = static_cast<double>(i + 1);
    Matrix jbar = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            if (i != j) jbar(i, j) = rotated(i, j) / (a(i) - a(j));

    Matrix j = u.transpose() * jbar * u;
    const double jn = j.norm();
    const double kn = k0.mat().norm();
    if (jn > 0.0 && kn > 0.0) {
        const double factor = kn / jn;
        j *= factor;
        a /= factor;
    }
    const AntiSymMatrix jj = AntiSymMatrix::from_antisymmetric_product(j);
    const SymMatrix a_sym =
        SymMatrix::from_symmetric_product(u.transpose() * a.asDiagonal() * u);

    const double cert = max_abs(commutator(a_sym, jj) - k0.mat());
    if (cert > 1e-10 * std::max(max_abs(k0), 1e-300) && max_abs(k0) > 0.0) {
        throw NumericalError("optimal_j_unit: commutator certificate failed");
    }
    return DesignResult{jj, jj, jj, u, a, a_sym, k0};
}

DesignResult optimal_j_general(const SymMatrix& k, const SymMatrix& s) {
    if (k.dim() != s.dim()) throw std::invalid_argument("optimal_j_general: dimension mismatch");
    const SymMatrix root = spd_sqrt(s);
    const SymMatrix inv_root = spd_inv_sqrt(s);
    const SymMatrix k_unit =
        SymMatrix::from_symmetric_product(inv_root.mat() * k.mat() * inv_root.mat());
    DesignResult r = optimal_j_unit(k_unit);
    const Matrix& j = r.J_unit.mat();
    r.J1 = AntiSymMatrix::from_antisymmetric_product(inv_root.mat() * j * inv_root.mat());
    r.J2 = AntiSymMatrix::from_antisymmetric_product(root.mat() * j * root.mat());
    return r;
}

IndependenceReport rational_independence_report(const AntiSymMatrix& j,
                                                std::size_t max_reported) {
    IndependenceReport rep;
    const std::vector<Complex> ev = eig_general(j);
    double largest = 0.0;
    for (const Complex& z : ev) largest = std::max(largest, std::abs(z));
    const double zero_tol = 1e-10 * std::max(largest, 1e-300);
    for (const Complex& z : ev) {
        if (std::abs(z) <= zero_tol) {
            ++rep.zero_modes;
        } else if (z.imag() > 0.0) {
            rep.frequencies.push_back(z.imag());
        }
    }
    std::sort(rep.frequencies.begin(), rep.frequencies.end());

    const int n = static_cast<int>(rep.frequencies.size());
    const int kmax = rep.max_coefficient;
    const double tol = 1e-8 * (rep.frequencies.empty() ? 1.0 : rep.frequencies.back());
    rep.exhaustive = n <= 7;
    rep.max_support = rep.exhaustive ? n : 3;
    if (n < 2) return rep;

    std::vector<int> k(static_cast<std::size_t>(n), 0);
    auto consider = [&]() {
        int first = 0, g = 0, support = 0;
        for (int v : k) {
            if (v != 0) {
                if (first == 0) first = v;
                g = std::gcd(g, std::abs(v));
                ++support;
            }
        }
        if (first <= 0 || g != 1 || support < 2) return;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += k[i] * rep.frequencies[i];
        if (std::abs(sum) > tol) return;
        ++rep.relation_count;
        if (rep.relations.size() < max_reported) rep.relations.push_back({k, std::abs(sum)});
    };

    if (rep.exhaustive) {
        std::fill(k.begin(), k.end(), -kmax);
        while (true) {
            consider();
            int pos = n - 1;
            while (pos >= 0 && k[pos] == kmax) k[pos--] = -kmax;
            if (pos < 0) break;
            ++k[pos];
        }
        return rep;
    }

    // Sparse scan: choose up to three positions, each with a nonzero coefficient.
    std::vector<int> idx;
    auto recurse = [&](auto&& self, int start, int depth) -> void {
        if (depth >= 2) consider();
        if (depth == rep.max_support) return;
        for (int p = start; p < n; ++p) {
            for (int v = -kmax; v <= kmax; ++v) {
                if (v == 0) continue;
                k[p] = v;
                self(self, p + 1, depth + 1);
                k[p] = 0;
            }
        }
    };
    recurse(recurse, 0, 0);
    return rep;
}

}  // namespace langevin
