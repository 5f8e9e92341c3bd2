#pragma once

#include <cstdint>
#include <vector>

#include "langevin/matkit.hpp"

namespace langevin {

struct DesignResult {
    AntiSymMatrix J1;
    AntiSymMatrix J2;
    AntiSymMatrix J_unit;  // perturbation in unit-covariance coordinates
    Matrix U;              // orthogonal; U K0 U^T has zero diagonal
    Vector a;              // distinct weights, after normalization
    SymMatrix A_sym;       // certificate: [A_sym, J_unit] = K0
    SymMatrix K0;          // traceless part of the (unit-coordinate) observable
};

// Orthogonal U with diag(U K0 U^T) = 0 for traceless symmetric K0.
// Throws std::invalid_argument if |Tr K0| > 1e-10 * max|K0|.
Matrix zero_diagonal_transform(const SymMatrix& k0);

// Unit covariance: J with [A_sym, J] = K - (Tr K / d) I, scaled so that
// ||J||_F = ||K0||_F. J1 = J2 = J.
DesignResult optimal_j_unit(const SymMatrix& k);

// General precision S: design on S^{-1/2} K S^{-1/2}, then
// J1 = S^{-1/2} J S^{-1/2}, J2 = S^{1/2} J S^{1/2}.
DesignResult optimal_j_general(const SymMatrix& k, const SymMatrix& s);

struct IntegerRelation {
    std::vector<int> coefficients;
    double residual;
};

struct IndependenceReport {
    std::vector<double> frequencies;  // positive imaginary parts of sigma(J), ascending
    int zero_modes = 0;               // eigenvalues with |lambda| below tolerance
    std::vector<IntegerRelation> relations;  // primitive, up to sign; capped at max_reported
    std::int64_t relation_count = 0;
    bool exhaustive = true;  // false when only sparse coefficient vectors were scanned
    int max_support = 0;
    int max_coefficient = 5;

    bool independent() const { return relation_count == 0; }
};

// Scans integer combinations sum k_i lambda_i with |k_i| <= 5 for
// |sum| <= 1e-8 max lambda. Exhaustive up to 7 frequencies; beyond that only
// combinations with at most 3 nonzero coefficients.
IndependenceReport rational_independence_report(const AntiSymMatrix& j,
                                                std::size_t max_reported = 64);

}  // namespace langevin
