#pragma once

// Dense linear algebra for the small matrices (d <= 128) used throughout the
// analysis and the integrators. Storage is Eigen; the algorithms that matter
// for accuracy (symmetric eigenproblem, matrix exponential, Lyapunov solve)
// are implemented here.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace langevin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

inline constexpr double kSymmetryTol = 1e-12;

double max_abs(const Matrix& x);
bool is_symmetric(const Matrix& x, double rel_tol = kSymmetryTol);
bool is_antisymmetric(const Matrix& x, double rel_tol = kSymmetryTol);
Matrix commutator(const Matrix& a, const Matrix& b);

// Symmetric matrix. Construction rejects inputs with
// max|X - X^T| > 1e-12 * max|X| instead of silently symmetrizing them.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Matrix m);

    // Averages X and X^T. Only for matrices that are symmetric by
    // construction (e.g. S^{-1/2} K S^{-1/2}) and carry rounding asymmetry.
    static SymMatrix from_symmetric_product(const Matrix& m);
    static SymMatrix identity(Eigen::Index d);
    static SymMatrix zero(Eigen::Index d);

    const Matrix& mat() const { return m_; }
    operator const Matrix&() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    Matrix m_;
};

// Antisymmetric matrix with exactly zero diagonal after construction.
class AntiSymMatrix {
public:
    AntiSymMatrix() = default;
    explicit AntiSymMatrix(Matrix m);

    static AntiSymMatrix from_antisymmetric_product(const Matrix& m);
    static AntiSymMatrix zero(Eigen::Index d);
    // Block-diagonal rotation generator [[0,1],[-1,0]] repeated; a trailing
    // odd dimension gets a zero row/column.
    static AntiSymMatrix standard(Eigen::Index d);

    const Matrix& mat() const { return m_; }
    operator const Matrix&() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    Matrix m_;
};

struct SymEig {
    Vector values;   // ascending
    Matrix vectors;  // orthogonal; column i pairs with values[i]
};

// Cyclic Jacobi rotations. Throws NumericalError after 100*n sweeps.
SymEig sym_eig(const SymMatrix& s);

// Throw std::invalid_argument unless lambda_min(S) > 0.
SymMatrix spd_sqrt(const SymMatrix& s);
SymMatrix spd_inv_sqrt(const SymMatrix& s);
SymMatrix spd_inverse(const SymMatrix& s);

// Scaling and squaring with a degree-13 diagonal Pade approximant.
Matrix expm(const Matrix& x);

// Solves A C + C A^T = rhs for symmetric C by vectorizing over the
// n(n+1)/2 independent entries of C.
SymMatrix solve_lyapunov(const Matrix& a, const SymMatrix& rhs);

Vector solve_linear(const Matrix& a, const Vector& b);

// Top-left block (U - V X^{-1} W)^{-1} of [[U, V], [W, X]]^{-1}.
Matrix schur_block_tl_inverse(const Matrix& u, const Matrix& v, const Matrix& w,
                              const Matrix& x);

// Hessenberg-QR eigenvalues of a general real matrix.
std::vector<Complex> eig_general(const Matrix& b);

// Factor L with L L^T = X for a symmetric PSD matrix X. X is symmetrized and
// eigenvalues in [-1e-13*max(1, max|X|), 0) are clipped to zero; anything more
// negative is a NumericalError.
Matrix psd_factor(const Matrix& x);

}  // namespace langevin
