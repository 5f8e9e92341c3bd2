#include "langevin/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "langevin/errors.hpp"

namespace langevin {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    }
}

}  // namespace

double max_abs(const Matrix& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& x, double rel_tol) {
    if (x.rows() != x.cols()) return false;
    return max_abs(x - x.transpose()) <= rel_tol * max_abs(x);
}

bool is_antisymmetric(const Matrix& x, double rel_tol) {
    if (x.rows() != x.cols()) return false;
    return max_abs(x + x.transpose()) <= rel_tol * max_abs(x);
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
    require_square(m_, "SymMatrix");
    if (!m_.allFinite()) throw std::invalid_argument("SymMatrix: non-finite entry");
    if (!is_symmetric(m_)) throw std::invalid_argument("SymMatrix: input is not symmetric");
    m_ = 0.5 * (m_ + m_.transpose()).eval();
}

SymMatrix SymMatrix::from_symmetric_product(const Matrix& m) {
    require_square(m, "SymMatrix");
    return SymMatrix(Matrix(0.5 * (m + m.transpose())));
}

SymMatrix SymMatrix::identity(Eigen::Index d) { return SymMatrix(Matrix::Identity(d, d)); }
SymMatrix SymMatrix::zero(Eigen::Index d) { return SymMatrix(Matrix::Zero(d, d)); }

AntiSymMatrix::AntiSymMatrix(Matrix m) : m_(std::move(m)) {
    require_square(m_, "AntiSymMatrix");
    if (!m_.allFinite()) throw std::invalid_argument("AntiSymMatrix: non-finite entry");
    if (!is_antisymmetric(m_)) {
        throw std::invalid_argument("AntiSymMatrix: input is not antisymmetric");
    }
    m_ = 0.5 * (m_ - m_.transpose()).eval();
}

AntiSymMatrix AntiSymMatrix::from_antisymmetric_product(const Matrix& m) {
    require_square(m, "AntiSymMatrix");
    return AntiSymMatrix(Matrix(0.5 * (m - m.transpose())));
}

AntiSymMatrix AntiSymMatrix::zero(Eigen::Index d) { return AntiSymMatrix(Matrix::Zero(d, d)); }

AntiSymMatrix AntiSymMatrix::standard(Eigen::Index d) {
    Matrix j = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i + 1 < d; i += 2) {
        j(i, i + 1) = 1.0;
        j(i + 1, i) = -1.0;
    }
    return AntiSymMatrix(j);
}

SymEig sym_eig(const SymMatrix& s) {
    const Eigen::Index n = s.dim();
    Matrix a = s.mat();
    Matrix v = Matrix::Identity(n, n);
    const double norm = a.norm();
    const double negligible = kEps * kEps * norm;

    const int max_sweeps = static_cast<int>(std::max<Eigen::Index>(1, 100 * n));
    bool converged = norm == 0.0 || n <= 1;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= negligible) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                converged = false;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) {
        throw NumericalError("sym_eig: Jacobi iteration did not converge");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    SymEig out{Vector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[k], order[k]);
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

namespace {

SymMatrix spd_function(const SymMatrix& s, double (*f)(double), const char* who) {
    const SymEig e = sym_eig(s);
    if (e.values.size() > 0 && !(e.values(0) > 0.0)) {
        throw std::invalid_argument(std::string(who) + ": matrix is not positive definite");
    }
    const Vector fv = e.values.unaryExpr(f);
    return SymMatrix::from_symmetric_product(e.vectors * fv.asDiagonal() *
                                             e.vectors.transpose());
}

}  // namespace

SymMatrix spd_sqrt(const SymMatrix& s) {
    return spd_function(s, [](double x) { return std::sqrt(x); }, "spd_sqrt");
}

SymMatrix spd_inv_sqrt(const SymMatrix& s) {
    return spd_function(s, [](double x) { return 1.0 / std::sqrt(x); }, "spd_inv_sqrt");
}

SymMatrix spd_inverse(const SymMatrix& s) {
    return spd_function(s, [](double x) { return 1.0 / x; }, "spd_inverse");
}

Matrix expm(const Matrix& x) {
    require_square(x, "expm");
    if (!x.allFinite()) throw NumericalError("expm: non-finite input");
    const Eigen::Index n = x.rows();
    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0,
                                   7771770303897600.0,  1187353796428800.0,
                                   129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,
                                   1323241920.0,        40840800.0,
                                   960960.0,            16380.0,
                                   182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double norm1 = n == 0 ? 0.0 : x.cwiseAbs().colwise().sum().maxCoeff();
    // Below unit roundoff the first-order term is exact in double precision.
    if (norm1 <= 0.5 * kEps) return Matrix::Identity(n, n) + x;
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    }
    const Matrix a = x / std::ldexp(1.0, squarings);
    const Matrix id = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                          b[5] * a4 + b[3] * a2 + b[1] * id);
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                     b[2] * a2 + b[0] * id;
    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) r = (r * r).eval();
    if (!r.allFinite()) throw NumericalError("expm: overflow");
    return r;
}

SymMatrix solve_lyapunov(const Matrix& a, const SymMatrix& rhs) {
    require_square(a, "solve_lyapunov");
    const Eigen::Index n = a.rows();
    if (rhs.dim() != n) throw std::invalid_argument("solve_lyapunov: dimension mismatch");

    // Unknown index for the pair (i <= j).
    std::vector<Eigen::Index> base(static_cast<std::size_t>(n) + 1, 0);
    for (Eigen::Index i = 0; i < n; ++i) base[i + 1] = base[i] + (n - i);
    auto idx = [&](Eigen::Index i, Eigen::Index j) {
        if (i > j) std::swap(i, j);
        return base[i] + (j - i);
    };
    const Eigen::Index m = n * (n + 1) / 2;

    // (A C + C A^T)_{ij} = sum_k A_ik C_kj + C_ik A_jk
    Matrix op = Matrix::Zero(m, m);
    Vector b(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const Eigen::Index row = idx(i, j);
            b(row) = rhs.mat()(i, j);
            for (Eigen::Index k = 0; k < n; ++k) {
                op(row, idx(k, j)) += a(i, k);
                op(row, idx(i, k)) += a(j, k);
            }
        }
    }

    Eigen::FullPivLU<Matrix> lu(op);
    const double rcond = m == 0 ? 1.0 : lu.rcond();
    if (!lu.isInvertible() || !(rcond > 1e-14)) {
        throw DegenerateDriftError("Lyapunov operator is singular (rcond=" +
                                   std::to_string(rcond) + ")");
    }
    const Vector sol = lu.solve(b);
    Matrix c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) c(i, j) = c(j, i) = sol(idx(i, j));
    if (!c.allFinite()) throw NumericalError("solve_lyapunov: non-finite solution");

    const double scale = max_abs(a) * max_abs(c) + max_abs(rhs.mat());
    const double residual = max_abs(a * c + c * a.transpose() - rhs.mat());
    if (residual > 1e-8 * scale) {
        throw NumericalError("solve_lyapunov: residual check failed");
    }
    return SymMatrix(c);
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    require_square(a, "solve_linear");
    if (a.rows() != b.size()) throw std::invalid_argument("solve_linear: dimension mismatch");
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) throw NumericalError("solve_linear: singular matrix");
    if (lu.rcond() < 1e-14) throw NumericalError("solve_linear: matrix is ill-conditioned");
    Vector x = lu.solve(b);
    if (!x.allFinite()) throw NumericalError("solve_linear: non-finite solution");
    return x;
}

Matrix schur_block_tl_inverse(const Matrix& u, const Matrix& v, const Matrix& w,
                              const Matrix& x) {
    Eigen::FullPivLU<Matrix> xlu(x);
    if (!xlu.isInvertible()) throw NumericalError("schur_block_tl_inverse: X is singular");
    const Matrix schur = u - v * xlu.solve(w);
    Eigen::FullPivLU<Matrix> slu(schur);
    if (!slu.isInvertible()) {
        throw NumericalError("schur_block_tl_inverse: Schur complement is singular");
    }
    return slu.inverse();
}

std::vector<Complex> eig_general(const Matrix& b) {
    require_square(b, "eig_general");
    Eigen::EigenSolver<Matrix> es(b, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericalError("eig_general: QR iteration failed");
    std::vector<Complex> out(static_cast<std::size_t>(b.rows()));
    for (Eigen::Index i = 0; i < b.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

Matrix psd_factor(const Matrix& x) {
    require_square(x, "psd_factor");
    const SymEig e = sym_eig(SymMatrix::from_symmetric_product(x));
    const double tol = 1e-13 * std::max(1.0, max_abs(x));
    Vector root(e.values.size());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        const double lam = e.values(i);
        if (lam < -tol) throw NumericalError("psd_factor: matrix is not positive semidefinite");
        root(i) = std::sqrt(std::max(lam, 0.0));
    }
    return e.vectors * root.asDiagonal();
}

}  // namespace langevin
