#pragma once

// Exact asymptotic variance of time averages of quadratic observables under
// perturbed underdamped Langevin dynamics with a Gaussian target.
//
// Dynamics:
//   dq = M^{-1} p dt - mu J1 grad V dt
//   dp = -grad V dt - nu J2 M^{-1} p dt - Gamma M^{-1} p dt + sqrt(2 Gamma) dW
//
// With V = q.Sq/2 and the matched structure M = S, Gamma = gamma S,
// J2 = S J1 S, the change of variables q -> S^{1/2} q reduces everything to
// unit covariance with J = S^{1/2} J1 S^{1/2}.

#include <string>
#include <vector>

#include "langevin/matkit.hpp"

namespace langevin {

struct PerturbationConfig {
    double mu = 0.0;
    double nu = 0.0;
    double gamma = 1.0;
    SymMatrix S;      // target precision
    SymMatrix M;      // mass
    SymMatrix Gamma;  // friction
    AntiSymMatrix J1;
    AntiSymMatrix J2;

    Eigen::Index dim() const { return S.dim(); }

    // S = M = I, Gamma = gamma I, J1 = J2 = J.
    static PerturbationConfig unit(double gamma, double mu, double nu, const AntiSymMatrix& j);
    // M = S, Gamma = gamma S, J2 = S J1 S.
    static PerturbationConfig matched(const SymMatrix& s, double gamma, double mu, double nu,
                                      const AntiSymMatrix& j1);

    // Dimensions agree, gamma > 0, S, M, Gamma SPD. Throws std::invalid_argument.
    void validate() const;
    bool has_matched_structure(double rel_tol = 1e-12) const;
};

struct QuadraticObservable {
    SymMatrix K;
    Vector l;
    double c = 0.0;

    Eigen::Index dim() const { return K.dim(); }
    double operator()(const Vector& q) const { return q.dot(K.mat() * q) + l.dot(q) + c; }

    // f(q) = q.Kq + l.q - Tr(K S^{-1}), which has mean zero under N(0, S^{-1}).
    static QuadraticObservable centered(const SymMatrix& k, const Vector& l,
                                        const SymMatrix& precision);
};

// Unit-covariance data equivalent to a matched configuration.
struct UnitForm {
    double gamma;
    double mu;
    double nu;
    AntiSymMatrix J;
    SymMatrix K;
    Vector l;
};

UnitForm to_unit_form(const PerturbationConfig& cfg, const QuadraticObservable& f);

// A = [[-mu J, I], [-I, gamma I - nu J]] of the unit form.
Matrix a_matrix(const PerturbationConfig& cfg);
Matrix a_matrix(double gamma, double mu, double nu, const Matrix& j);
// B = A^T.
Matrix drift_matrix(double gamma, double mu, double nu, const Matrix& j);

// Drift of X = (q, p) in original coordinates, dX = -B X dt + noise, for any
// configuration: B = [[mu J1 S, -M^{-1}], [S, (Gamma + nu J2) M^{-1}]].
Matrix phase_drift_matrix(const PerturbationConfig& cfg);

struct VarianceDetail {
    double sigma2;
    SymMatrix C;  // A C + C A^T = blockdiag(K, 0)
    Vector D;     // A D = (l, 0)
    double trace_residual;  // |2 gamma Tr_p C - Tr K|
};

// sigma^2 = 2 Tr(C Kbar) + D.lbar. Requires matched structure; checks the
// momentum trace identity 2 gamma Tr_p C = Tr K on the solution.
VarianceDetail asym_variance_detail(const PerturbationConfig& cfg, const QuadraticObservable& f);
double asym_variance(const PerturbationConfig& cfg, const QuadraticObservable& f);

// Rule tying nu to mu along a sweep.
class NuRule {
public:
    enum class Kind { equal, scaled, opposed, fixed };

    static NuRule equal() { return NuRule(Kind::equal, 1.0); }
    static NuRule scaled(double r) { return NuRule(Kind::scaled, r); }
    static NuRule opposed() { return NuRule(Kind::opposed, -1.0); }
    static NuRule fixed(double nu) { return NuRule(Kind::fixed, nu); }
    // "equal", "opposed", "scaled(r)", "fixed(v)". Throws std::invalid_argument.
    static NuRule parse(const std::string& text);

    double apply(double mu) const;
    Kind kind() const { return kind_; }
    double parameter() const { return value_; }
    std::string to_string() const;

private:
    NuRule(Kind kind, double value) : kind_(kind), value_(value) {}
    Kind kind_;
    double value_;
};

struct ThetaPoint {
    double mu;
    double nu;
    double sigma2;
};

std::vector<ThetaPoint> theta_surface(const PerturbationConfig& base, const QuadraticObservable& f,
                                      const std::vector<double>& mu_grid, const NuRule& rule);

struct ThetaDerivatives {
    Eigen::Vector2d gradient;
    Eigen::Matrix2d hessian;  // order (mu, nu)
};

// Derivatives at (mu, nu) = (0, 0) for f(q) = q.Kq in unit form.
ThetaDerivatives theta_hessian_quadratic(double gamma, const SymMatrix& k, const AntiSymMatrix& j);
// Derivatives at (0, 0) for f(q) = l.q in unit form.
ThetaDerivatives theta_hessian_linear(double gamma, const Vector& l, const AntiSymMatrix& j);

// l.(-mu J + (gamma - nu J)^{-1})^{-1} l, the linear-observable variance.
double theta_linear_closed(double gamma, double mu, double nu, const Vector& l,
                           const AntiSymMatrix& j);

// Infimum over admissible perturbations of the mu = nu -> infinity variance:
// the unperturbed variance of q.K1q with K1 = Tr(S^{-1}K)/d * S.
double limiting_variance_optimal(double gamma, const SymMatrix& s, const SymMatrix& k);

// max over the grid of |sigma^2(mu) - sigma^2(0)| along mu = nu in unit form.
// Requires [J, K] = 0 and J l = 0; throws std::invalid_argument otherwise.
double invariance_commuting_check(double gamma, const SymMatrix& k, const Vector& l,
                                  const AntiSymMatrix& j, const std::vector<double>& mu_grid);

struct BasicInequalities {
    double gamma_factor;  // gamma - 4/gamma^3 - gamma^3 - 1/gamma, always < 0
    double trace_gap;     // Tr(JKJK) - Tr(J^2 K^2), >= 0 with equality iff [J,K] = 0
};

BasicInequalities basic_inequalities(double gamma, const SymMatrix& k, const AntiSymMatrix& j);

}  // namespace langevin
