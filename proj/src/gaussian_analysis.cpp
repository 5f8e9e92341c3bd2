#include "langevin/gaussian_analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "langevin/errors.hpp"

namespace langevin {

namespace {

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string("dimension mismatch: ") + what);
    }
}

void require_spd(const SymMatrix& m, const char* what) {
    const SymEig e = sym_eig(m);
    if (e.values.size() == 0 || !(e.values(0) > 0.0)) {
        throw std::invalid_argument(std::string(what) + " must be positive definite");
    }
}

bool close_rel(const Matrix& a, const Matrix& b, double rel_tol) {
    return max_abs(a - b) <= rel_tol * std::max({max_abs(a), max_abs(b), 1e-300});
}

}  // namespace

PerturbationConfig PerturbationConfig::unit(double gamma, double mu, double nu,
                                            const AntiSymMatrix& j) {
    const Eigen::Index d = j.dim();
    PerturbationConfig cfg;
    cfg.mu = mu;
    cfg.nu = nu;
    cfg.gamma = gamma;
    cfg.S = SymMatrix::identity(d);
    cfg.M = SymMatrix::identity(d);
    cfg.Gamma = SymMatrix(Matrix(gamma * Matrix::Identity(d, d)));
    cfg.J1 = j;
    cfg.J2 = j;
    return cfg;
}

PerturbationConfig PerturbationConfig::matched(const SymMatrix& s, double gamma, double mu,
                                               double nu, const AntiSymMatrix& j1) {
    PerturbationConfig cfg;
    cfg.mu = mu;
    cfg.nu = nu;
    cfg.gamma = gamma;
    cfg.S = s;
    cfg.M = s;
    cfg.Gamma = SymMatrix(Matrix(gamma * s.mat()));
    cfg.J1 = j1;
    cfg.J2 = AntiSymMatrix::from_antisymmetric_product(s.mat() * j1.mat() * s.mat());
    return cfg;
}

void PerturbationConfig::validate() const {
    const Eigen::Index d = dim();
    if (d < 1) throw std::invalid_argument("PerturbationConfig: empty dimension");
    require_dim(M.dim(), d, "M");
    require_dim(Gamma.dim(), d, "Gamma");
    require_dim(J1.dim(), d, "J1");
    require_dim(J2.dim(), d, "J2");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("PerturbationConfig: gamma must be positive");
    }
    if (!std::isfinite(mu) || !std::isfinite(nu)) {
        throw std::invalid_argument("PerturbationConfig: non-finite perturbation strength");
    }
    require_spd(S, "S");
    require_spd(M, "M");
    require_spd(Gamma, "Gamma");
}

bool PerturbationConfig::has_matched_structure(double rel_tol) const {
    return close_rel(M, S, rel_tol) && close_rel(Gamma, gamma * S.mat(), rel_tol) &&
           close_rel(J2, S.mat() * J1.mat() * S.mat(), rel_tol);
}

QuadraticObservable QuadraticObservable::centered(const SymMatrix& k, const Vector& l,
                                                  const SymMatrix& precision) {
    const SymMatrix cov = spd_inverse(precision);
    return QuadraticObservable{k, l, -(k.mat() * cov.mat()).trace()};
}

UnitForm to_unit_form(const PerturbationConfig& cfg, const QuadraticObservable& f) {
    cfg.validate();
    require_dim(f.dim(), cfg.dim(), "observable K");
    require_dim(f.l.size(), cfg.dim(), "observable l");
    if (!cfg.has_matched_structure(1e-10)) {
        throw std::invalid_argument(
            "analysis requires M = S, Gamma = gamma S and J2 = S J1 S");
    }
    const SymMatrix root = spd_sqrt(cfg.S);
    const SymMatrix inv_root = spd_inv_sqrt(cfg.S);
    return UnitForm{
        cfg.gamma,
        cfg.mu,
        cfg.nu,
        AntiSymMatrix::from_antisymmetric_product(root.mat() * cfg.J1.mat() * root.mat()),
        SymMatrix::from_symmetric_product(inv_root.mat() * f.K.mat() * inv_root.mat()),
        inv_root.mat() * f.l,
    };
}

Matrix a_matrix(double gamma, double mu, double nu, const Matrix& j) {
    const Eigen::Index d = j.rows();
    const Matrix id = Matrix::Identity(d, d);
    Matrix a(2 * d, 2 * d);
    a.topLeftCorner(d, d) = -mu * j;
    a.topRightCorner(d, d) = id;
    a.bottomLeftCorner(d, d) = -id;
    a.bottomRightCorner(d, d) = gamma * id - nu * j;
    return a;
}

Matrix a_matrix(const PerturbationConfig& cfg) {
    const QuadraticObservable none{SymMatrix::zero(cfg.dim()), Vector::Zero(cfg.dim()), 0.0};
    const UnitForm u = to_unit_form(cfg, none);
    return a_matrix(u.gamma, u.mu, u.nu, u.J);
}

Matrix drift_matrix(double gamma, double mu, double nu, const Matrix& j) {
    return a_matrix(gamma, mu, nu, j).transpose();
}

Matrix phase_drift_matrix(const PerturbationConfig& cfg) {
    cfg.validate();
    const Eigen::Index d = cfg.dim();
    const Matrix m_inv = spd_inverse(cfg.M).mat();
    Matrix b(2 * d, 2 * d);
    b.topLeftCorner(d, d) = cfg.mu * cfg.J1.mat() * cfg.S.mat();
    b.topRightCorner(d, d) = -m_inv;
    b.bottomLeftCorner(d, d) = cfg.S.mat();
    b.bottomRightCorner(d, d) = (cfg.Gamma.mat() + cfg.nu * cfg.J2.mat()) * m_inv;
    return b;
}

VarianceDetail asym_variance_detail(const PerturbationConfig& cfg, const QuadraticObservable& f) {
    const UnitForm u = to_unit_form(cfg, f);
    const Eigen::Index d = cfg.dim();
    const Matrix a = a_matrix(u.gamma, u.mu, u.nu, u.J);

    Matrix kbar = Matrix::Zero(2 * d, 2 * d);
    kbar.topLeftCorner(d, d) = u.K.mat();
    const SymMatrix c = solve_lyapunov(a, SymMatrix(kbar));

    Vector lbar = Vector::Zero(2 * d);
    lbar.head(d) = u.l;
    Vector dvec = Vector::Zero(2 * d);
    if (lbar.any()) dvec = solve_linear(a, lbar);

    const double trace_k = u.K.mat().trace();
    const Matrix cpp = c.mat().bottomRightCorner(d, d);
    const double lhs = 2.0 * u.gamma * cpp.trace();
    const double residual = std::abs(lhs - trace_k);
    const double scale =
        std::abs(trace_k) + 2.0 * u.gamma * cpp.diagonal().cwiseAbs().sum() + u.K.mat().norm();
    if (residual > 1e-8 * std::max(scale, 1e-300) && scale > 0.0) {
        throw NumericalError("asym_variance: momentum trace identity violated");
    }

    const double quad = 2.0 * (c.mat().topLeftCorner(d, d) * u.K.mat()).trace();
    const double lin = dvec.dot(lbar);
    const double sigma2 = quad + lin;
    const double mag = std::abs(quad) + std::abs(lin);
    if (sigma2 < -1e-9 * mag) throw NumericalError("asym_variance: negative variance");
    return VarianceDetail{std::max(sigma2, 0.0), c, dvec, residual};
}

double asym_variance(const PerturbationConfig& cfg, const QuadraticObservable& f) {
    return asym_variance_detail(cfg, f).sigma2;
}

NuRule NuRule::parse(const std::string& text) {
    if (text == "equal") return equal();
    if (text == "opposed") return opposed();
    auto with_arg = [&](const std::string& head) -> std::optional<double> {
        if (text.size() <= head.size() + 2 || text.rfind(head + "(", 0) != 0 || text.back() != ')') {
            return std::nullopt;
        }
        const char* first = text.data() + head.size() + 1;
        const char* last = text.data() + text.size() - 1;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
            throw std::invalid_argument("nu rule: bad number in '" + text + "'");
        }
        return v;
    };
    if (auto r = with_arg("scaled")) return scaled(*r);
    if (auto v = with_arg("fixed")) return fixed(*v);
    throw std::invalid_argument("nu rule: expected equal, opposed, scaled(r) or fixed(v), got '" +
                                text + "'");
}

double NuRule::apply(double mu) const {
    switch (kind_) {
        case Kind::equal: return mu;
        case Kind::scaled: return value_ * mu;
        case Kind::opposed: return -mu;
        case Kind::fixed: return value_;
    }
    return mu;
}

std::string NuRule::to_string() const {
    auto num = [](double v) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    switch (kind_) {
        case Kind::equal: return "equal";
        case Kind::opposed: return "opposed";
        case Kind::scaled: return "scaled(" + num(value_) + ")";
        case Kind::fixed: return "fixed(" + num(value_) + ")";
    }
    return "equal";
}

std::vector<ThetaPoint> theta_surface(const PerturbationConfig& base, const QuadraticObservable& f,
                                      const std::vector<double>& mu_grid, const NuRule& rule) {
    std::vector<ThetaPoint> out;
    out.reserve(mu_grid.size());
    for (double mu : mu_grid) {
        if (!std::isfinite(mu)) throw std::invalid_argument("theta_surface: non-finite mu");
        PerturbationConfig cfg = base;
        cfg.mu = mu;
        cfg.nu = rule.apply(mu);
        out.push_back(ThetaPoint{cfg.mu, cfg.nu, asym_variance(cfg, f)});
    }
    return out;
}

ThetaDerivatives theta_hessian_quadratic(double gamma, const SymMatrix& k, const AntiSymMatrix& j) {
    require_dim(j.dim(), k.dim(), "J");
    const Matrix& km = k.mat();
    const Matrix& jm = j.mat();
    const double t1 = (jm * km * jm * km).trace();
    const double t2 = (jm * jm * km * km).trace();
    const double g = gamma, g3 = gamma * gamma * gamma;
    ThetaDerivatives out;
    out.gradient.setZero();
    out.hessian(0, 0) = -(g + 1.0 / g3 + g3) * (t1 - t2) - (2.0 / g) * t1;
    out.hessian(0, 1) = (1.0 / g3 + 1.0 / g - g) * t2 + (-1.0 / g3 + 1.0 / g + g) * t1;
    out.hessian(1, 0) = out.hessian(0, 1);
    out.hessian(1, 1) = (1.0 / g3 - 1.0 / g) * t2 - (1.0 / g3 + 1.0 / g) * t1;
    return out;
}

ThetaDerivatives theta_hessian_linear(double gamma, const Vector& l, const AntiSymMatrix& j) {
    require_dim(j.dim(), l.size(), "J");
    const double jl2 = (j.mat() * l).squaredNorm();
    ThetaDerivatives out;
    out.gradient.setZero();
    out.hessian << -2.0 * gamma * gamma * gamma * jl2, 2.0 * gamma * jl2, 2.0 * gamma * jl2, 0.0;
    return out;
}

double theta_linear_closed(double gamma, double mu, double nu, const Vector& l,
                           const AntiSymMatrix& j) {
    require_dim(j.dim(), l.size(), "J");
    const Eigen::Index d = l.size();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix top_left =
        schur_block_tl_inverse(-mu * j.mat(), id, -id, gamma * id - nu * j.mat());
    return l.dot(top_left * l);
}

double limiting_variance_optimal(double gamma, const SymMatrix& s, const SymMatrix& k) {
    require_dim(k.dim(), s.dim(), "K");
    const Eigen::Index d = s.dim();
    const double weight = (spd_inverse(s).mat() * k.mat()).trace() / static_cast<double>(d);
    const SymMatrix k1(Matrix(weight * s.mat()));
    const PerturbationConfig cfg =
        PerturbationConfig::matched(s, gamma, 0.0, 0.0, AntiSymMatrix::zero(d));
    return asym_variance(cfg, QuadraticObservable{k1, Vector::Zero(d), 0.0});
}

double invariance_commuting_check(double gamma, const SymMatrix& k, const Vector& l,
                                  const AntiSymMatrix& j, const std::vector<double>& mu_grid) {
    require_dim(j.dim(), k.dim(), "J");
    require_dim(l.size(), k.dim(), "l");
    const double scale = std::max(1.0, max_abs(j) * std::max(max_abs(k), l.cwiseAbs().maxCoeff()));
    if (max_abs(commutator(j, k)) > 1e-12 * scale) {
        throw std::invalid_argument("invariance_commuting_check: J and K do not commute");
    }
    if (l.size() > 0 && (j.mat() * l).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw std::invalid_argument("invariance_commuting_check: l is not in the kernel of J");
    }
    const QuadraticObservable f{k, l, 0.0};
    const double base = asym_variance(PerturbationConfig::unit(gamma, 0.0, 0.0, j), f);
    double worst = 0.0;
    for (double mu : mu_grid) {
        const double v = asym_variance(PerturbationConfig::unit(gamma, mu, mu, j), f);
        worst = std::max(worst, std::abs(v - base));
    }
    return worst;
}

BasicInequalities basic_inequalities(double gamma, const SymMatrix& k, const AntiSymMatrix& j) {
    require_dim(j.dim(), k.dim(), "J");
    if (!(gamma > 0.0)) throw std::invalid_argument("basic_inequalities: gamma must be positive");
    const double g3 = gamma * gamma * gamma;
    const Matrix& km = k.mat();
    const Matrix& jm = j.mat();
    return BasicInequalities{
        gamma - 4.0 / g3 - g3 - 1.0 / gamma,
        (jm * km * jm * km).trace() - (jm * jm * km * km).trace(),
    };
}

}  // namespace langevin
