#include "langevin/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "langevin/errors.hpp"

namespace langevin {

Vector RngStream::normal_vector(Eigen::Index d) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = normal_(engine_);
    return v;
}

Vector rk4_flow(const Vector& q, double h, const PotentialTarget& target, const Matrix& j) {
    auto f = [&](const Vector& x) -> Vector {
        Vector g = target.gradient(x);
        if (!g.allFinite()) throw NumericalError("rk4_flow: non-finite force");
        return -(j * g);
    };
    const Vector k1 = f(q);
    const Vector k2 = f(q + 0.5 * h * k1);
    const Vector k3 = f(q + 0.5 * h * k2);
    const Vector k4 = f(q + h * k3);
    return q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

OuStepCache OuStepCache::build(const Matrix& mass, const Matrix& friction, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("OuStepCache: dt must be positive");
    const Matrix m_inv = spd_inverse(SymMatrix(mass)).mat();
    OuStepCache c;
    c.E = expm(-dt * friction * m_inv);
    c.noise_cov = mass - c.E * mass * c.E.transpose();
    c.noise_cov = (0.5 * (c.noise_cov + c.noise_cov.transpose())).eval();
    c.L = psd_factor(c.noise_cov);
    return c;
}

OuStepCache OuStepCache::build(const PerturbationConfig& cfg, double dt) {
    return build(cfg.M.mat(), cfg.Gamma.mat() + cfg.nu * cfg.J2.mat(), dt);
}

Vector ou_step(const Vector& p, const OuStepCache& cache, RngStream& rng) {
    return cache.E * p + cache.L * rng.normal_vector(p.size());
}

IntegratorKind parse_integrator(const std::string& name) {
    if (name == "baoab") return IntegratorKind::baoab;
    if (name == "perturbed_baoab" || name == "perturbed-baoab") return IntegratorKind::perturbed_baoab;
    if (name == "exact_ou" || name == "exact-ou") return IntegratorKind::exact_ou;
    throw std::invalid_argument("unknown integrator '" + name + "'");
}

std::string to_string(IntegratorKind kind) {
    switch (kind) {
        case IntegratorKind::baoab: return "baoab";
        case IntegratorKind::perturbed_baoab: return "perturbed_baoab";
        case IntegratorKind::exact_ou: return "exact_ou";
    }
    return "baoab";
}

namespace {

void require_finite(const PhaseState& s, const char* who) {
    if (!s.q.allFinite() || !s.p.allFinite()) {
        throw NumericalError(std::string(who) + ": non-finite state");
    }
}

// B A [RK4] O [RK4] A B. Without a flow matrix the RK4 stages are skipped,
// which makes the unperturbed case the plain BAOAB update bit for bit.
class SplittingStepper final : public Stepper {
public:
    SplittingStepper(const PerturbationConfig& cfg, const PotentialTarget& target, double dt,
                     bool perturbed, int substeps)
        : target_(target), dt_(dt), substeps_(substeps) {
        cfg.validate();
        if (target.dim() != cfg.dim()) throw std::invalid_argument("stepper: dimension mismatch");
        if (!(dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
        if (substeps < 1) throw std::invalid_argument("stepper: RK4 substeps must be >= 1");
        m_inv_ = spd_inverse(cfg.M).mat();
        const Matrix friction = perturbed ? Matrix(cfg.Gamma.mat() + cfg.nu * cfg.J2.mat())
                                          : cfg.Gamma.mat();
        cache_ = OuStepCache::build(cfg.M.mat(), friction, dt);
        if (perturbed && cfg.mu != 0.0 && max_abs(cfg.J1) > 0.0) {
            flow_ = cfg.mu * cfg.J1.mat();
            has_flow_ = true;
        }
    }

    void step(PhaseState& s, RngStream& rng) const override {
        const double half = 0.5 * dt_;
        s.p -= half * target_.gradient(s.q);
        s.q += half * (m_inv_ * s.p);
        flow(s.q);
        s.p = ou_step(s.p, cache_, rng);
        flow(s.q);
        s.q += half * (m_inv_ * s.p);
        s.p -= half * target_.gradient(s.q);
    }

    double dt() const override { return dt_; }

private:
    void flow(Vector& q) const {
        if (!has_flow_) return;
        const double h = 0.5 * dt_ / substeps_;
        for (int k = 0; k < substeps_; ++k) q = rk4_flow(q, h, target_, flow_);
    }

    const PotentialTarget& target_;
    double dt_;
    int substeps_;
    Matrix m_inv_;
    OuStepCache cache_;
    Matrix flow_;
    bool has_flow_ = false;
};

class ExactOuStepper final : public Stepper {
public:
    ExactOuStepper(const PerturbationConfig& cfg, const GaussianTarget& target, double dt)
        : dt_(dt), d_(cfg.dim()) {
        if (!(dt > 0.0)) throw std::invalid_argument("exact OU: dt must be positive");
        if (target.dim() != cfg.dim()) throw std::invalid_argument("exact OU: dimension mismatch");
        PerturbationConfig c = cfg;
        c.S = *target.precision();
        const Matrix b = phase_drift_matrix(c);

        Matrix sigma = Matrix::Zero(2 * d_, 2 * d_);
        sigma.topLeftCorner(d_, d_) = spd_inverse(c.S).mat();
        sigma.bottomRightCorner(d_, d_) = c.M.mat();
        Matrix two_q = Matrix::Zero(2 * d_, 2 * d_);
        two_q.bottomRightCorner(d_, d_) = 2.0 * c.Gamma.mat();
        const double scale = max_abs(b) * max_abs(sigma) + max_abs(two_q);
        if (max_abs(b * sigma + sigma * b.transpose() - two_q) > 1e-10 * scale) {
            throw NumericalError("exact OU: stationary covariance identity failed");
        }

        f_ = expm(-dt * b);
        Matrix cov = sigma - f_ * sigma * f_.transpose();
        l_ = psd_factor(0.5 * (cov + cov.transpose()));
    }

    void step(PhaseState& s, RngStream& rng) const override {
        Vector x(2 * d_);
        x << s.q, s.p;
        const Vector next = f_ * x + l_ * rng.normal_vector(2 * d_);
        s.q = next.head(d_);
        s.p = next.tail(d_);
    }

    double dt() const override { return dt_; }

private:
    double dt_;
    Eigen::Index d_;
    Matrix f_;
    Matrix l_;
};

}  // namespace

std::unique_ptr<Stepper> make_stepper(IntegratorKind kind, const PerturbationConfig& cfg,
                                      const PotentialTarget& target, double dt,
                                      int rk4_substeps) {
    switch (kind) {
        case IntegratorKind::baoab:
            return std::make_unique<SplittingStepper>(cfg, target, dt, false, rk4_substeps);
        case IntegratorKind::perturbed_baoab:
            return std::make_unique<SplittingStepper>(cfg, target, dt, true, rk4_substeps);
        case IntegratorKind::exact_ou: {
            const auto* gauss = dynamic_cast<const GaussianTarget*>(&target);
            if (gauss == nullptr) {
                throw std::invalid_argument("exact OU integrator requires a Gaussian target");
            }
            return std::make_unique<ExactOuStepper>(cfg, *gauss, dt);
        }
    }
    throw std::invalid_argument("unknown integrator");
}

PhaseState baoab_step(const PhaseState& s, double dt, const PerturbationConfig& cfg,
                      const PotentialTarget& target, RngStream& rng) {
    PhaseState out = s;
    SplittingStepper(cfg, target, dt, false, 1).step(out, rng);
    require_finite(out, "baoab_step");
    return out;
}

PhaseState perturbed_baoab_step(const PhaseState& s, double dt, const PerturbationConfig& cfg,
                                const PotentialTarget& target, RngStream& rng) {
    PhaseState out = s;
    SplittingStepper(cfg, target, dt, true, 1).step(out, rng);
    require_finite(out, "perturbed_baoab_step");
    return out;
}

PhaseState ou_exact_step(const PhaseState& s, double dt, const PerturbationConfig& cfg,
                         const GaussianTarget& target, RngStream& rng) {
    PhaseState out = s;
    ExactOuStepper(cfg, target, dt).step(out, rng);
    return out;
}

SimulationResult simulate(const PerturbationConfig& cfg, const PotentialTarget& target,
                          const SimulationSpec& spec, const Observable& f) {
    if (!(spec.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
    if (!(spec.horizon > spec.burn_in) || spec.burn_in < 0.0) {
        throw std::invalid_argument("simulate: need T > T0 >= 0");
    }
    const Eigen::Index d = target.dim();
    const auto steps = static_cast<std::int64_t>(std::llround(spec.horizon / spec.dt));
    const auto burn = static_cast<std::int64_t>(std::llround(spec.burn_in / spec.dt));
    if (steps <= burn) throw std::invalid_argument("simulate: no steps after burn-in");

    const auto stepper = make_stepper(spec.integrator, cfg, target, spec.dt, spec.rk4_substeps);
    PhaseState s{spec.q0.size() ? spec.q0 : Vector(Vector::Ones(d)),
                 spec.p0.size() ? spec.p0 : Vector(Vector::Zero(d))};
    if (s.q.size() != d || s.p.size() != d) {
        throw std::invalid_argument("simulate: initial condition has wrong dimension");
    }
    RngStream rng(spec.seed);

    double mean = 0.0;
    std::int64_t count = 0;
    for (std::int64_t n = 0; n < steps; ++n) {
        if (n >= burn) {
            ++count;
            mean += (f(s.q) - mean) / static_cast<double>(count);
        }
        stepper->step(s, rng);
        if (!s.q.allFinite() || !s.p.allFinite()) {
            throw NumericalError("simulate: non-finite state at step " + std::to_string(n + 1));
        }
    }
    if (!std::isfinite(mean)) throw NumericalError("simulate: non-finite observable average");
    return SimulationResult{mean, steps, count, s};
}

OverdampedPair overdamped_pair(const PerturbationConfig& cfg, const PotentialTarget& target,
                               double eps, double horizon, double dt, std::uint64_t seed,
                               const Vector& q0) {
    cfg.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("overdamped_pair: eps must be positive");
    if (!(dt > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("overdamped_pair: dt and T must be positive");
    }
    const Eigen::Index d = cfg.dim();
    if (target.dim() != d) throw std::invalid_argument("overdamped_pair: dimension mismatch");

    const Matrix m_inv = spd_inverse(cfg.M).mat();
    const Matrix friction = cfg.Gamma.mat() + cfg.nu * cfg.J2.mat();
    Eigen::FullPivLU<Matrix> lu(friction);
    if (!lu.isInvertible()) throw NumericalError("overdamped_pair: nu J2 + Gamma is singular");
    const Matrix friction_inv = lu.inverse();
    const Matrix noise = spd_sqrt(SymMatrix(Matrix(2.0 * cfg.Gamma.mat()))).mat();
    const Matrix limit_noise = friction_inv * noise;
    const Matrix mu_j1 = cfg.mu * cfg.J1.mat();
    const Matrix p_drag = friction * m_inv / (eps * eps);

    const auto steps = static_cast<std::int64_t>(std::llround(horizon / dt));
    Vector q = q0.size() ? q0 : Vector(Vector::Ones(d));
    if (q.size() != d) throw std::invalid_argument("overdamped_pair: q0 has wrong dimension");
    Vector p = Vector::Zero(d);
    Vector y = q;

    OverdampedPair out;
    out.scaled_path.reserve(static_cast<std::size_t>(steps) + 1);
    out.limiting_path.reserve(static_cast<std::size_t>(steps) + 1);
    out.scaled_path.push_back(q);
    out.limiting_path.push_back(y);
    out.sup_error = 0.0;

    RngStream rng(seed);
    const double sqrt_dt = std::sqrt(dt);
    for (std::int64_t n = 0; n < steps; ++n) {
        const Vector dw = sqrt_dt * rng.normal_vector(d);
        const Vector gq = target.gradient(q);
        const Vector gy = target.gradient(y);
        const Vector q_next = q + dt * ((m_inv * p) / eps - mu_j1 * gq);
        p += dt * (-gq / eps - p_drag * p) + (noise * dw) / eps;
        q = q_next;
        y += dt * (-(friction_inv * gy) - mu_j1 * gy) + limit_noise * dw;
        if (!q.allFinite() || !p.allFinite() || !y.allFinite()) {
            throw NumericalError("overdamped_pair: non-finite state at step " +
                                 std::to_string(n + 1));
        }
        out.scaled_path.push_back(q);
        out.limiting_path.push_back(y);
        out.sup_error = std::max(out.sup_error, (q - y).norm());
    }
    return out;
}

}  // namespace langevin
