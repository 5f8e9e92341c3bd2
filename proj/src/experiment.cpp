#include "langevin/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "langevin/errors.hpp"

namespace langevin {

namespace {

// Runs task(i) for i in [0, count) on up to `workers` threads. Tasks own
// their outputs, so completion order never affects results.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    const std::size_t threads =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) task(i);
        });
    }
    for (auto& th : pool) th.join();
}

template <class F>
auto as_config_error(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

Eigen::Index TargetSpec::dim() const {
    return kind == Kind::gaussian ? precision.rows() : static_cast<Eigen::Index>(grid);
}

std::unique_ptr<PotentialTarget> TargetSpec::build() const {
    return as_config_error([&]() -> std::unique_ptr<PotentialTarget> {
        if (kind == Kind::gaussian) return std::make_unique<GaussianTarget>(SymMatrix(precision));
        return std::make_unique<BridgeTarget>(bridge_build(grid, beta));
    });
}

SymMatrix TargetSpec::reference_precision() const {
    return as_config_error([&] {
        if (kind == Kind::gaussian) return SymMatrix(precision);
        return bridge_precision(bridge_build(grid, beta));
    });
}

QuadraticObservable ObservableSpec::build(Eigen::Index d) const {
    return as_config_error([&] {
        switch (kind) {
            case Kind::norm2:
                return QuadraticObservable{SymMatrix::identity(d), Vector::Zero(d), c};
            case Kind::sum:
                return QuadraticObservable{SymMatrix::zero(d), Vector::Ones(d), c};
            case Kind::custom: break;
        }
        const Matrix k = K.size() ? K : Matrix(Matrix::Zero(d, d));
        const Vector lv = l.size() ? l : Vector(Vector::Zero(d));
        if (k.rows() != d || k.cols() != d || lv.size() != d) {
            throw ConfigError("observable: K and l must match the target dimension");
        }
        return QuadraticObservable{SymMatrix(k), lv, c};
    });
}

void ExperimentConfig::validate() const {
    if (target.kind == TargetSpec::Kind::gaussian) {
        if (target.precision.rows() < 1 || target.precision.rows() != target.precision.cols()) {
            throw ConfigError("target.precision must be a nonempty square matrix");
        }
    } else {
        if (target.grid < 1) throw ConfigError("target.grid must be >= 1");
        if (!(target.beta > 0.0)) throw ConfigError("target.beta must be positive");
    }
    if (!(dt > 0.0)) throw ConfigError("integrator.dt must be positive");
    if (!(dt < horizon)) throw ConfigError("integrator.dt must be smaller than integrator.horizon");
    if (burn_in < 0.0 || !(burn_in < horizon)) {
        throw ConfigError("integrator.burn_in must lie in [0, horizon)");
    }
    if (rk4_substeps < 1) throw ConfigError("integrator.rk4_substeps must be >= 1");
    if (replications < 1) throw ConfigError("sweep.replications must be >= 1");
    if (gammas.empty() || mus.empty()) throw ConfigError("sweep.gammas and sweep.mus must be nonempty");
    for (double g : gammas)
        if (!(g > 0.0)) throw ConfigError("sweep.gammas must be positive");
    const Eigen::Index d = target.dim();
    if (perturbation.choice == PerturbationSpec::Choice::matrix &&
        (perturbation.matrix.rows() != d || perturbation.matrix.cols() != d)) {
        throw ConfigError("perturbation.matrix must be d x d");
    }
    observable.build(d);
    if (spectrum.m_max < 1) throw ConfigError("spectrum.m_max must be >= 1");
    if (overdamped.eps.empty()) throw ConfigError("overdamped.eps must be nonempty");
    for (double e : overdamped.eps)
        if (!(e > 0.0)) throw ConfigError("overdamped.eps must be positive");
    if (!(overdamped.dt > 0.0) || !(overdamped.horizon > overdamped.dt)) {
        throw ConfigError("overdamped: need 0 < dt < horizon");
    }
    if (overdamped.seeds < 1) throw ConfigError("overdamped.seeds must be >= 1");
}

ExperimentConfig load_experiment(const ConfigFile& f) {
    ExperimentConfig c;

    const std::string kind = f.get_string("target", "kind", "gaussian");
    if (kind == "gaussian") {
        c.target.kind = TargetSpec::Kind::gaussian;
        if (f.has("target", "precision")) {
            c.target.precision = f.get_matrix("target", "precision");
        } else {
            const auto d = f.get_int("target", "dim", 2);
            if (d < 1) throw ConfigError("target.dim must be >= 1");
            c.target.precision = Matrix::Identity(d, d);
        }
    } else if (kind == "bridge") {
        c.target.kind = TargetSpec::Kind::bridge;
        c.target.grid = static_cast<int>(f.get_int("target", "grid", 15));
        c.target.beta = f.get_double("target", "beta", 1.0);
    } else {
        throw ConfigError("target.kind must be gaussian or bridge, got '" + kind + "'");
    }

    c.integrator = as_config_error(
        [&] { return parse_integrator(f.get_string("integrator", "kind", "perturbed_baoab")); });
    c.dt = f.get_double("integrator", "dt", c.dt);
    c.horizon = f.get_double("integrator", "horizon", c.horizon);
    c.burn_in = f.get_double("integrator", "burn_in", c.burn_in);
    c.rk4_substeps = static_cast<int>(f.get_int("integrator", "rk4_substeps", 1));

    if (f.has("sweep", "gammas")) c.gammas = f.get_list("sweep", "gammas");
    if (f.has("sweep", "mus")) c.mus = f.get_list("sweep", "mus");
    c.nu_rule = as_config_error([&] { return NuRule::parse(f.get_string("sweep", "nu_rule", "equal")); });
    c.replications = static_cast<int>(f.get_int("sweep", "replications", 1));
    const auto seed = f.get_int("sweep", "seed", 1);
    if (seed < 0) throw ConfigError("sweep.seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);

    const std::string j = f.get_string("perturbation", "J", "design");
    if (j == "design") {
        c.perturbation.choice = PerturbationSpec::Choice::design;
    } else if (j == "std") {
        c.perturbation.choice = PerturbationSpec::Choice::standard;
    } else if (j == "zero") {
        c.perturbation.choice = PerturbationSpec::Choice::zero;
    } else if (j == "matrix") {
        c.perturbation.choice = PerturbationSpec::Choice::matrix;
        c.perturbation.matrix = f.get_matrix("perturbation", "matrix");
    } else {
        throw ConfigError("perturbation.J must be design, std, zero or matrix, got '" + j + "'");
    }
    const std::string structure = f.get_string("perturbation", "structure", "matched");
    if (structure == "matched") {
        c.perturbation.structure = PerturbationSpec::Structure::matched;
    } else if (structure == "unit") {
        c.perturbation.structure = PerturbationSpec::Structure::unit;
    } else {
        throw ConfigError("perturbation.structure must be matched or unit");
    }

    const std::string obs = f.get_string("observable", "kind", "norm2");
    if (obs == "norm2") {
        c.observable.kind = ObservableSpec::Kind::norm2;
    } else if (obs == "sum") {
        c.observable.kind = ObservableSpec::Kind::sum;
    } else if (obs == "custom") {
        c.observable.kind = ObservableSpec::Kind::custom;
        if (f.has("observable", "K")) c.observable.K = f.get_matrix("observable", "K");
        if (f.has("observable", "l")) {
            const auto l = f.get_list("observable", "l");
            c.observable.l = Eigen::Map<const Vector>(l.data(), static_cast<Eigen::Index>(l.size()));
        }
    } else {
        throw ConfigError("observable.kind must be norm2, sum or custom, got '" + obs + "'");
    }
    c.observable.c = f.get_double("observable", "c", 0.0);

    c.spectrum.gamma = f.get_double("spectrum", "gamma", c.spectrum.gamma);
    c.spectrum.mu = f.get_double("spectrum", "mu", c.spectrum.mu);
    c.spectrum.nu = f.get_double("spectrum", "nu", c.spectrum.mu);
    c.spectrum.m_max = static_cast<int>(f.get_int("spectrum", "m_max", c.spectrum.m_max));

    if (f.has("overdamped", "eps")) c.overdamped.eps = f.get_list("overdamped", "eps");
    c.overdamped.horizon = f.get_double("overdamped", "horizon", c.overdamped.horizon);
    c.overdamped.dt = f.get_double("overdamped", "dt", c.overdamped.dt);
    c.overdamped.seeds = static_cast<int>(f.get_int("overdamped", "seeds", c.overdamped.seeds));
    c.overdamped.gamma = f.get_double("overdamped", "gamma", c.overdamped.gamma);
    c.overdamped.mu = f.get_double("overdamped", "mu", c.overdamped.mu);
    c.overdamped.nu = f.get_double("overdamped", "nu", c.overdamped.mu);

    c.svg = f.get_bool("output", "svg", true);
    c.wallclock = f.get_bool("output", "wallclock", false);
    c.label = f.get_string("output", "label", "");

    f.reject_unused();
    c.validate();
    return c;
}

ExperimentConfig bridge_preset(bool paper_scale) {
    ExperimentConfig c;
    c.target.kind = TargetSpec::Kind::bridge;
    c.target.grid = 15;
    c.target.beta = 1.0;
    c.integrator = IntegratorKind::perturbed_baoab;
    c.dt = paper_scale ? 1e-4 : 1e-3;
    c.horizon = paper_scale ? 100.0 : 10.0;
    c.burn_in = 1.0;
    c.replications = paper_scale ? 500 : 50;
    c.gammas = {0.01, 0.1, 1.0};
    c.mus = {0.0, 1.0, 5.0};
    c.nu_rule = NuRule::equal();
    c.seed = 20170101;
    c.perturbation.choice = PerturbationSpec::Choice::design;
    c.perturbation.structure = PerturbationSpec::Structure::matched;
    c.observable.kind = ObservableSpec::Kind::norm2;
    c.label = paper_scale ? "bridge preset (large scale)" : "bridge preset (desk scale)";
    c.validate();
    return c;
}

DesignResult run_design(const ExperimentConfig& cfg) {
    const SymMatrix s = cfg.target.reference_precision();
    const QuadraticObservable f = cfg.observable.build(cfg.target.dim());
    if (cfg.perturbation.structure == PerturbationSpec::Structure::unit) return optimal_j_unit(f.K);
    return optimal_j_general(f.K, s);
}

AntiSymMatrix select_j1(const ExperimentConfig& cfg) {
    const Eigen::Index d = cfg.target.dim();
    switch (cfg.perturbation.choice) {
        case PerturbationSpec::Choice::design: return run_design(cfg).J1;
        case PerturbationSpec::Choice::standard: return AntiSymMatrix::standard(d);
        case PerturbationSpec::Choice::zero: return AntiSymMatrix::zero(d);
        case PerturbationSpec::Choice::matrix:
            return as_config_error([&] { return AntiSymMatrix(cfg.perturbation.matrix); });
    }
    return AntiSymMatrix::zero(d);
}

namespace {

PerturbationConfig perturbation_with(const ExperimentConfig& cfg, const SymMatrix& s,
                                     const AntiSymMatrix& j1, double gamma, double mu, double nu) {
    if (cfg.perturbation.structure == PerturbationSpec::Structure::matched) {
        return PerturbationConfig::matched(s, gamma, mu, nu, j1);
    }
    PerturbationConfig p = PerturbationConfig::unit(gamma, mu, nu, j1);
    p.S = s;
    return p;
}

}  // namespace

PerturbationConfig build_perturbation(const ExperimentConfig& cfg, double gamma, double mu,
                                      double nu) {
    return perturbation_with(cfg, cfg.target.reference_precision(), select_j1(cfg), gamma, mu, nu);
}

bool SweepTable::any_failed() const {
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status != "ok"; });
}

SweepTable run_mc_sweep(const ExperimentConfig& cfg, int workers) {
    cfg.validate();
    const auto target = cfg.target.build();
    const SymMatrix s = cfg.target.reference_precision();
    const AntiSymMatrix j1 = select_j1(cfg);
    const QuadraticObservable f = cfg.observable.build(cfg.target.dim());
    const bool gaussian = cfg.target.kind == TargetSpec::Kind::gaussian;

    struct Point {
        SweepRow row;
        PerturbationConfig pc;
        std::unique_ptr<Stepper> stepper;  // only used to validate the setup early
    };
    std::vector<Point> points;
    for (double g : cfg.gammas) {
        for (double mu : cfg.mus) {
            Point pt;
            pt.row.gamma = g;
            pt.row.mu = mu;
            pt.row.nu = cfg.nu_rule.apply(mu);
            try {
                pt.pc = perturbation_with(cfg, s, j1, g, mu, pt.row.nu);
                pt.stepper = make_stepper(cfg.integrator, pt.pc, *target, cfg.dt, cfg.rk4_substeps);
                if (gaussian && pt.pc.has_matched_structure(1e-10)) {
                    pt.row.analytic_sigma2 = asym_variance(pt.pc, f);
                }
            } catch (const std::exception& e) {
                pt.row.status = "failed";
                std::cerr << "grid point gamma=" << g << " mu=" << mu << ": " << e.what() << '\n';
            }
            points.push_back(std::move(pt));
        }
    }

    const std::size_t n = static_cast<std::size_t>(cfg.replications);
    std::vector<double> estimates(points.size() * n, 0.0);
    std::vector<double> seconds(points.size() * n, 0.0);
    std::vector<std::string> errors(points.size() * n);
    const Observable obs = [&f](const Vector& q) { return f(q); };

    parallel_for(points.size() * n, workers, [&](std::size_t task) {
        const std::size_t p = task / n, rep = task % n;
        if (points[p].row.status != "ok") return;
        SimulationSpec spec;
        spec.dt = cfg.dt;
        spec.horizon = cfg.horizon;
        spec.burn_in = cfg.burn_in;
        spec.seed = cfg.seed + rep;
        spec.integrator = cfg.integrator;
        spec.rk4_substeps = cfg.rk4_substeps;
        const auto start = std::chrono::steady_clock::now();
        try {
            estimates[task] = simulate(points[p].pc, *target, spec, obs).estimate;
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
        seconds[task] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    SweepTable table;
    for (std::size_t p = 0; p < points.size(); ++p) {
        SweepRow row = points[p].row;
        if (row.status == "ok") {
            double mean = 0.0, m2 = 0.0, total = 0.0;
            std::size_t k = 0;
            for (std::size_t rep = 0; rep < n; ++rep) {
                const std::size_t task = p * n + rep;
                total += seconds[task];
                if (!errors[task].empty()) {
                    row.status = "failed";
                    std::cerr << "gamma=" << row.gamma << " mu=" << row.mu << " replication "
                              << rep << ": " << errors[task] << '\n';
                    continue;
                }
                ++k;
                const double delta = estimates[task] - mean;
                mean += delta / static_cast<double>(k);
                m2 += delta * (estimates[task] - mean);
            }
            if (row.status == "ok") {
                row.estimator_mean = mean;
                row.estimator_std = k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1)) : 0.0;
            }
            if (cfg.wallclock) row.wallclock = total;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

SweepTable run_analytic_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.target.kind != TargetSpec::Kind::gaussian) {
        throw ConfigError("analytic-sweep requires a gaussian target");
    }
    const SymMatrix s = cfg.target.reference_precision();
    const AntiSymMatrix j1 = select_j1(cfg);
    const QuadraticObservable f = cfg.observable.build(cfg.target.dim());
    SweepTable table;
    for (double g : cfg.gammas) {
        for (double mu : cfg.mus) {
            SweepRow row;
            row.gamma = g;
            row.mu = mu;
            row.nu = cfg.nu_rule.apply(mu);
            const auto start = std::chrono::steady_clock::now();
            try {
                row.analytic_sigma2 = asym_variance(perturbation_with(cfg, s, j1, g, mu, row.nu), f);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            } catch (const NumericalError& e) {
                row.status = "failed";
                std::cerr << "gamma=" << g << " mu=" << mu << ": " << e.what() << '\n';
            }
            if (cfg.wallclock) {
                row.wallclock =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

SpectrumSet run_spectrum(const ExperimentConfig& cfg) {
    cfg.validate();
    const PerturbationConfig pc =
        build_perturbation(cfg, cfg.spectrum.gamma, cfg.spectrum.mu, cfg.spectrum.nu);
    return as_config_error([&] { return generator_spectrum(pc, cfg.spectrum.m_max); });
}

std::vector<OverdampedRow> run_overdamped_check(const ExperimentConfig& cfg, int workers) {
    cfg.validate();
    const auto target = cfg.target.build();
    const OverdampedSpec& od = cfg.overdamped;
    const PerturbationConfig pc = build_perturbation(cfg, od.gamma, od.mu, od.nu);
    const std::size_t ne = od.eps.size();
    std::vector<OverdampedRow> rows(static_cast<std::size_t>(od.seeds) * ne);
    std::vector<std::exception_ptr> failures(rows.size());
    parallel_for(rows.size(), workers, [&](std::size_t task) {
        const std::uint64_t seed = cfg.seed + task / ne;
        const double eps = od.eps[task % ne];
        try {
            rows[task] = OverdampedRow{
                eps, seed, overdamped_pair(pc, *target, eps, od.horizon, od.dt, seed).sup_error};
        } catch (...) {
            failures[task] = std::current_exception();
        }
    });
    for (const auto& e : failures)
        if (e) std::rethrow_exception(e);
    return rows;
}

}  // namespace langevin
