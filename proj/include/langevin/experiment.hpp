#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "langevin/config_file.hpp"
#include "langevin/dynamics.hpp"
#include "langevin/gaussian_analysis.hpp"
#include "langevin/perturbation_design.hpp"
#include "langevin/spectra.hpp"
#include "langevin/targets.hpp"

namespace langevin {

struct TargetSpec {
    enum class Kind { gaussian, bridge };
    Kind kind = Kind::gaussian;
    Matrix precision;  // gaussian
    int grid = 15;     // bridge
    double beta = 1.0;

    Eigen::Index dim() const;
    std::unique_ptr<PotentialTarget> build() const;
    // Gaussian precision, or the Gaussian reference precision of the bridge.
    SymMatrix reference_precision() const;
};

struct PerturbationSpec {
    enum class Choice { design, standard, matrix, zero };
    // matched: M = S, Gamma = gamma S, J2 = S J1 S. unit: M = I, Gamma = gamma I, J2 = J1.
    enum class Structure { matched, unit };
    Choice choice = Choice::design;
    Structure structure = Structure::matched;
    Matrix matrix;
};

struct ObservableSpec {
    enum class Kind { norm2, sum, custom };
    Kind kind = Kind::norm2;
    Matrix K;
    Vector l;
    double c = 0.0;

    QuadraticObservable build(Eigen::Index d) const;
};

struct SpectrumSpec {
    double gamma = 2.0;
    double mu = 1.0;
    double nu = 1.0;
    int m_max = 2;
};

struct OverdampedSpec {
    std::vector<double> eps = {0.2, 0.1, 0.05};
    double horizon = 1.0;
    double dt = 2e-5;
    int seeds = 20;
    double gamma = 1.0;
    double mu = 1.0;
    double nu = 1.0;
};

struct ExperimentConfig {
    TargetSpec target;
    IntegratorKind integrator = IntegratorKind::perturbed_baoab;
    double dt = 1e-3;
    double horizon = 10.0;
    double burn_in = 1.0;
    int rk4_substeps = 1;
    std::vector<double> gammas = {1.0};
    std::vector<double> mus = {0.0};
    NuRule nu_rule = NuRule::equal();
    int replications = 1;
    std::uint64_t seed = 1;
    PerturbationSpec perturbation;
    ObservableSpec observable;
    SpectrumSpec spectrum;
    OverdampedSpec overdamped;
    bool svg = true;
    bool wallclock = false;
    std::string label;  // free-form note copied into output metadata

    // Throws ConfigError.
    void validate() const;
};

// Reads every known section; unknown keys are a ConfigError.
ExperimentConfig load_experiment(const ConfigFile& file);

// Desk-scale diffusion-bridge run: d = 15, beta = 1, dt = 1e-3, T = 10,
// T0 = 1, N = 50, gamma in {0.01, 0.1, 1}, mu = nu in {0, 1, 5}, designed J
// for f = |x|^2. The larger setting uses dt = 1e-4, T = 100, N = 500.
ExperimentConfig bridge_preset(bool paper_scale = false);

// Configuration of the dynamics at one grid point.
PerturbationConfig build_perturbation(const ExperimentConfig& cfg, double gamma, double mu,
                                      double nu);
// The antisymmetric J1 selected by the perturbation spec (before scaling by mu).
AntiSymMatrix select_j1(const ExperimentConfig& cfg);

struct SweepRow {
    double gamma = 0.0;
    double mu = 0.0;
    double nu = 0.0;
    std::optional<double> estimator_mean;
    std::optional<double> estimator_std;
    std::optional<double> analytic_sigma2;
    std::string status = "ok";
    std::optional<double> wallclock;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    bool any_failed() const;
};

// N replications per (gamma, mu); replication i uses seed + i at every grid
// point. Work is spread over `workers` threads; output order is the grid order.
SweepTable run_mc_sweep(const ExperimentConfig& cfg, int workers = 1);
SweepTable run_analytic_sweep(const ExperimentConfig& cfg);
DesignResult run_design(const ExperimentConfig& cfg);
SpectrumSet run_spectrum(const ExperimentConfig& cfg);

struct OverdampedRow {
    double eps;
    std::uint64_t seed;
    double sup_error;
};

std::vector<OverdampedRow> run_overdamped_check(const ExperimentConfig& cfg, int workers = 1);

}  // namespace langevin
