#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "langevin/gaussian_analysis.hpp"
#include "langevin/matkit.hpp"
#include "langevin/targets.hpp"

namespace langevin {

struct PhaseState {
    Vector q;
    Vector p;
};

// Standard normal variates from a 64-bit Mersenne twister. Identical seeds
// give identical sequences on a given build.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    double normal() { return normal_(engine_); }
    Vector normal_vector(Eigen::Index d);
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

// One classical RK4 step of q' = -J grad V(q).
Vector rk4_flow(const Vector& q, double h, const PotentialTarget& target, const Matrix& j);

// Exact momentum update p -> E p + L xi with E = exp(-dt (Gamma + nu J2) M^{-1})
// and L L^T = M - E M E^T, which leaves N(0, M) invariant.
struct OuStepCache {
    Matrix E;
    Matrix L;
    Matrix noise_cov;

    static OuStepCache build(const PerturbationConfig& cfg, double dt);
    static OuStepCache build(const Matrix& mass, const Matrix& friction, double dt);
};

Vector ou_step(const Vector& p, const OuStepCache& cache, RngStream& rng);

enum class IntegratorKind { baoab, perturbed_baoab, exact_ou };

IntegratorKind parse_integrator(const std::string& name);
std::string to_string(IntegratorKind kind);

class Stepper {
public:
    virtual ~Stepper() = default;
    virtual void step(PhaseState& state, RngStream& rng) const = 0;
    virtual double dt() const = 0;
};

// baoab ignores mu, nu. perturbed_baoab adds RK4 half-steps of
// q' = -mu J1 grad V around the O-step and uses nu J2 in the O-step.
// exact_ou requires a GaussianTarget and samples the linear SDE exactly.
std::unique_ptr<Stepper> make_stepper(IntegratorKind kind, const PerturbationConfig& cfg,
                                      const PotentialTarget& target, double dt,
                                      int rk4_substeps = 1);

// Single-step conveniences; they rebuild the cached matrices on every call.
PhaseState baoab_step(const PhaseState& s, double dt, const PerturbationConfig& cfg,
                      const PotentialTarget& target, RngStream& rng);
PhaseState perturbed_baoab_step(const PhaseState& s, double dt, const PerturbationConfig& cfg,
                                const PotentialTarget& target, RngStream& rng);
PhaseState ou_exact_step(const PhaseState& s, double dt, const PerturbationConfig& cfg,
                         const GaussianTarget& target, RngStream& rng);

using Observable = std::function<double(const Vector&)>;

struct SimulationSpec {
    double dt = 1e-3;
    double horizon = 10.0;  // T
    double burn_in = 0.0;   // T0
    Vector q0;              // empty: (1, ..., 1)
    Vector p0;              // empty: 0
    std::uint64_t seed = 0;
    IntegratorKind integrator = IntegratorKind::perturbed_baoab;
    int rk4_substeps = 1;
};

struct SimulationResult {
    double estimate;         // time average of f over [T0, T)
    std::int64_t steps;      // total steps taken
    std::int64_t averaged;   // steps contributing to the average
    PhaseState final_state;
};

// Left-endpoint time average of f(q_t) after burn-in. Throws NumericalError
// naming the step index when the state becomes non-finite.
SimulationResult simulate(const PerturbationConfig& cfg, const PotentialTarget& target,
                          const SimulationSpec& spec, const Observable& f);

struct OverdampedPair {
    std::vector<Vector> scaled_path;    // q^eps at every step, t = 0 included
    std::vector<Vector> limiting_path;  // q^0 on the same grid
    double sup_error;
};

// Euler-Maruyama for the eps-rescaled dynamics and its overdamped limit,
// driven by the same Brownian increments, from q0 (default ones) and p = 0.
OverdampedPair overdamped_pair(const PerturbationConfig& cfg, const PotentialTarget& target,
                               double eps, double horizon, double dt, std::uint64_t seed,
                               const Vector& q0 = Vector());

}  // namespace langevin
