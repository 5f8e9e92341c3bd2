#pragma once

#include <vector>

#include "langevin/gaussian_analysis.hpp"
#include "langevin/matkit.hpp"

namespace langevin {

struct SpectralValue {
    int level;  // Hermite level |alpha|; 1 for drift eigenvalues
    Complex value;
    int multiplicity;
};

struct SpectrumSet {
    enum class Source { drift, generator_truncated };
    Source source = Source::drift;
    int max_level = 1;
    std::vector<SpectralValue> values;

    // All values with multiplicity expanded.
    std::vector<Complex> expanded() const;
};

inline constexpr double kSpectrumDedupTol = 1e-10;
inline constexpr int kMaxGeneratorLevel = 6;
inline constexpr double kMaxGeneratorTerms = 1e5;

// Merges values closer than tol into one entry with multiplicity.
std::vector<SpectralValue> deduplicate(const std::vector<Complex>& values, int level,
                                       double tol = kSpectrumDedupTol);

// Eigenvalues of the phase-space drift B (similar to the unit form under the
// matched structure).
SpectrumSet drift_spectrum(const PerturbationConfig& cfg);

// Closed form for mu = nu: {i mu w + gamma/2 +- sqrt((gamma/2)^2 - 1)} over the
// eigenvalues i w of J (all d of them, zero included).
SpectrumSet drift_spectrum_closed(double mu, double gamma, const std::vector<double>& j_frequencies);

// Imaginary parts of all d eigenvalues of J.
std::vector<double> antisymmetric_frequencies(const AntiSymMatrix& j);

// Sums sum_j alpha_j lambda_j over lambda in sigma(B) and 1 <= |alpha| <= m_max.
// Throws std::invalid_argument if m_max > 6 or the term count exceeds 1e5.
SpectrumSet generator_spectrum(const PerturbationConfig& cfg, int m_max);
SpectrumSet generator_spectrum(const std::vector<Complex>& drift_eigenvalues, int m_max);

// Smallest real part among values with |lambda| > 1e-10.
double spectral_bound(const SpectrumSet& spec);

struct CriticalDamping {
    double gamma;
    double rate;
};

// Friction maximizing the decay rate of q' = p/m, p' = -s q - gamma p/m + noise.
CriticalDamping critical_damping(double stiffness, double mass);

}  // namespace langevin
