#include "langevin/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "langevin/errors.hpp"

namespace langevin {

std::vector<Complex> SpectrumSet::expanded() const {
    std::vector<Complex> out;
    for (const SpectralValue& v : values)
        for (int k = 0; k < v.multiplicity; ++k) out.push_back(v.value);
    return out;
}

std::vector<SpectralValue> deduplicate(const std::vector<Complex>& values, int level, double tol) {
    std::vector<Complex> sorted = values;
    std::sort(sorted.begin(), sorted.end(), [](const Complex& a, const Complex& b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    std::vector<SpectralValue> out;
    std::size_t window = 0;  // first cluster whose representative may still be within tol
    for (const Complex& z : sorted) {
        while (window < out.size() && out[window].value.real() < z.real() - tol) ++window;
        bool merged = false;
        for (std::size_t k = window; k < out.size(); ++k) {
            if (std::abs(out[k].value - z) <= tol) {
                ++out[k].multiplicity;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(SpectralValue{level, z, 1});
    }
    return out;
}

SpectrumSet drift_spectrum(const PerturbationConfig& cfg) {
    SpectrumSet s;
    s.source = SpectrumSet::Source::drift;
    s.max_level = 1;
    s.values = deduplicate(eig_general(phase_drift_matrix(cfg)), 1);
    return s;
}

std::vector<double> antisymmetric_frequencies(const AntiSymMatrix& j) {
    std::vector<double> out;
    for (const Complex& z : eig_general(j)) out.push_back(z.imag());
    std::sort(out.begin(), out.end());
    return out;
}

SpectrumSet drift_spectrum_closed(double mu, double gamma, const std::vector<double>& j_frequencies) {
    const Complex root = std::sqrt(Complex(0.25 * gamma * gamma - 1.0, 0.0));
    std::vector<Complex> all;
    for (double w : j_frequencies) {
        const Complex centre(0.5 * gamma, mu * w);
        all.push_back(centre + root);
        all.push_back(centre - root);
    }
    SpectrumSet s;
    s.source = SpectrumSet::Source::drift;
    s.max_level = 1;
    s.values = deduplicate(all, 1);
    return s;
}

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

SpectrumSet generator_spectrum(const std::vector<Complex>& drift_eigenvalues, int m_max) {
    if (m_max < 1) throw std::invalid_argument("generator_spectrum: m_max must be >= 1");
    if (m_max > kMaxGeneratorLevel) {
        throw std::invalid_argument("generator_spectrum: m_max larger than 6");
    }
    const int n = static_cast<int>(drift_eigenvalues.size());
    if (binomial(n + m_max, m_max) > kMaxGeneratorTerms) {
        throw std::invalid_argument("generator_spectrum: more than 1e5 multi-indices");
    }

    SpectrumSet s;
    s.source = SpectrumSet::Source::generator_truncated;
    s.max_level = m_max;
    for (int m = 1; m <= m_max; ++m) {
        // Multi-indices of size m as nondecreasing index sequences.
        std::vector<Complex> sums;
        std::vector<int> pick(static_cast<std::size_t>(m), 0);
        while (true) {
            Complex acc(0.0, 0.0);
            for (int i : pick) acc += drift_eigenvalues[static_cast<std::size_t>(i)];
            sums.push_back(acc);
            int pos = m - 1;
            while (pos >= 0 && pick[pos] == n - 1) --pos;
            if (pos < 0) break;
            ++pick[pos];
            for (int k = pos + 1; k < m; ++k) pick[k] = pick[pos];
        }
        const auto level = deduplicate(sums, m);
        s.values.insert(s.values.end(), level.begin(), level.end());
    }
    return s;
}

SpectrumSet generator_spectrum(const PerturbationConfig& cfg, int m_max) {
    return generator_spectrum(eig_general(phase_drift_matrix(cfg)), m_max);
}

double spectral_bound(const SpectrumSet& spec) {
    double best = std::numeric_limits<double>::infinity();
    for (const SpectralValue& v : spec.values)
        if (std::abs(v.value) > 1e-10) best = std::min(best, v.value.real());
    if (!std::isfinite(best)) throw std::invalid_argument("spectral_bound: no nonzero eigenvalue");
    return best;
}

CriticalDamping critical_damping(double stiffness, double mass) {
    if (!(stiffness > 0.0) || !(mass > 0.0)) {
        throw std::invalid_argument("critical_damping: stiffness and mass must be positive");
    }
    return CriticalDamping{2.0 * std::sqrt(stiffness * mass), std::sqrt(stiffness / mass)};
}

}  // namespace langevin
