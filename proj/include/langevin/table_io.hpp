#pragma once

// Output grammar shared by every CSV the tool writes:
//   line 1: "# langevin-perturb v1"
//   line 2: column names, then data rows; fields separated by ',', lines by '\n'.
// Numbers use the shortest decimal form that round-trips; a missing value is
// an empty field.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "langevin/experiment.hpp"
#include "langevin/spectra.hpp"

namespace langevin {

inline constexpr std::string_view kCsvMagic = "# langevin-perturb v1";

std::string format_number(double v);

std::string sweep_csv(const SweepTable& table, bool with_wallclock = false);
// Inverse of sweep_csv. Throws ConfigError on malformed input.
SweepTable parse_sweep_csv(std::string_view text);

// Polyline chart: x = mu, y = estimator std (or analytic sigma^2 when no
// estimate is present), one series per gamma.
std::string sweep_svg(const SweepTable& table, const std::string& title = "");

std::string spectrum_csv(const SpectrumSet& spec);
std::string overdamped_csv(const std::vector<OverdampedRow>& rows);

struct NamedMatrix {
    std::string name;
    Matrix value;
};

// "# block NAME rows=R cols=C" followed by R comma-separated rows.
std::string matrix_blocks_csv(const std::vector<NamedMatrix>& blocks);
std::vector<NamedMatrix> parse_matrix_blocks(std::string_view text);

}  // namespace langevin
