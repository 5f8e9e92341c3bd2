#pragma once

#include <ostream>

namespace langevin {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

// langevin-perturb <subcommand> --config <path> [--out <dir>] [--workers N] [--seed S]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace langevin
