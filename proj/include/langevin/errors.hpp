#pragma once

#include <stdexcept>
#include <string>

namespace langevin {

// Malformed or inconsistent user input (config files, CLI arguments).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical routine could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lyapunov operator A(.) + (.)A^T is singular for the given drift.
class DegenerateDriftError : public NumericalError {
public:
    explicit DegenerateDriftError(const std::string& what)
        : NumericalError("degenerate drift: " + what) {}
};

}  // namespace langevin
