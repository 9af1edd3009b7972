#pragma once

#include <stdexcept>
#include <string>

namespace projlab {

// Shape / dimension preconditions (d > n, mismatched vector lengths, ...).
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerically singular input where an inverse (square root) was requested.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, double smallest_eigenvalue)
        : std::runtime_error(what), smallest_eigenvalue_(smallest_eigenvalue) {}
    double smallestEigenvalue() const { return smallest_eigenvalue_; }

private:
    double smallest_eigenvalue_;
};

// Enumeration budget exceeded; callers should switch to a sampling estimator.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid run configuration (CLI layer).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace projlab
