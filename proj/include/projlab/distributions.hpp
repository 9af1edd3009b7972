#pragma once

#include <optional>
#include <string>
#include <vector>

#include "projlab/rng.hpp"

namespace projlab {

enum class NuKind { gaussian, rademacher, uniform_symmetric, finite_discrete };

struct Atom {
    double x;
    double p;
};

// A one-dimensional law with an everywhere finite moment generating
// function: the coordinate distribution of the product measures being
// projected. All built-ins satisfy the integrability condition required of
// log M_nu against Gaussian tails; the flag records that (it is a
// documented analytic fact, not something verified numerically).
class NuDistribution {
public:
    static NuDistribution gaussian();
    static NuDistribution rademacher();
    static NuDistribution uniformSymmetric();
    static NuDistribution finiteDiscrete(std::vector<Atom> atoms);

    // {"atoms":[{"x":..,"p":..},...]}; weights are renormalized when their
    // sum is within 1e-9 of 1 and rejected otherwise. Unknown fields are
    // rejected.
    static NuDistribution fromJsonText(const std::string& text);
    static NuDistribution fromJsonFile(const std::string& path);

    NuKind kind() const { return kind_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool mgfConditionDocumented() const { return true; }
    std::optional<double> supportBound() const { return support_bound_; }
    bool symmetric() const { return symmetric_; }
    std::string descriptor() const;

    double logMgf(double y) const;
    double logMgfDerivative(double y) const;
    double sample(RngStream& stream) const;

    // support_bound * sqrt(2/pi) when the support is bounded: the slope of
    // the linear growth of E[log M(s g)], hence the recession slope of the
    // rate profile.
    std::optional<double> meanAbsGaussianSlope() const;

private:
    NuDistribution(NuKind kind, std::vector<Atom> atoms, std::optional<double> bound,
                   bool symmetric)
        : kind_(kind), atoms_(std::move(atoms)), support_bound_(bound), symmetric_(symmetric) {}

    NuKind kind_;
    std::vector<Atom> atoms_;          // finite_discrete only, sorted by x
    std::optional<double> support_bound_;
    bool symmetric_;
};

}  // namespace projlab
