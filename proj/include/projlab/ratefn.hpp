#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "projlab/distributions.hpp"
#include "projlab/extended_real.hpp"

namespace projlab {

// Gauss-Hermite nodes and weights in the probabilists' convention
// (weights sum to 1, nodes integrate against the standard normal density).
struct HermiteRule {
    std::size_t order = 0;
    std::vector<double> nodes;    // ascending, symmetric about 0
    std::vector<double> weights;  // positive
};

// Golub-Welsch: eigen-decomposition of the symmetric tridiagonal Jacobi
// matrix of the (probabilists') Hermite polynomials. 2 <= order <= 512.
HermiteRule buildHermiteRule(std::size_t order);

// Process-wide rule cache; rules are built once per order.
const HermiteRule& hermiteRule(std::size_t order);

struct PsiEval {
    double value = 0.0;
    bool accurate = true;  // false when the order-512 rule did not converge
};

// Psi(s) = E[log M_nu(s g)], g standard normal, together with its
// derivative, recession slope and Legendre-Fenchel conjugate. Immutable
// after construction; evaluation is safe for concurrent callers.
class RateFunction {
public:
    explicit RateFunction(NuDistribution nu);

    const NuDistribution& nu() const { return nu_; }

    // Single-rule quadrature sum_j w_j log M(s x_j).
    double psiGaussHermite(double s, const HermiteRule& rule) const;
    double psiPrimeGaussHermite(double s, const HermiteRule& rule) const;

    // Closed tail form for bounded symmetric laws: the linear growth
    // slope * sqrt(2/pi) * s is split off analytically and the remainder
    // E[(log M - slope*|.|)(s|g|)] is integrated after the substitution
    // u = s t, which keeps the integrand resolved at every s.
    double psiTailForm(double s) const;
    double psiPrimeTailForm(double s) const;
    bool hasTailForm() const;

    // Adaptive evaluation: the quadrature order doubles from 64 until two
    // consecutive values agree to 1e-10 or 512 is reached; bounded symmetric
    // laws switch to the tail form where the quadrature stops converging.
    PsiEval psi(double s) const;
    PsiEval psiPrime(double s) const;
    double psiValue(double s) const { return psi(s).value; }
    double psiPrimeValue(double s) const { return psiPrime(s).value; }

    // Limiting slope of Psi at +infinity; infinite for superlinear growth.
    ExtendedReal recessionSlope() const { return recession_; }

    // Psi*(u) = sup_{s>=0} (u s - Psi(s)). Negative u maps to |u|.
    ExtendedReal conjugate(double u) const;

    // Psi*(||t||_2): the rate function is radial.
    ExtendedReal lambdaStar(std::span<const double> t) const;

    // Value reported at u = recession slope: the objective rho*s - Psi(s)
    // evaluated at s = 1e4, promoted to +infinity when it exceeds 1e6 or is
    // still growing between s = 1e3 and s = 1e4 (slow divergence).
    ExtendedReal boundaryValue() const;

    // Psi**(s) by maximizing s*u - Psi*(u) over the finite domain.
    double biconjugate(double s) const;

    // Gap to the linear asymptote of Psi. For rademacher:
    // r(s) = Psi(s) - (sqrt(2/pi) s - log 2). For the uniform law the
    // subtracted asymptote is sqrt(2/pi) s - log s - (log 2 + gamma)/2.
    std::vector<double> asymptoteResiduals(std::span<const double> s_values) const;

private:
    PsiEval adaptive(double s, bool derivative) const;
    ExtendedReal computeRecession() const;

    NuDistribution nu_;
    ExtendedReal recession_;
};

struct RateProfilePoint {
    double u;
    ExtendedReal psi_star;
};

struct RateProfile {
    NuDistribution nu;
    ExtendedReal recession_slope;
    ExtendedReal boundary_value;  // meaningful when the slope is finite
    std::vector<RateProfilePoint> table;
};

RateProfile buildRateProfile(const RateFunction& rate, double u_max, std::size_t points = 200);

// CSV columns u, psi_star, finite_flag; "+inf" entries as the literal "inf".
void writeRateTableCsv(std::ostream& out, const RateProfile& profile,
                       std::span<const std::string> metadata_lines);

}  // namespace projlab
