#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "projlab/rng.hpp"
#include "projlab/stiefel.hpp"

namespace projlab {

// The projected cube as a Minkowski sum of segments [-v_i, v_i]; the
// generators are the (unscaled) columns of i_star.
struct Zonotope {
    std::size_t dim = 0;
    std::vector<std::vector<double>> generators;
};

Zonotope fromFrame(const StiefelFrame& frame);

// h(u) = sum_i |<u, v_i>|
double supportFunction(const Zonotope& z, std::span<const double> u);

// Unit directions used to discretize sup-norm gaps of support functions on
// the sphere: uniform angles for d=2, a Fibonacci lattice for d=3, seeded
// random unit vectors for d >= 4. Always contains +-e_1..e_d.
struct DirectionGrid {
    std::size_t dim = 0;
    std::vector<std::vector<double>> directions;
    std::string descriptor;
};

DirectionGrid makeDirectionGrid(std::size_t d, std::size_t count = 0,
                                std::uint64_t seed = 0x6772696473ULL);

struct LimitBall {
    double radius;
    std::size_t dim;
};

// The ball every normalized projected cube approaches.
LimitBall limitBall(std::size_t d);

// max over grid directions of |scale * h_Z(u) - radius|; equals the
// Hausdorff distance between scale*Z and the ball up to grid discretization
// (a lower bound, error O(grid spacing x body diameter)).
double hausdorffToBall(const Zonotope& z, double scale, const LimitBall& ball,
                       const DirectionGrid& grid);

// Exact k-th intrinsic volume 2^k sum_{|S|=k} sqrt(det Gram(v_S)) by subset
// enumeration; throws BudgetError beyond 1e7 subsets (use the Monte Carlo
// estimator instead).
double intrinsicVolumeExact(const Zonotope& z, std::size_t k);

struct McEstimate {
    double value;
    double std_err;
};

// Unbiased subset-sampling estimator 2^k C(n,k) * mean sqrt(det Gram).
McEstimate intrinsicVolumeMC(const Zonotope& z, std::size_t k, std::size_t samples,
                             RngStream& stream);

// 2^{k/2} C(d,k) Gamma(1+(d-k)/2) / Gamma(1+d/2): the limit of
// V_k(Z_n) / n^{k/2}.
double intrinsicVolumeLimit(std::size_t d, std::size_t k);

// Lanczos approximation (g=7, 9 terms); relative error < 1e-12 on the
// half-integer arguments used here.
double gammaLanczos(double x);

// C(n, k) as a double.
double binomialCoefficient(std::size_t n, std::size_t k);

}  // namespace projlab
