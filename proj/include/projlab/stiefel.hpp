#pragma once

#include <span>
#include <vector>

#include "projlab/linalg.hpp"
#include "projlab/matrix.hpp"
#include "projlab/rng.hpp"

namespace projlab {

// An orthonormal d-frame in R^n obtained as the polar factor of a Gaussian
// d x n matrix: i_star = (G G^T)^{-1/2} G has orthonormal rows, and
// scale_to_identity = (1/sqrt(n)) (G G^T)^{1/2} measures how far the raw
// Gaussian map is from the isometric one.
struct StiefelFrame {
    DenseMatrix g;                       // d x n Gaussian matrix
    DenseMatrix i_star;                  // (G G^T)^{-1/2} G, orthonormal rows
    DenseMatrix scale_to_identity;       // (1/sqrt(n)) (G G^T)^{1/2}
    std::vector<double> gram_eigenvalues;  // eigenvalues of G G^T, descending

    std::size_t d() const { return g.rows(); }
    std::size_t n() const { return g.cols(); }
};

// Builds the frame from an explicit matrix (test injection point).
StiefelFrame makeFrame(DenseMatrix g);

// Fresh Gaussian matrix, then the frame. Throws DimensionError for d > n and
// SingularityError if G G^T is numerically singular (a probability-zero
// event; resampling is the caller's decision).
StiefelFrame sampleFrame(RngStream& stream, std::size_t d, std::size_t n);

// (1/sqrt(n)) * i_star * x
std::vector<double> projectUniform(const StiefelFrame& frame, std::span<const double> x);

// (1/n) * G * x
std::vector<double> projectGaussian(const StiefelFrame& frame, std::span<const double> x);

// max_i |sqrt(lambda_i / n) - 1|, the operator-norm distance of
// scale_to_identity from the identity.
double scaleDriftNorm(const StiefelFrame& frame);

}  // namespace projlab
