#pragma once

#include <span>
#include <vector>

#include "projlab/matrix.hpp"

namespace projlab {

struct SymmetricEigen {
    std::vector<double> eigenvalues;  // descending
    DenseMatrix eigenvectors;         // column i pairs with eigenvalues[i]
};

// Cyclic Jacobi rotations on a symmetric matrix, eigenvalues sorted
// descending. Iterates until the off-diagonal Frobenius norm drops below
// 1e-13 (relative to the input Frobenius norm for large-norm inputs, which
// is the rounding floor in double precision).
SymmetricEigen jacobiEigen(const DenseMatrix& a);

// V diag(lambda^-1/2) V^T for a symmetric positive definite input. Throws
// SingularityError when an eigenvalue falls below 1e-12 * lambda_max.
DenseMatrix inverseSqrtSym(const DenseMatrix& a);

// sqrt(det(V^T V)) >= 0, the k-volume of the parallelepiped spanned by the
// input vectors, from the eigenvalues of the k x k Gram matrix. Degenerate
// sets return 0.
double gramDeterminant(std::span<const std::vector<double>> vectors);

namespace detail {
// Eigenvalues only, in place on a row-major k x k symmetric buffer.
void jacobiEigenvaluesInPlace(double* a, std::size_t k, double* eigenvalues);
}  // namespace detail

}  // namespace projlab
