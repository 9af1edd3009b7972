#include "projlab/stiefel.hpp"

#include <cmath>

namespace projlab {

StiefelFrame makeFrame(DenseMatrix g) {
    if (g.rows() > g.cols()) throw DimensionError("makeFrame: need d <= n");
    const DenseMatrix gram = g.gram();
    const DenseMatrix inv_sqrt = inverseSqrtSym(gram);
    const SymmetricEigen eig = jacobiEigen(gram);

    StiefelFrame frame;
    frame.i_star = inv_sqrt * g;

    const std::size_t d = g.rows();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(g.cols()));
    DenseMatrix scale(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                s += eig.eigenvectors(i, k) * eig.eigenvectors(j, k) * std::sqrt(eig.eigenvalues[k]);
            scale(i, j) = s * inv_sqrt_n;
            scale(j, i) = s * inv_sqrt_n;
        }
    }
    frame.scale_to_identity = std::move(scale);
    frame.gram_eigenvalues = eig.eigenvalues;
    frame.g = std::move(g);
    return frame;
}

StiefelFrame sampleFrame(RngStream& stream, std::size_t d, std::size_t n) {
    return makeFrame(sampleGaussianMatrix(stream, d, n));
}

std::vector<double> projectUniform(const StiefelFrame& frame, std::span<const double> x) {
    if (x.size() != frame.n()) throw DimensionError("projectUniform: vector length != n");
    std::vector<double> y = matVec(frame.i_star, x);
    const double scale = 1.0 / std::sqrt(static_cast<double>(frame.n()));
    for (double& v : y) v *= scale;
    return y;
}

std::vector<double> projectGaussian(const StiefelFrame& frame, std::span<const double> x) {
    if (x.size() != frame.n()) throw DimensionError("projectGaussian: vector length != n");
    std::vector<double> y = matVec(frame.g, x);
    const double scale = 1.0 / static_cast<double>(frame.n());
    for (double& v : y) v *= scale;
    return y;
}

double scaleDriftNorm(const StiefelFrame& frame) {
    const double n = static_cast<double>(frame.n());
    double drift = 0.0;
    for (double lam : frame.gram_eigenvalues)
        drift = std::max(drift, std::abs(std::sqrt(lam / n) - 1.0));
    return drift;
}

}  // namespace projlab
