#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "projlab/errors.hpp"
#include "projlab/rng.hpp"

namespace projlab {

// Dense row-major matrix. Only the small d-side algebra the experiments need.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (rows == 0 || cols == 0) throw DimensionError("DenseMatrix: rows and cols must be >= 1");
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    // A * A^T, filled exactly symmetric.
    DenseMatrix gram() const {
        DenseMatrix g(rows_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = i; j < rows_; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < cols_; ++k) s += (*this)(i, k) * (*this)(j, k);
                g(i, j) = s;
                g(j, i) = s;
            }
        }
        return g;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline std::vector<double> matVec(const DenseMatrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) throw DimensionError("matVec: vector length != cols");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// d x n matrix of i.i.d. standard normals, filled in row-major order.
inline DenseMatrix sampleGaussianMatrix(RngStream& stream, std::size_t d, std::size_t n) {
    if (d < 1 || n < 1 || d > n)
        throw DimensionError("sampleGaussianMatrix: need 1 <= d <= n");
    DenseMatrix g(d, n);
    for (double& e : g.data()) e = stream.normal();
    return g;
}

}  // namespace projlab
