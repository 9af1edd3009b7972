#include "projlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace projlab {

namespace {

double offDiagonalFrobenius(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double frobenius(const DenseMatrix& a) {
    double s = 0.0;
    for (double e : a.data()) s += e * e;
    return std::sqrt(s);
}

// One stable Jacobi rotation annihilating a(p,q); updates eigenvectors too.
void rotate(DenseMatrix& a, DenseMatrix* v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;
    const std::size_t n = a.rows();
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
    if (theta < 0.0) t = -t;
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    for (std::size_t k = 0; k < n; ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
    }
    if (v) {
        for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*v)(k, p);
            const double vkq = (*v)(k, q);
            (*v)(k, p) = c * vkp - s * vkq;
            (*v)(k, q) = s * vkp + c * vkq;
        }
    }
}

}  // namespace

SymmetricEigen jacobiEigen(const DenseMatrix& input) {
    const std::size_t n = input.rows();
    if (n != input.cols()) throw DimensionError("jacobiEigen: matrix must be square");
    for (double e : input.data())
        if (!std::isfinite(e)) throw DimensionError("jacobiEigen: non-finite entry");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(input(i, j) - input(j, i)) > 1e-12)
                throw DimensionError("jacobiEigen: matrix not symmetric within 1e-12");

    DenseMatrix a = input;
    DenseMatrix v = DenseMatrix::identity(n);
    const double tol = 1e-13 * std::max(1.0, frobenius(input));

    for (int sweep = 0; sweep < 100 && offDiagonalFrobenius(a) >= tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) rotate(a, &v, p, q);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SymmetricEigen out;
    out.eigenvalues.resize(n);
    out.eigenvectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

DenseMatrix inverseSqrtSym(const DenseMatrix& a) {
    const SymmetricEigen eig = jacobiEigen(a);
    const double lam_max = eig.eigenvalues.front();
    const double lam_min = eig.eigenvalues.back();
    if (!(lam_min > 1e-12 * lam_max))
        throw SingularityError("inverseSqrtSym: matrix numerically singular", lam_min);

    const std::size_t n = a.rows();
    DenseMatrix x(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += eig.eigenvectors(i, k) * eig.eigenvectors(j, k) / std::sqrt(eig.eigenvalues[k]);
            x(i, j) = s;
            x(j, i) = s;
        }
    }
    return x;
}

namespace detail {

void jacobiEigenvaluesInPlace(double* a, std::size_t k, double* eigenvalues) {
    double fro = 0.0;
    for (std::size_t i = 0; i < k * k; ++i) fro += a[i] * a[i];
    const double tol2 = 1e-26 * std::max(1.0, fro);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) off += 2.0 * a[i * k + j] * a[i * k + j];
        if (off < tol2) break;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double apq = a[p * k + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t m = 0; m < k; ++m) {
                    const double amp = a[m * k + p];
                    const double amq = a[m * k + q];
                    a[m * k + p] = c * amp - s * amq;
                    a[m * k + q] = s * amp + c * amq;
                }
                for (std::size_t m = 0; m < k; ++m) {
                    const double apm = a[p * k + m];
                    const double aqm = a[q * k + m];
                    a[p * k + m] = c * apm - s * aqm;
                    a[q * k + m] = s * apm + c * aqm;
                }
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) eigenvalues[i] = a[i * k + i];
}

}  // namespace detail

double gramDeterminant(std::span<const std::vector<double>> vectors) {
    const std::size_t k = vectors.size();
    if (k == 0) throw DimensionError("gramDeterminant: need at least one vector");
    const std::size_t d = vectors[0].size();
    for (const auto& v : vectors)
        if (v.size() != d) throw DimensionError("gramDeterminant: mixed vector dimensions");
    if (d < k) return 0.0;  // k vectors in fewer dimensions are dependent

    constexpr std::size_t kStackDim = 32;
    double stack_buf[kStackDim * kStackDim];
    std::vector<double> heap_buf;
    double* g = stack_buf;
    if (k > kStackDim) {
        heap_buf.resize(k * k);
        g = heap_buf.data();
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double s = 0.0;
            for (std::size_t m = 0; m < d; ++m) s += vectors[i][m] * vectors[j][m];
            g[i * k + j] = s;
            g[j * k + i] = s;
        }
    }

    double lam_stack[kStackDim];
    std::vector<double> lam_heap;
    double* lam = lam_stack;
    if (k > kStackDim) {
        lam_heap.resize(k);
        lam = lam_heap.data();
    }
    detail::jacobiEigenvaluesInPlace(g, k, lam);

    double prod = 1.0;
    for (std::size_t i = 0; i < k; ++i) prod *= std::max(lam[i], 0.0);
    return std::sqrt(prod);
}

}  // namespace projlab
