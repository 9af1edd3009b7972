#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "projlab/stiefel.hpp"

using namespace projlab;

namespace {

DenseMatrix orthonormalRowsDouble(std::size_t d, std::size_t n) {
    DenseMatrix g(d, n);
    for (std::size_t i = 0; i < d; ++i) g(i, i) = 1.0;
    return g;
}

double orthonormalityError(const StiefelFrame& frame) {
    const DenseMatrix prod = frame.i_star.gram();
    double err = 0.0;
    for (std::size_t i = 0; i < frame.d(); ++i)
        for (std::size_t j = 0; j < frame.d(); ++j)
            err = std::max(err, std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)));
    return err;
}

}  // namespace

TEST_CASE("sampled frames have orthonormal rows") {
    RngStream stream(2, 0);
    for (auto [d, n] : {std::pair<std::size_t, std::size_t>{1, 4},
                        {2, 10},
                        {3, 50},
                        {5, 200},
                        {8, 64}}) {
        const StiefelFrame frame = sampleFrame(stream, d, n);
        CHECK(orthonormalityError(frame) < 1e-10);
    }
}

TEST_CASE("a matrix with orthonormal rows is its own polar factor") {
    const StiefelFrame frame = makeFrame(orthonormalRowsDouble(3, 7));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 7; ++j)
            CHECK(frame.i_star(i, j) == frame.g(i, j));
}

TEST_CASE("i_star is the inverse square root applied to g, bit for bit") {
    RngStream stream(44, 0);
    const DenseMatrix g = sampleGaussianMatrix(stream, 3, 25);
    const StiefelFrame frame = makeFrame(g);
    const DenseMatrix manual = inverseSqrtSym(g.gram()) * g;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 25; ++j)
            CHECK(frame.i_star(i, j) == manual(i, j));
}

TEST_CASE("frame construction rejects d > n and singular inputs") {
    RngStream stream(2, 1);
    CHECK_THROWS_AS(sampleFrame(stream, 4, 3), DimensionError);
    DenseMatrix rank_deficient(2, 3);
    rank_deficient(0, 0) = 1.0;
    rank_deficient(1, 0) = 1.0;  // identical rows
    CHECK_THROWS_AS(makeFrame(rank_deficient), SingularityError);
}

TEST_CASE("single-row frames look like uniform points on the sphere") {
    const std::size_t n = 10000;
    const int frames = 10000;
    RngStream stream(8, 0);
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < frames; ++t) {
        RngStream local = stream.substream(t);
        const StiefelFrame frame = sampleFrame(local, 1, n);
        const double c = frame.i_star(0, 0);
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / frames;
    const double var = sum2 / frames - mean * mean;
    CHECK(std::abs(mean) < 0.04);
    CHECK(var > 0.9 / n);
    CHECK(var < 1.1 / n);
}

TEST_CASE("projectUniform is linear and exact on the test double") {
    RngStream stream(4, 0);
    const StiefelFrame frame = sampleFrame(stream, 2, 20);

    const std::vector<double> zero(20, 0.0);
    for (double v : projectUniform(frame, zero)) CHECK(v == 0.0);

    std::vector<double> x(20), y(20), xy(20);
    for (std::size_t i = 0; i < 20; ++i) {
        x[i] = stream.normal();
        y[i] = stream.normal();
        xy[i] = x[i] + y[i];
    }
    const auto px = projectUniform(frame, x);
    const auto py = projectUniform(frame, y);
    const auto pxy = projectUniform(frame, xy);
    for (std::size_t r = 0; r < 2; ++r) CHECK(std::abs(pxy[r] - px[r] - py[r]) < 1e-10);

    const StiefelFrame dbl = makeFrame(orthonormalRowsDouble(2, 9));
    std::vector<double> e(9, 0.0);
    e[0] = 3.0;  // sqrt(n)
    const auto p = projectUniform(dbl, e);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(p[1]) < 1e-14);

    CHECK_THROWS_AS(projectUniform(frame, std::vector<double>(19, 0.0)), DimensionError);
}

TEST_CASE("the scale matrix carries uniform projections to gaussian ones") {
    RngStream stream(6, 0);
    for (int trial = 0; trial < 20; ++trial) {
        RngStream local = stream.substream(trial);
        const StiefelFrame frame = sampleFrame(local, 3, 40);
        std::vector<double> x(40);
        for (double& v : x) v = local.normal();
        const auto pu = projectUniform(frame, x);
        const auto pg = projectGaussian(frame, x);
        const auto mapped = matVec(frame.scale_to_identity, pu);
        for (std::size_t r = 0; r < 3; ++r) CHECK(std::abs(mapped[r] - pg[r]) < 1e-10);
    }
}

TEST_CASE("gaussian projection of the all-ones vector stays near zero") {
    const std::size_t n = 1000000;
    const std::vector<double> ones(n, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        RngStream stream(100 + trial, 0);
        const StiefelFrame frame = sampleFrame(stream, 1, n);
        const auto y = projectGaussian(frame, ones);
        CHECK(std::abs(y[0]) < 5.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("scaleDriftNorm definition and trend") {
    const StiefelFrame dbl = makeFrame(orthonormalRowsDouble(2, 4));
    // GG^T = identity, n = 4: eigenvalues 1, drift = |sqrt(1/4) - 1| = 1/2
    CHECK(scaleDriftNorm(dbl) == doctest::Approx(0.5).epsilon(1e-14));

    RngStream stream(12, 0);
    const StiefelFrame frame = sampleFrame(stream, 2, 30);
    const SymmetricEigen eig = jacobiEigen(frame.g.gram());
    double expect = 0.0;
    for (double lam : eig.eigenvalues)
        expect = std::max(expect, std::abs(std::sqrt(lam / 30.0) - 1.0));
    CHECK(scaleDriftNorm(frame) == doctest::Approx(expect).epsilon(1e-12));

    // median drift shrinks as n grows
    std::vector<std::size_t> ns = {100, 1000, 10000};
    std::vector<double> medians;
    for (std::size_t n : ns) {
        std::vector<double> drifts;
        for (int seed = 0; seed < 20; ++seed) {
            RngStream s(200 + seed, 0);
            drifts.push_back(scaleDriftNorm(sampleFrame(s, 3, n)));
        }
        std::sort(drifts.begin(), drifts.end());
        medians.push_back(0.5 * (drifts[9] + drifts[10]));
    }
    CHECK(medians[0] > medians[1]);
    CHECK(medians[1] > medians[2]);
    CHECK(medians[2] < 0.1);
}
