#include "projlab/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "projlab/errors.hpp"
#include "projlab/linalg.hpp"
#include "projlab/parallel.hpp"

namespace projlab {

Zonotope fromFrame(const StiefelFrame& frame) {
    Zonotope z;
    z.dim = frame.d();
    z.generators.resize(frame.n(), std::vector<double>(frame.d()));
    for (std::size_t i = 0; i < frame.n(); ++i)
        for (std::size_t r = 0; r < frame.d(); ++r) z.generators[i][r] = frame.i_star(r, i);
    return z;
}

double supportFunction(const Zonotope& z, std::span<const double> u) {
    if (u.size() != z.dim) throw DimensionError("supportFunction: direction dimension mismatch");
    for (double c : u)
        if (!std::isfinite(c)) throw DimensionError("supportFunction: non-finite direction");
    double h = 0.0;
    for (const auto& v : z.generators) {
        double dot = 0.0;
        for (std::size_t r = 0; r < z.dim; ++r) dot += u[r] * v[r];
        h += std::abs(dot);
    }
    return h;
}

DirectionGrid makeDirectionGrid(std::size_t d, std::size_t count, std::uint64_t seed) {
    if (d < 1) throw DimensionError("makeDirectionGrid: d >= 1 required");
    DirectionGrid grid;
    grid.dim = d;

    if (d == 1) {
        grid.descriptor = "axes";
    } else if (d == 2) {
        if (count == 0) count = 4096;
        grid.descriptor = "angular:" + std::to_string(count);
        grid.directions.reserve(count + 4);
        for (std::size_t k = 0; k < count; ++k) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / count;
            grid.directions.push_back({std::cos(theta), std::sin(theta)});
        }
    } else if (d == 3) {
        if (count == 0) count = 4096;
        grid.descriptor = "fibonacci:" + std::to_string(count);
        grid.directions.reserve(count + 6);
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double theta = golden * static_cast<double>(k);
            grid.directions.push_back({r * std::cos(theta), r * std::sin(theta), z});
        }
    } else {
        if (count == 0) count = 8192;
        grid.descriptor = "random:" + std::to_string(count);
        grid.directions.reserve(count + 2 * d);
        RngStream stream(seed, d);
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<double> u(d);
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (double& c : u) {
                    c = stream.normal();
                    norm2 += c * c;
                }
            } while (norm2 == 0.0);
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& c : u) c *= inv;
            grid.directions.push_back(std::move(u));
        }
    }

    for (std::size_t i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
            std::vector<double> e(d, 0.0);
            e[i] = sign;
            grid.directions.push_back(std::move(e));
        }
    }
    return grid;
}

LimitBall limitBall(std::size_t d) {
    return LimitBall{std::sqrt(2.0 / std::numbers::pi), d};
}

double hausdorffToBall(const Zonotope& z, double scale, const LimitBall& ball,
                       const DirectionGrid& grid) {
    if (!(scale > 0.0)) throw DimensionError("hausdorffToBall: scale must be positive");
    if (grid.directions.empty()) throw DimensionError("hausdorffToBall: empty direction grid");
    if (grid.dim != z.dim || ball.dim != z.dim)
        throw DimensionError("hausdorffToBall: dimension mismatch");

    const std::int64_t m = static_cast<std::int64_t>(grid.directions.size());
    constexpr int kChunks = 64;
    double chunk_max[kChunks] = {0.0};
    forEachChunk(m, kChunks, [&](int c, std::int64_t lo, std::int64_t hi) {
        double best = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            const double gap =
                std::abs(scale * supportFunction(z, grid.directions[i]) - ball.radius);
            best = std::max(best, gap);
        }
        chunk_max[c] = best;
    });
    double out = 0.0;
    for (double g : chunk_max) out = std::max(out, g);
    return out;
}

double binomialCoefficient(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

namespace {

void checkIntrinsicArgs(const Zonotope& z, std::size_t k) {
    if (k < 1 || k > z.dim)
        throw DimensionError("intrinsic volume: need 1 <= k <= d");
    if (z.generators.empty()) throw DimensionError("intrinsic volume: empty zonotope");
}

}  // namespace

double intrinsicVolumeExact(const Zonotope& z, std::size_t k) {
    checkIntrinsicArgs(z, k);
    const std::size_t n = z.generators.size();
    if (binomialCoefficient(n, k) > 1e7)
        throw BudgetError("intrinsicVolumeExact: C(n,k) exceeds the 1e7 enumeration budget; "
                          "use intrinsicVolumeMC");

    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<std::vector<double>> subset(k);

    double sum = 0.0;
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = z.generators[idx[i]];
        sum += gramDeterminant(subset);

        // next lexicographic k-combination
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return std::ldexp(sum, static_cast<int>(k));
}

McEstimate intrinsicVolumeMC(const Zonotope& z, std::size_t k, std::size_t samples,
                             RngStream& stream) {
    checkIntrinsicArgs(z, k);
    if (samples < 100) throw DimensionError("intrinsicVolumeMC: need samples >= 100");
    const std::size_t n = z.generators.size();
    const double scale = std::ldexp(binomialCoefficient(n, k), static_cast<int>(k));

    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::vector<double>> subset(k);

    double sum = 0.0, sum2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t r =
                j + static_cast<std::size_t>(stream.uniform01() * static_cast<double>(n - j));
            std::swap(pool[j], pool[std::min(r, n - 1)]);
            subset[j] = z.generators[pool[j]];
        }
        const double g = gramDeterminant(subset);
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / static_cast<double>(samples);
    const double var = std::max(0.0, sum2 / static_cast<double>(samples) - mean * mean);
    const double sd = std::sqrt(var / static_cast<double>(samples));
    return McEstimate{scale * mean, scale * sd};
}

double gammaLanczos(double x) {
    // Lanczos g = 7, 9 coefficients
    static const double coeff[9] = {
        0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,  12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gammaLanczos(1.0 - x));
    }
    x -= 1.0;
    double a = coeff[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coeff[i] / (x + i);
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double intrinsicVolumeLimit(std::size_t d, std::size_t k) {
    if (k < 1 || k > d) throw DimensionError("intrinsicVolumeLimit: need 1 <= k <= d");
    return std::pow(2.0, 0.5 * static_cast<double>(k)) * binomialCoefficient(d, k) *
           gammaLanczos(1.0 + 0.5 * static_cast<double>(d - k)) /
           gammaLanczos(1.0 + 0.5 * static_cast<double>(d));
}

}  // namespace projlab
