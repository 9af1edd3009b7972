#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "projlab/errors.hpp"
#include "projlab/ratefn.hpp"

using namespace projlab;

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
const double kGamma = 0.57721566490153286;

// independent trapezoid oracle: integral of f against the standard normal
// density over [-12, 12] with step 1e-4
template <typename F>
double trapezoidNormalExpectation(const F& f) {
    const double h = 1e-4;
    const double lo = -12.0;
    const int steps = static_cast<int>(std::round(24.0 / h));
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double x = lo + h * i;
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        sum += w * f(x) * std::exp(-0.5 * x * x) * inv_sqrt_2pi;
    }
    return sum * h;
}

double oracleLogCosh(double s) {
    return trapezoidNormalExpectation([&](double x) { return std::log(std::cosh(s * x)); });
}

double oracleRadTail(double s) {
    return trapezoidNormalExpectation(
        [&](double x) { return std::log1p(std::exp(-2.0 * s * std::abs(x))); });
}

double oracleLogSinhc(double s) {
    return trapezoidNormalExpectation([&](double x) {
        const double v = s * std::abs(x);
        if (v < 1e-12) return 0.0;
        if (v > 650.0) return v - std::log(2.0 * v);  // sinh overflows past here
        return std::log(std::sinh(v) / v);
    });
}

std::vector<double> geometricGrid() {
    std::vector<double> grid;
    for (int e = -6; e <= 7; ++e) grid.push_back(std::pow(2.0, e));
    return grid;
}

}  // namespace

TEST_CASE("hermite rules hit gaussian moments at the exactness degree") {
    const HermiteRule r5 = buildHermiteRule(5);
    double m2 = 0.0, m8 = 0.0, wsum = 0.0, odd = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(r5.weights[i] > 0.0);
        wsum += r5.weights[i];
        m2 += r5.weights[i] * r5.nodes[i] * r5.nodes[i];
        m8 += r5.weights[i] * std::pow(r5.nodes[i], 8);
        odd += r5.weights[i] * std::pow(r5.nodes[i], 3);
    }
    CHECK(std::abs(wsum - 1.0) < 1e-12);
    CHECK(std::abs(m2 - 1.0) < 1e-13);
    CHECK(std::abs(m8 - 105.0) / 105.0 < 1e-10);
    CHECK(std::abs(odd) < 1e-15);  // nodes and weights are symmetrized

    const HermiteRule r3 = buildHermiteRule(3);
    double m8_3 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) m8_3 += r3.weights[i] * std::pow(r3.nodes[i], 8);
    CHECK(std::abs(m8_3 - 105.0) > 1.0);  // degree 8 > 2*3-1

    const HermiteRule r64 = hermiteRule(64);
    double m4 = 0.0;
    for (std::size_t i = 0; i < 64; ++i) m4 += r64.weights[i] * std::pow(r64.nodes[i], 4);
    CHECK(std::abs(m4 - 3.0) < 1e-12);

    CHECK_THROWS_AS(buildHermiteRule(1), DimensionError);
    CHECK_THROWS_AS(buildHermiteRule(513), DimensionError);
}

TEST_CASE("psi closed forms and the trapezoid oracle") {
    const RateFunction gauss(NuDistribution::gaussian());
    for (double s : {0.0, 0.5, 1.0, 2.0, 5.0})
        CHECK(std::abs(gauss.psiValue(s) - 0.5 * s * s) < 1e-12);

    const RateFunction rad(NuDistribution::rademacher());
    CHECK(rad.psiValue(0.0) == 0.0);
    CHECK(std::abs(rad.psiValue(1.0) - oracleLogCosh(1.0)) < 1e-8);
}

TEST_CASE("tail form and quadrature agree where both converge") {
    const RateFunction rad(NuDistribution::rademacher());
    const RateFunction unif(NuDistribution::uniformSymmetric());
    const RateFunction disc(NuDistribution::finiteDiscrete({{-0.5, 0.5}, {0.5, 0.5}}));
    for (double s : {0.25, 0.5, 1.0, 1.4}) {
        CHECK(std::abs(rad.psi(s).value - rad.psiTailForm(s)) < 1e-10);
        CHECK(std::abs(unif.psi(s).value - unif.psiTailForm(s)) < 1e-10);
        CHECK(std::abs(disc.psi(s).value - disc.psiTailForm(s)) < 1e-10);
    }
}

TEST_CASE("psi is zero at zero, nondecreasing and convex on the grid") {
    const std::vector<double> grid = geometricGrid();
    for (const auto& nu : {NuDistribution::gaussian(), NuDistribution::rademacher(),
                           NuDistribution::uniformSymmetric()}) {
        const RateFunction rate(nu);
        std::vector<double> values;
        for (double s : grid) values.push_back(rate.psiValue(s));
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) CHECK(values[i] <= values[i + 1]);
        for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
            const double a = grid[i], b = grid[i + 1], c = grid[i + 2];
            const double chord =
                values[i] * (c - b) / (c - a) + values[i + 2] * (b - a) / (c - a);
            CHECK(values[i + 1] <= chord + 1e-9);
        }
    }
}

TEST_CASE("psiPrime closed forms, derivative bound, finite differences") {
    const RateFunction gauss(NuDistribution::gaussian());
    for (double s : {0.25, 1.0, 3.0}) CHECK(std::abs(gauss.psiPrimeValue(s) - s) < 1e-12);

    const RateFunction rad(NuDistribution::rademacher());
    const RateFunction unif(NuDistribution::uniformSymmetric());
    CHECK(rad.psiPrimeValue(0.0) == 0.0);
    CHECK(unif.psiPrimeValue(0.0) == 0.0);

    for (double s : {0.5, 1.0, 2.0, 5.0}) {
        CHECK(rad.psiPrimeValue(s) <= kSqrt2OverPi + 1e-10);
        const double fd = (rad.psiValue(s + 1e-4) - rad.psiValue(s - 1e-4)) / 2e-4;
        CHECK(std::abs(rad.psiPrimeValue(s) - fd) < 1e-6);
    }

    for (const auto& nu : {NuDistribution::gaussian(), NuDistribution::rademacher(),
                           NuDistribution::uniformSymmetric()}) {
        const RateFunction rate(nu);
        for (double s : geometricGrid()) {
            const double fd = (rate.psiValue(s + 1e-4) - rate.psiValue(std::max(0.0, s - 1e-4))) /
                              (s < 1e-4 ? s + 1e-4 : 2e-4);
            CHECK(std::abs(rate.psiPrimeValue(s) - fd) < 1e-6);
        }
    }
}

TEST_CASE("recession slopes") {
    CHECK(RateFunction(NuDistribution::rademacher()).recessionSlope().value ==
          doctest::Approx(kSqrt2OverPi).epsilon(1e-14));
    CHECK(RateFunction(NuDistribution::uniformSymmetric()).recessionSlope().value ==
          doctest::Approx(kSqrt2OverPi).epsilon(1e-14));
    CHECK_FALSE(RateFunction(NuDistribution::gaussian()).recessionSlope().finite);
}

TEST_CASE("conjugate closed forms and boundary behavior") {
    const RateFunction gauss(NuDistribution::gaussian());
    CHECK(std::abs(gauss.conjugate(1.3).value - 0.845) < 1e-8);
    for (double u : {0.0, 0.4, 1.0, 2.2, 3.0})
        CHECK(std::abs(gauss.conjugate(u).value - 0.5 * u * u) < 1e-8);

    const RateFunction rad(NuDistribution::rademacher());
    const ExtendedReal at_rho = rad.conjugate(kSqrt2OverPi);
    REQUIRE(at_rho.finite);
    CHECK(std::abs(at_rho.value - std::log(2.0)) < 0.01);
    CHECK_FALSE(rad.conjugate(0.85).finite);
    CHECK_FALSE(rad.conjugate(0.9).finite);
    CHECK_FALSE(rad.conjugate(1.0).finite);

    const RateFunction unif(NuDistribution::uniformSymmetric());
    CHECK_FALSE(unif.conjugate(kSqrt2OverPi).finite);
    CHECK_FALSE(unif.conjugate(0.9).finite);

    // frozen from an independent golden-section over a trapezoid-integrated
    // objective
    CHECK(rad.conjugate(0.5).value == doctest::Approx(0.1442640561).epsilon(1e-6));

    // symmetric in u
    CHECK(rad.conjugate(-0.5).value == rad.conjugate(0.5).value);
    CHECK(rad.conjugate(0.0).value == 0.0);
}

TEST_CASE("rate profile table: monotone, Fenchel-Young, serialization") {
    const RateFunction rad(NuDistribution::rademacher());
    const RateProfile profile = buildRateProfile(rad, kSqrt2OverPi + 0.2, 200);

    CHECK(profile.table.front().psi_star.value == 0.0);
    double prev = 0.0;
    bool seen_infinite = false;
    for (const auto& point : profile.table) {
        if (point.psi_star.finite) {
            CHECK_FALSE(seen_infinite);  // finite part is an initial segment
            CHECK(point.psi_star.value >= prev - 1e-12);
            prev = point.psi_star.value;
        } else {
            seen_infinite = true;
            CHECK(point.u > kSqrt2OverPi);
        }
    }
    CHECK(seen_infinite);

    const std::vector<double> grid = geometricGrid();
    for (double s : grid) {
        const double psi = rad.psiValue(s);
        for (const auto& point : profile.table) {
            if (!point.psi_star.finite) continue;
            CHECK(point.u * s <= psi + point.psi_star.value + 1e-8);
        }
    }

    std::ostringstream out;
    const std::vector<std::string> meta = {"case=test"};
    writeRateTableCsv(out, profile, meta);
    const std::string text = out.str();
    CHECK(text.find("# case=test") != std::string::npos);
    CHECK(text.find("u,psi_star,finite_flag") != std::string::npos);
    CHECK(text.find(",inf,false") != std::string::npos);
}

TEST_CASE("biconjugation recovers psi on the strictly convex range") {
    const std::vector<double> grid = geometricGrid();
    for (const auto& nu : {NuDistribution::gaussian(), NuDistribution::rademacher()}) {
        const RateFunction rate(nu);
        const ExtendedReal rho = rate.recessionSlope();
        for (double s : grid) {
            if (rho.finite && rate.psiPrimeValue(s) >= rho.value - 1e-3) continue;
            if (s > 16.0) continue;  // keep the nested optimization cheap
            CHECK(std::abs(rate.biconjugate(s) - rate.psiValue(s)) < 1e-6);
        }
    }
}

TEST_CASE("lambdaStar is radial") {
    const RateFunction gauss(NuDistribution::gaussian());
    CHECK(gauss.lambdaStar(std::vector<double>{0.0, 0.0}).value == 0.0);
    CHECK(std::abs(gauss.lambdaStar(std::vector<double>{1.0, 1.0}).value - 1.0) < 1e-8);

    const RateFunction rad(NuDistribution::rademacher());
    const double theta = 1.1;
    const std::vector<double> t = {0.3, 0.2};
    const std::vector<double> qt = {std::cos(theta) * t[0] - std::sin(theta) * t[1],
                                    std::sin(theta) * t[0] + std::cos(theta) * t[1]};
    CHECK(std::abs(rad.lambdaStar(t).value - rad.lambdaStar(qt).value) < 1e-10);
}

TEST_CASE("rademacher residuals: positive, decreasing, under the tail oracle bound") {
    const RateFunction rad(NuDistribution::rademacher());
    const std::vector<double> svals = {10.0, 20.0, 50.0, 100.0};
    const std::vector<double> r = rad.asymptoteResiduals(svals);
    for (std::size_t i = 0; i < svals.size(); ++i) {
        CHECK(r[i] > 0.0);
        CHECK(r[i] <= 0.33 / svals[i]);
        CHECK(std::abs(r[i] - oracleRadTail(svals[i])) < 1e-6);
        if (i > 0) CHECK(r[i] < r[i - 1]);
    }
    CHECK(r[1] == doctest::Approx(0.0164).epsilon(2e-3));
}

TEST_CASE("uniform psi follows the corrected asymptote; residual matches the oracle") {
    const RateFunction unif(NuDistribution::uniformSymmetric());

    // Psi(s) + log s - sqrt(2/pi) s converges to (gamma - log 2)/2, with an
    // O(1/s) tail; checked against the trapezoid oracle
    const double a50 = unif.psiValue(50.0) + std::log(50.0) - kSqrt2OverPi * 50.0;
    const double a100 = unif.psiValue(100.0) + std::log(100.0) - kSqrt2OverPi * 100.0;
    const double limit = 0.5 * (kGamma - std::log(2.0));
    CHECK(std::abs(a50 - limit) < 0.02);
    CHECK(std::abs(a100 - limit) < std::abs(a50 - limit));
    CHECK(std::abs(unif.psiValue(50.0) - oracleLogSinhc(50.0)) < 1e-6);

    const std::vector<double> svals = {50.0, 100.0};
    const std::vector<double> r = unif.asymptoteResiduals(svals);
    for (std::size_t i = 0; i < svals.size(); ++i) {
        const double oracle =
            oracleLogSinhc(svals[i]) + std::log(svals[i]) - kSqrt2OverPi * svals[i] +
            0.5 * (std::log(2.0) + kGamma);
        CHECK(std::abs(r[i] - oracle) < 1e-6);
    }

    CHECK_THROWS_AS(RateFunction(NuDistribution::gaussian())
                        .asymptoteResiduals(std::vector<double>{1.0}),
                    DimensionError);
}

TEST_CASE("non-converging quadrature without a tail form carries a warning") {
    const RateFunction asym(NuDistribution::finiteDiscrete({{0.0, 0.5}, {1.0, 0.5}}));
    const PsiEval eval = asym.psi(50.0);
    CHECK_FALSE(eval.accurate);
    CHECK(std::isfinite(eval.value));

    // small s still converges
    CHECK(asym.psi(0.5).accurate);
}
