#include "projlab/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>

#include "projlab/errors.hpp"
#include "projlab/linalg.hpp"

namespace projlab {

namespace {

constexpr double kEulerMascheroni = 0.57721566490153286;
constexpr double kAdaptiveTol = 1e-10;
constexpr double kTailSwitch = 1.5;    // bounded symmetric laws use the tail form above this
constexpr double kBoundaryCap = 1e6;
constexpr double kBoundaryGrowthTol = 0.05;

double sqrt2OverPi() { return std::sqrt(2.0 / std::numbers::pi); }

// Nodes/weights of an orthogonal-polynomial rule from its tridiagonal Jacobi
// matrix (Golub & Welsch 1969).
HermiteRule ruleFromJacobiMatrix(std::size_t m, const std::vector<double>& offdiag,
                                 double total_mass) {
    DenseMatrix t(m, m);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        t(i, i + 1) = offdiag[i];
        t(i + 1, i) = offdiag[i];
    }
    const SymmetricEigen eig = jacobiEigen(t);

    HermiteRule rule;
    rule.order = m;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        // jacobiEigen sorts descending; store ascending
        const std::size_t src = m - 1 - j;
        rule.nodes[j] = eig.eigenvalues[src];
        const double v0 = eig.eigenvectors(0, src);
        rule.weights[j] = total_mass * v0 * v0;
    }
    return rule;
}

// Rounding can break the +- pairing of symmetric rules; restore it so odd
// moments cancel.
void symmetrizePairs(HermiteRule& rule) {
    const std::size_t m = rule.order;
    for (std::size_t i = 0; i < m / 2; ++i) {
        const std::size_t j = m - 1 - i;
        const double mag = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        rule.nodes[i] = -mag;
        rule.nodes[j] = mag;
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
}

const HermiteRule& legendreRule32() {
    static const HermiteRule rule = [] {
        const std::size_t m = 32;
        std::vector<double> off(m - 1);
        for (std::size_t k = 1; k < m; ++k)
            off[k - 1] = static_cast<double>(k) / std::sqrt(4.0 * k * k - 1.0);
        HermiteRule r = ruleFromJacobiMatrix(m, off, 2.0);
        symmetrizePairs(r);
        return r;
    }();
    return rule;
}

// integral_0^hi f(u) exp(-u^2 / (2 s^2)) du by composite Gauss-Legendre on
// panels that double in width, the first sized to resolve both the Gaussian
// window and the remainder's own scale.
template <typename F>
double gaussianWindowIntegral(const F& f, double s, double hi) {
    const HermiteRule& gl = legendreRule32();
    const double inv2s2 = 1.0 / (2.0 * s * s);
    double lo = 0.0;
    double width = 0.5 * std::min(1.0, s);
    double total = 0.0;
    while (lo < hi) {
        const double up = std::min(hi, lo + width);
        const double mid = 0.5 * (lo + up);
        const double half = 0.5 * (up - lo);
        double panel = 0.0;
        for (std::size_t i = 0; i < gl.order; ++i) {
            const double u = mid + half * gl.nodes[i];
            panel += gl.weights[i] * f(u) * std::exp(-u * u * inv2s2);
        }
        total += half * panel;
        lo = up;
        width *= 2.0;
    }
    return total;
}

}  // namespace

HermiteRule buildHermiteRule(std::size_t order) {
    if (order < 2 || order > 512)
        throw DimensionError("buildHermiteRule: order out of range [2, 512]");
    std::vector<double> off(order - 1);
    for (std::size_t k = 1; k < order; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
    HermiteRule rule = ruleFromJacobiMatrix(order, off, 1.0);
    symmetrizePairs(rule);
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    for (double& w : rule.weights) w /= sum;
    return rule;
}

const HermiteRule& hermiteRule(std::size_t order) {
    static std::map<std::size_t, std::unique_ptr<HermiteRule>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end())
        it = cache.emplace(order, std::make_unique<HermiteRule>(buildHermiteRule(order))).first;
    return *it->second;
}

RateFunction::RateFunction(NuDistribution nu) : nu_(std::move(nu)), recession_{} {
    recession_ = computeRecession();
}

double RateFunction::psiGaussHermite(double s, const HermiteRule& rule) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.order; ++j)
        sum += rule.weights[j] * nu_.logMgf(s * rule.nodes[j]);
    return sum;
}

double RateFunction::psiPrimeGaussHermite(double s, const HermiteRule& rule) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.order; ++j)
        sum += rule.weights[j] * rule.nodes[j] * nu_.logMgfDerivative(s * rule.nodes[j]);
    return sum;
}

bool RateFunction::hasTailForm() const {
    return nu_.supportBound().has_value() && nu_.symmetric();
}

namespace {

// log M(u) = slope * u + constant + remainder(u) as u -> +infinity. The
// remainder decays exponentially except for the uniform law, whose
// remainder carries the -log u drift (the Gaussian window absorbs it).
struct TailSplit {
    double slope;
    double constant;
    double cut;  // beyond this the remainder is numerically zero
};

TailSplit tailSplit(const NuDistribution& nu) {
    switch (nu.kind()) {
        case NuKind::rademacher:
            return {1.0, -std::log(2.0), 25.0};
        case NuKind::uniform_symmetric:
            return {1.0, 0.0, std::numeric_limits<double>::infinity()};
        case NuKind::finite_discrete: {
            const auto& atoms = nu.atoms();
            const double a = atoms.back().x;
            if (atoms.size() == 1) return {a, std::log(atoms.back().p), 1.0};
            const double gap = a - atoms[atoms.size() - 2].x;
            return {a, std::log(atoms.back().p), 50.0 / gap};
        }
        default:
            throw DimensionError("tailSplit: unbounded law");
    }
}

}  // namespace

double RateFunction::psiTailForm(double s) const {
    if (!hasTailForm()) throw DimensionError("psiTailForm: needs a bounded symmetric law");
    if (s == 0.0) return 0.0;
    const TailSplit split = tailSplit(nu_);
    const double hi = std::min(split.cut, 9.0 * s);
    const double integral = gaussianWindowIntegral(
        [&](double u) { return nu_.logMgf(u) - split.slope * u - split.constant; }, s, hi);
    return split.slope * sqrt2OverPi() * s + split.constant +
           2.0 / (s * std::sqrt(2.0 * std::numbers::pi)) * integral;
}

double RateFunction::psiPrimeTailForm(double s) const {
    if (!hasTailForm()) throw DimensionError("psiPrimeTailForm: needs a bounded symmetric law");
    if (s == 0.0) return 0.0;
    const TailSplit split = tailSplit(nu_);
    const double hi = std::min(split.cut, 9.0 * s);
    const double integral = gaussianWindowIntegral(
        [&](double u) { return u * (nu_.logMgfDerivative(u) - split.slope); }, s, hi);
    return split.slope * sqrt2OverPi() +
           2.0 / (s * s * std::sqrt(2.0 * std::numbers::pi)) * integral;
}

PsiEval RateFunction::adaptive(double s, bool derivative) const {
    auto eval = [&](std::size_t order) {
        const HermiteRule& rule = hermiteRule(order);
        return derivative ? psiPrimeGaussHermite(s, rule) : psiGaussHermite(s, rule);
    };
    double prev = eval(64);
    for (std::size_t order : {128u, 256u, 512u}) {
        const double cur = eval(order);
        if (std::abs(cur - prev) < kAdaptiveTol) return {cur, true};
        prev = cur;
    }
    return {prev, false};
}

PsiEval RateFunction::psi(double s) const {
    if (s < 0.0) throw DimensionError("psi: s >= 0 required");
    if (s == 0.0) return {0.0, true};
    if (hasTailForm() && s > kTailSwitch) return {psiTailForm(s), true};
    PsiEval result = adaptive(s, false);
    if (!result.accurate && hasTailForm()) return {psiTailForm(s), true};
    return result;
}

PsiEval RateFunction::psiPrime(double s) const {
    if (s < 0.0) throw DimensionError("psiPrime: s >= 0 required");
    if (hasTailForm() && s > kTailSwitch) return {psiPrimeTailForm(s), true};
    PsiEval result = adaptive(s, true);
    if (!result.accurate && hasTailForm()) return {psiPrimeTailForm(s), true};
    return result;
}

ExtendedReal RateFunction::computeRecession() const {
    if (auto slope = nu_.meanAbsGaussianSlope()) return ExtendedReal::of(*slope);
    const double p1 = adaptive(1e3, true).value;
    const double p2 = adaptive(2e3, true).value;
    if (p1 < 1e-300) return ExtendedReal::of(p2);
    if (p2 / p1 > 1.5) return ExtendedReal::infinity();
    return ExtendedReal::of(p2);
}

ExtendedReal RateFunction::boundaryValue() const {
    if (recession_.finite == false)
        throw DimensionError("boundaryValue: recession slope is infinite");
    const double rho = recession_.value;
    const double f3 = rho * 1e3 - psiValue(1e3);
    const double f4 = rho * 1e4 - psiValue(1e4);
    if (f4 > kBoundaryCap) return ExtendedReal::infinity();
    if (f4 - f3 > kBoundaryGrowthTol) return ExtendedReal::infinity();  // still diverging
    return ExtendedReal::of(f4);
}

ExtendedReal RateFunction::conjugate(double u) const {
    u = std::abs(u);
    if (recession_.finite) {
        if (u > recession_.value + 1e-12) return ExtendedReal::infinity();
        if (u >= recession_.value - 1e-12) return boundaryValue();
    }

    auto objective = [&](double s) { return u * s - psiValue(s); };

    double f_prev = 0.0, s_cur = 1.0;
    double f_cur = objective(s_cur);
    while (f_cur > f_prev && s_cur < 0x1p40) {
        f_prev = f_cur;
        s_cur *= 2.0;
        f_cur = objective(s_cur);
    }
    if (s_cur >= 0x1p40) return ExtendedReal::infinity();

    double lo = 0.0, hi = s_cur;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
    double f1 = objective(m1), f2 = objective(m2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + gr * (hi - lo);
            f2 = objective(m2);
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - gr * (hi - lo);
            f1 = objective(m1);
        }
    }
    return ExtendedReal::of(std::max(0.0, objective(0.5 * (lo + hi))));
}

ExtendedReal RateFunction::lambdaStar(std::span<const double> t) const {
    double norm2 = 0.0;
    for (double c : t) norm2 += c * c;
    return conjugate(std::sqrt(norm2));
}

double RateFunction::biconjugate(double s) const {
    double hi;
    if (recession_.finite) {
        hi = recession_.value * (1.0 - 1e-9);
    } else {
        hi = 1.0;
        auto grow = [&](double u) { return s * u - conjugate(u).value; };
        while (grow(2.0 * hi) > grow(hi) && hi < 0x1p30) hi *= 2.0;
        hi *= 2.0;
    }
    auto objective = [&](double u) { return s * u - conjugate(u).value; };
    double lo = 0.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    while (hi - lo > 1e-9) {
        const double m1 = hi - gr * (hi - lo);
        const double m2 = lo + gr * (hi - lo);
        if (objective(m1) < objective(m2))
            lo = m1;
        else
            hi = m2;
    }
    return objective(0.5 * (lo + hi));
}

std::vector<double> RateFunction::asymptoteResiduals(std::span<const double> s_values) const {
    const NuKind kind = nu_.kind();
    if (kind != NuKind::rademacher && kind != NuKind::uniform_symmetric)
        throw DimensionError("asymptoteResiduals: supported for rademacher and uniform only");
    std::vector<double> out;
    out.reserve(s_values.size());
    const double slope = sqrt2OverPi();
    for (double s : s_values) {
        if (kind == NuKind::rademacher) {
            out.push_back(psiValue(s) + std::log(2.0) - slope * s);
        } else {
            out.push_back(psiValue(s) + std::log(s) - slope * s +
                          0.5 * (std::log(2.0) + kEulerMascheroni));
        }
    }
    return out;
}

RateProfile buildRateProfile(const RateFunction& rate, double u_max, std::size_t points) {
    if (points < 2) throw DimensionError("buildRateProfile: need at least 2 points");
    if (!(u_max > 0.0)) throw DimensionError("buildRateProfile: u_max must be positive");
    RateProfile profile{rate.nu(), rate.recessionSlope(), ExtendedReal::of(0.0), {}};
    if (profile.recession_slope.finite) profile.boundary_value = rate.boundaryValue();
    profile.table.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double u = u_max * static_cast<double>(i) / static_cast<double>(points - 1);
        profile.table.push_back({u, rate.conjugate(u)});
    }
    return profile;
}

void writeRateTableCsv(std::ostream& out, const RateProfile& profile,
                       std::span<const std::string> metadata_lines) {
    for (const auto& line : metadata_lines) out << "# " << line << "\n";
    out << "# recession_slope=" << profile.recession_slope.str() << "\n";
    out << "# boundary_value="
        << (profile.recession_slope.finite ? profile.boundary_value.str() : "n/a") << "\n";
    out << "u,psi_star,finite_flag\n";
    char buf[40];
    for (const auto& point : profile.table) {
        std::snprintf(buf, sizeof buf, "%.17g", point.u);
        out << buf << "," << point.psi_star.str() << ","
            << (point.psi_star.finite ? "true" : "false") << "\n";
    }
}

}  // namespace projlab
