#include "projlab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "projlab/errors.hpp"

namespace projlab {

NuDistribution NuDistribution::gaussian() {
    return NuDistribution(NuKind::gaussian, {}, std::nullopt, true);
}

NuDistribution NuDistribution::rademacher() {
    return NuDistribution(NuKind::rademacher, {}, 1.0, true);
}

NuDistribution NuDistribution::uniformSymmetric() {
    return NuDistribution(NuKind::uniform_symmetric, {}, 1.0, true);
}

NuDistribution NuDistribution::finiteDiscrete(std::vector<Atom> atoms) {
    if (atoms.empty()) throw DimensionError("finiteDiscrete: need at least one atom");
    double sum = 0.0;
    double bound = 0.0;
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.x) || !std::isfinite(a.p))
            throw DimensionError("finiteDiscrete: non-finite atom");
        if (a.p <= 0.0) throw DimensionError("finiteDiscrete: weights must be positive");
        sum += a.p;
        bound = std::max(bound, std::abs(a.x));
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw DimensionError("finiteDiscrete: weights must sum to 1 within 1e-9");
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i)
        if (atoms[i].x == atoms[i + 1].x)
            throw DimensionError("finiteDiscrete: duplicate atom positions");
    for (Atom& a : atoms) a.p /= sum;

    bool symmetric = true;
    const std::size_t k = atoms.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Atom& lhs = atoms[i];
        const Atom& rhs = atoms[k - 1 - i];
        if (std::abs(lhs.x + rhs.x) > 1e-12 || std::abs(lhs.p - rhs.p) > 1e-12) {
            symmetric = false;
            break;
        }
    }
    return NuDistribution(NuKind::finite_discrete, std::move(atoms), bound, symmetric);
}

NuDistribution NuDistribution::fromJsonText(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DimensionError(std::string("discrete law: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw DimensionError("discrete law: top level must be an object");
    for (const auto& [key, _] : doc.items())
        if (key != "atoms") throw DimensionError("discrete law: unknown field '" + key + "'");
    if (!doc.contains("atoms") || !doc["atoms"].is_array())
        throw DimensionError("discrete law: missing 'atoms' array");

    std::vector<Atom> atoms;
    for (const auto& item : doc["atoms"]) {
        if (!item.is_object()) throw DimensionError("discrete law: atom must be an object");
        for (const auto& [key, _] : item.items())
            if (key != "x" && key != "p")
                throw DimensionError("discrete law: unknown atom field '" + key + "'");
        if (!item.contains("x") || !item.contains("p") || !item["x"].is_number() ||
            !item["p"].is_number())
            throw DimensionError("discrete law: atom needs numeric 'x' and 'p'");
        atoms.push_back(Atom{item["x"].get<double>(), item["p"].get<double>()});
    }
    return finiteDiscrete(std::move(atoms));
}

NuDistribution NuDistribution::fromJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DimensionError("discrete law: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return fromJsonText(buf.str());
}

std::string NuDistribution::descriptor() const {
    switch (kind_) {
        case NuKind::gaussian: return "gaussian";
        case NuKind::rademacher: return "rademacher";
        case NuKind::uniform_symmetric: return "uniform";
        case NuKind::finite_discrete: {
            std::ostringstream out;
            out << "discrete[";
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (i) out << ",";
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g:%.17g", atoms_[i].x, atoms_[i].p);
                out << buf;
            }
            out << "]";
            return out.str();
        }
    }
    return "?";
}

double NuDistribution::logMgf(double y) const {
    switch (kind_) {
        case NuKind::gaussian:
            return 0.5 * y * y;
        case NuKind::rademacher: {
            // log cosh(y), safe for |y| up to the double range
            const double a = std::abs(y);
            return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
        }
        case NuKind::uniform_symmetric: {
            const double a = std::abs(y);
            if (a < 1e-2) {
                const double y2 = a * a;
                return std::log1p(y2 / 6.0 + y2 * y2 / 120.0 + y2 * y2 * y2 / 5040.0);
            }
            // log(sinh a / a) = a - log(2a) + log(1 - e^{-2a})
            return a - std::log(2.0 * a) + std::log1p(-std::exp(-2.0 * a));
        }
        case NuKind::finite_discrete: {
            if (y == 0.0) return 0.0;  // weights are normalized
            double m = -std::numeric_limits<double>::infinity();
            for (const Atom& a : atoms_) m = std::max(m, y * a.x);
            double s = 0.0;
            for (const Atom& a : atoms_) s += a.p * std::exp(y * a.x - m);
            return m + std::log(s);
        }
    }
    return 0.0;
}

double NuDistribution::logMgfDerivative(double y) const {
    switch (kind_) {
        case NuKind::gaussian:
            return y;
        case NuKind::rademacher:
            return std::tanh(y);
        case NuKind::uniform_symmetric: {
            const double a = std::abs(y);
            const double sign = y < 0.0 ? -1.0 : 1.0;
            if (a < 1e-2) {
                // coth a - 1/a = a/3 - a^3/45 + 2 a^5/945 - ...
                return sign * (a / 3.0 - a * a * a / 45.0 + 2.0 * std::pow(a, 5) / 945.0);
            }
            if (a > 350.0) return sign * (1.0 - 1.0 / a);
            return sign * (1.0 / std::tanh(a) - 1.0 / a);
        }
        case NuKind::finite_discrete: {
            double m = -std::numeric_limits<double>::infinity();
            for (const Atom& a : atoms_) m = std::max(m, y * a.x);
            double num = 0.0, den = 0.0;
            for (const Atom& a : atoms_) {
                const double w = a.p * std::exp(y * a.x - m);
                num += w * a.x;
                den += w;
            }
            return num / den;
        }
    }
    return 0.0;
}

double NuDistribution::sample(RngStream& stream) const {
    switch (kind_) {
        case NuKind::gaussian:
            return stream.normal();
        case NuKind::rademacher:
            return stream.uniform01() < 0.5 ? -1.0 : 1.0;
        case NuKind::uniform_symmetric:
            return 2.0 * stream.uniform01() - 1.0;
        case NuKind::finite_discrete: {
            const double u = stream.uniform01();
            double cum = 0.0;
            for (const Atom& a : atoms_) {
                cum += a.p;
                if (u < cum) return a.x;
            }
            return atoms_.back().x;
        }
    }
    return 0.0;
}

std::optional<double> NuDistribution::meanAbsGaussianSlope() const {
    if (!support_bound_) return std::nullopt;
    return *support_bound_ * std::sqrt(2.0 / std::numbers::pi);
}

}  // namespace projlab
