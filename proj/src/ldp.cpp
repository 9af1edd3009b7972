#include "projlab/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "projlab/errors.hpp"
#include "projlab/parallel.hpp"

namespace projlab {

EventRegion EventRegion::halfSpace(std::vector<double> direction, double threshold) {
    if (direction.empty()) throw DimensionError("halfSpace: empty direction");
    double norm2 = 0.0;
    for (double c : direction) {
        if (!std::isfinite(c)) throw DimensionError("halfSpace: non-finite direction");
        norm2 += c * c;
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
        throw DimensionError("halfSpace: direction must be unit norm within 1e-12");
    if (!std::isfinite(threshold)) throw DimensionError("halfSpace: non-finite threshold");
    EventRegion r;
    r.kind = Kind::half_space;
    r.dim = direction.size();
    r.direction = std::move(direction);
    r.threshold = threshold;
    return r;
}

EventRegion EventRegion::ballComplement(std::size_t dim, double radius) {
    if (dim < 1) throw DimensionError("ballComplement: dim >= 1 required");
    if (!std::isfinite(radius) || radius < 0.0)
        throw DimensionError("ballComplement: radius must be finite and >= 0");
    EventRegion r;
    r.kind = Kind::ball_complement;
    r.dim = dim;
    r.radius = radius;
    return r;
}

bool EventRegion::contains(std::span<const double> point) const {
    if (point.size() != dim) throw DimensionError("EventRegion: point dimension mismatch");
    if (kind == Kind::half_space) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim; ++i) dot += direction[i] * point[i];
        return dot >= threshold;
    }
    double norm2 = 0.0;
    for (double c : point) norm2 += c * c;
    return std::sqrt(norm2) >= radius;
}

std::string EventRegion::descriptor() const {
    char buf[64];
    if (kind == Kind::half_space) {
        std::string s = "half:";
        for (std::size_t i = 0; i < direction.size(); ++i) {
            if (i) s += ",";
            std::snprintf(buf, sizeof buf, "%.17g", direction[i]);
            s += buf;
        }
        std::snprintf(buf, sizeof buf, ":%.17g", threshold);
        return s + buf;
    }
    std::snprintf(buf, sizeof buf, "ballc:%.17g", radius);
    return buf;
}

ExtendedReal theoreticalRate(const RateFunction& rate, const EventRegion& region) {
    if (region.kind == EventRegion::Kind::half_space) {
        if (region.threshold < 0.0) return ExtendedReal::of(0.0);
        return rate.conjugate(region.threshold);
    }
    return rate.conjugate(region.radius);
}

namespace {

// scaled generator columns: column i of the projection matrix times `scale`.
std::vector<double> scaledColumns(const DenseMatrix& m, double scale) {
    std::vector<double> cols(m.rows() * m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t i = 0; i < m.cols(); ++i)
            cols[i * m.rows() + r] = m(r, i) * scale;
    return cols;
}

}  // namespace

MeasureEstimate estimateMeasureMC(const NuDistribution& nu, const StiefelFrame& frame,
                                  const EventRegion& region, std::int64_t samples,
                                  const RngStream& stream, ProjectionMode mode) {
    if (samples < 1000) throw DimensionError("estimateMeasureMC: need samples >= 1000");
    if (region.dim != frame.d()) throw DimensionError("estimateMeasureMC: region/frame dimension mismatch");
    const std::size_t d = frame.d();
    const std::size_t n = frame.n();

    const std::vector<double> cols =
        mode == ProjectionMode::uniform
            ? scaledColumns(frame.i_star, 1.0 / std::sqrt(static_cast<double>(n)))
            : scaledColumns(frame.g, 1.0 / static_cast<double>(n));

    constexpr int kChunks = 256;
    std::int64_t chunk_hits[kChunks] = {0};
    forEachChunk(samples, kChunks, [&](int c, std::int64_t lo, std::int64_t hi) {
        RngStream local = stream.substream(static_cast<std::uint64_t>(c));
        std::vector<double> y(d);
        std::int64_t hits = 0;
        for (std::int64_t s = lo; s < hi; ++s) {
            std::fill(y.begin(), y.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double xi = nu.sample(local);
                const double* col = &cols[i * d];
                for (std::size_t r = 0; r < d; ++r) y[r] += xi * col[r];
            }
            if (region.contains(y)) ++hits;
        }
        chunk_hits[c] = hits;
    });

    MeasureEstimate est;
    est.samples = samples;
    for (std::int64_t h : chunk_hits) est.hits += h;
    est.mu_hat = static_cast<double>(est.hits) / static_cast<double>(samples);
    est.std_err = std::sqrt(est.mu_hat * (1.0 - est.mu_hat) / static_cast<double>(samples));
    return est;
}

namespace {

std::vector<Atom> enumerationAtoms(const NuDistribution& nu) {
    if (nu.kind() == NuKind::finite_discrete) return nu.atoms();
    if (nu.kind() == NuKind::rademacher) return {{-1.0, 0.5}, {+1.0, 0.5}};
    throw DimensionError("enumerateExact: law must be discrete with finitely many atoms");
}

}  // namespace

double enumerateExact(const NuDistribution& nu, const StiefelFrame& frame,
                      const EventRegion& region) {
    if (region.dim != frame.d()) throw DimensionError("enumerateExact: region/frame dimension mismatch");
    const std::vector<Atom> atoms = enumerationAtoms(nu);
    const std::size_t k = atoms.size();
    const std::size_t n = frame.n();
    const std::size_t d = frame.d();

    double states = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        states *= static_cast<double>(k);
        if (states > static_cast<double>(1 << 24))
            throw BudgetError("enumerateExact: k^n exceeds the 2^24 state budget");
    }

    const std::vector<double> cols =
        scaledColumns(frame.i_star, 1.0 / std::sqrt(static_cast<double>(n)));

    // depth-first odometer over coordinate assignments; each level keeps its
    // own partial projection so paths do not accumulate rounding drift
    std::vector<double> partial((n + 1) * d, 0.0);
    double mass = 0.0;
    struct Walker {
        const std::vector<Atom>& atoms;
        const std::vector<double>& cols;
        const EventRegion& region;
        std::size_t n, d;
        std::vector<double>& partial;
        double& mass;

        void walk(std::size_t pos, double prob) {
            const double* y = &partial[pos * d];
            if (pos == n) {
                if (region.contains(std::span<const double>(y, d))) mass += prob;
                return;
            }
            const double* col = &cols[pos * d];
            double* next = &partial[(pos + 1) * d];
            for (const Atom& a : atoms) {
                for (std::size_t r = 0; r < d; ++r) next[r] = y[r] + a.x * col[r];
                walk(pos + 1, prob * a.p);
            }
        }
    } walker{atoms, cols, region, n, d, partial, mass};
    walker.walk(0, 1.0);
    return mass;
}

EventRegion transitionRegion(const StiefelFrame& frame, const EventRegion& region) {
    if (region.kind != EventRegion::Kind::half_space)
        throw DimensionError("transitionRegion: half-spaces only");
    if (region.dim != frame.d()) throw DimensionError("transitionRegion: dimension mismatch");

    // The mapped half-space {z : <z, v> >= b} must satisfy
    // M y in it  <=>  <y, u> >= a for the symmetric scale matrix M, which
    // forces v = M^{-1} u renormalized; solve M v = u by elimination.
    const std::size_t d = region.dim;
    DenseMatrix m = frame.scale_to_identity;
    std::vector<double> dir = region.direction;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
        if (pivot != col) {
            for (std::size_t c = 0; c < d; ++c) std::swap(m(pivot, c), m(col, c));
            std::swap(dir[pivot], dir[col]);
        }
        for (std::size_t r = col + 1; r < d; ++r) {
            const double f = m(r, col) / m(col, col);
            for (std::size_t c = col; c < d; ++c) m(r, c) -= f * m(col, c);
            dir[r] -= f * dir[col];
        }
    }
    for (std::size_t col = d; col-- > 0;) {
        for (std::size_t c = col + 1; c < d; ++c) dir[col] -= m(col, c) * dir[c];
        dir[col] /= m(col, col);
    }

    double norm = 0.0;
    for (double c : dir) norm += c * c;
    norm = std::sqrt(norm);
    for (double& c : dir) c /= norm;
    return EventRegion::halfSpace(std::move(dir), region.threshold / norm);
}

std::string estimatorName(Estimator e) {
    switch (e) {
        case Estimator::mc_uniform: return "mc_uniform";
        case Estimator::mc_gaussian: return "mc_gaussian";
        case Estimator::exact_enum: return "exact_enum";
    }
    return "?";
}

LdpReport rateConvergenceScan(const NuDistribution& nu, std::size_t d, const EventRegion& region,
                              std::span<const std::size_t> n_values, std::int64_t samples,
                              std::span<const Estimator> estimators, std::uint64_t master_seed) {
    if (region.dim != d) throw DimensionError("rateConvergenceScan: region dimension != d");
    RateFunction rate(nu);

    LdpReport report;
    report.nu_descriptor = nu.descriptor();
    report.d = d;
    report.region = region;
    report.theoretical_rate = theoreticalRate(rate, region);

    const RngStream base(master_seed, 0);
    for (std::size_t idx = 0; idx < n_values.size(); ++idx) {
        const std::size_t n = n_values[idx];
        RngStream frame_stream = base.substream(0xF000 + idx);
        const StiefelFrame frame = sampleFrame(frame_stream, d, n);

        for (Estimator est : estimators) {
            LdpRow row;
            row.n = n;
            row.estimator = est;
            row.frame_seed = frame_stream.streamId();
            if (est == Estimator::exact_enum) {
                row.mu_hat = enumerateExact(nu, frame, region);
                const std::int64_t natoms =
                    static_cast<std::int64_t>(enumerationAtoms(nu).size());
                row.sample_count = 1;
                for (std::size_t i = 0; i < n; ++i) row.sample_count *= natoms;
                row.std_err = 0.0;
                row.reliable = true;
            } else {
                const RngStream sample_stream = base.substream(0x5000 + 16 * idx +
                                                               (est == Estimator::mc_gaussian));
                const MeasureEstimate e = estimateMeasureMC(
                    nu, frame, region, samples, sample_stream,
                    est == Estimator::mc_uniform ? ProjectionMode::uniform
                                                 : ProjectionMode::gaussian);
                row.mu_hat = e.mu_hat;
                row.sample_count = e.samples;
                row.std_err = e.std_err;
                row.reliable = e.hits >= 50;
            }
            row.empirical_rate =
                row.mu_hat > 0.0
                    ? ExtendedReal::of(-std::log(row.mu_hat) / static_cast<double>(n))
                    : ExtendedReal::infinity();
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

namespace {

nlohmann::json regionToJson(const EventRegion& region) {
    nlohmann::json j;
    if (region.kind == EventRegion::Kind::half_space) {
        j["kind"] = "half_space";
        j["direction"] = region.direction;
        j["threshold"] = region.threshold;
    } else {
        j["kind"] = "ball_complement";
        j["radius"] = region.radius;
    }
    return j;
}

nlohmann::json extToJson(const ExtendedReal& v) {
    if (v.finite) return v.value;
    return "inf";
}

}  // namespace

void writeLdpReportJson(std::ostream& out, const LdpReport& report,
                        const std::string& config_json_text) {
    nlohmann::json j;
    if (!config_json_text.empty()) j["config"] = nlohmann::json::parse(config_json_text);
    j["nu"] = report.nu_descriptor;
    j["d"] = report.d;
    j["region"] = regionToJson(report.region);
    j["theoretical_rate"] = extToJson(report.theoretical_rate);
    j["rows"] = nlohmann::json::array();
    for (const LdpRow& row : report.rows) {
        nlohmann::json r;
        r["n"] = row.n;
        r["estimator"] = estimatorName(row.estimator);
        r["mu_hat"] = row.mu_hat;
        r["empirical_rate"] = extToJson(row.empirical_rate);
        r["samples"] = row.sample_count;
        r["std_err"] = row.std_err;
        r["frame_seed"] = row.frame_seed;
        r["reliable"] = row.reliable;
        j["rows"].push_back(std::move(r));
    }
    out << j.dump(2) << "\n";
}

void writeLdpReportCsv(std::ostream& out, const LdpReport& report,
                       std::span<const std::string> metadata_lines) {
    for (const auto& line : metadata_lines) out << "# " << line << "\n";
    out << "# nu=" << report.nu_descriptor << "\n";
    out << "# region=" << report.region.descriptor() << "\n";
    out << "# theoretical_rate=" << report.theoretical_rate.str() << "\n";
    out << "n,estimator,mu_hat,empirical_rate,std_err,reliable\n";
    char buf[40];
    for (const LdpRow& row : report.rows) {
        out << row.n << "," << estimatorName(row.estimator) << ",";
        std::snprintf(buf, sizeof buf, "%.17g", row.mu_hat);
        out << buf << "," << row.empirical_rate.str() << ",";
        std::snprintf(buf, sizeof buf, "%.17g", row.std_err);
        out << buf << "," << (row.reliable ? "true" : "false") << "\n";
    }
}

}  // namespace projlab
