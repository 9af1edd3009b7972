#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "projlab/distributions.hpp"
#include "projlab/extended_real.hpp"
#include "projlab/ratefn.hpp"
#include "projlab/stiefel.hpp"

namespace projlab {

// A Borel event in the projected space: a half-space {<x,u> >= a} or the
// complement of a centered ball {||x|| >= r}.
struct EventRegion {
    enum class Kind { half_space, ball_complement };

    Kind kind = Kind::half_space;
    std::vector<double> direction;  // unit, half_space only
    double threshold = 0.0;         // half_space
    double radius = 0.0;            // ball_complement
    std::size_t dim = 0;

    static EventRegion halfSpace(std::vector<double> direction, double threshold);
    static EventRegion ballComplement(std::size_t dim, double radius);

    bool contains(std::span<const double> point) const;
    std::string descriptor() const;
};

// inf over the region of the radial rate function: Psi*(a) for half-spaces
// with a >= 0 (zero otherwise, since the region then contains the origin),
// Psi*(r) for ball complements.
ExtendedReal theoreticalRate(const RateFunction& rate, const EventRegion& region);

struct MeasureEstimate {
    double mu_hat = 0.0;
    double std_err = 0.0;
    std::int64_t hits = 0;
    std::int64_t samples = 0;
};

enum class ProjectionMode { uniform, gaussian };

// Hit fraction of the projected product measure on the region: draws
// x ~ nu^n, projects through the frame ((1/sqrt n) I* x or (1/n) G x) and
// counts hits over fixed sample chunks with per-chunk substreams, so the
// result does not depend on the thread schedule.
MeasureEstimate estimateMeasureMC(const NuDistribution& nu, const StiefelFrame& frame,
                                  const EventRegion& region, std::int64_t samples,
                                  const RngStream& stream, ProjectionMode mode);

// Exact measure of the region under the uniform projection by enumerating
// all k^n coordinate assignments of a discrete law (rademacher counts as its
// two-atom law). Budget k^n <= 2^24.
double enumerateExact(const NuDistribution& nu, const StiefelFrame& frame,
                      const EventRegion& region);

// The half-space whose gaussian-mode hit indicator matches the uniform-mode
// indicator of `region` sample for sample (direction M^T u renormalized,
// threshold rescaled, M = scale_to_identity).
EventRegion transitionRegion(const StiefelFrame& frame, const EventRegion& region);

enum class Estimator { mc_uniform, mc_gaussian, exact_enum };

std::string estimatorName(Estimator e);

struct LdpRow {
    std::size_t n = 0;
    Estimator estimator = Estimator::mc_uniform;
    double mu_hat = 0.0;
    ExtendedReal empirical_rate;     // -(1/n) log mu_hat; +inf when mu_hat = 0
    std::int64_t sample_count = 0;   // samples or enumerated states
    double std_err = 0.0;            // 0 for exact enumeration
    std::uint64_t frame_seed = 0;    // stream id of the frame
    bool reliable = true;            // >= 50 hits (always true for exact)
};

struct LdpReport {
    std::string nu_descriptor;
    std::size_t d = 0;
    EventRegion region;
    ExtendedReal theoretical_rate;
    std::vector<LdpRow> rows;
};

// One frame per n (fresh substream), one row per requested estimator.
LdpReport rateConvergenceScan(const NuDistribution& nu, std::size_t d, const EventRegion& region,
                              std::span<const std::size_t> n_values, std::int64_t samples,
                              std::span<const Estimator> estimators, std::uint64_t master_seed);

void writeLdpReportJson(std::ostream& out, const LdpReport& report,
                        const std::string& config_json_text);
void writeLdpReportCsv(std::ostream& out, const LdpReport& report,
                       std::span<const std::string> metadata_lines);

}  // namespace projlab
