#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "handcap/verify/templates.hpp"

namespace handcap::verify {

struct RocPoint {
    double threshold = 0;
    double far = 0;  // imposter distances <= threshold
    double frr = 0;  // genuine distances > threshold
    double gar = 0;  // 1 - frr
};

struct RocCurve {
    std::vector<RocPoint> points;  // ascending threshold
    double eer = 0;
    double eer_threshold = 0;
    /// False when there were no imposter distances; far and eer are then NaN.
    bool far_defined = true;
};

/// Sweeps every distinct distance as an accept threshold (accept iff
/// distance <= threshold), starting just below the smallest one. The EER is
/// linearly interpolated between the two points where FAR - FRR changes sign.
/// Throws when there are no genuine distances.
RocCurve roc(std::span<const double> genuine, std::span<const double> imposter);

/// "threshold,far,frr,gar" header and one line per point.
void write_roc_csv(const RocCurve& curve, std::ostream& out);

struct DisjointResult {
    RocCurve curve;
    std::vector<double> genuine_distances;
    std::vector<double> imposter_distances;
    std::size_t rows = 0;     // genuine probes, one row each
    std::size_t columns = 0;  // 1 own-template match + imposter matches per row
    std::size_t genuine_comparisons = 0;
    std::size_t imposter_comparisons = 0;
    std::size_t other_genuine = 0;    // enrolled subjects a probe is cross-matched with
    std::size_t imposter_vectors = 0;  // samples of the unenrolled subjects

    std::size_t total_comparisons() const { return rows * columns; }
    /// e.g. "600 x 900"
    std::string accounting() const;
};

/// Verification with subjects unknown to the system. Each genuine probe is
/// matched against its own subject (genuine) and, as a zero-effort claim,
/// against every other genuine subject; each sample of an imposter subject is
/// matched against the probe's subject. Per probe row that is
/// 1 + (G - 1) + |imposter samples| comparisons.
/// Throws "overlap" when an imposter id is enrolled or also a genuine subject,
/// and "not enrolled" for an unknown genuine subject.
DisjointResult disjoint_protocol(const TemplateStore& store, const std::map<std::string, Samples>& genuine_probes,
                                 const std::map<std::string, Samples>& imposters);

}  // namespace handcap::verify
