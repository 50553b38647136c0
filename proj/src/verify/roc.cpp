#include "handcap/verify/roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "handcap/common/error.hpp"
#include "handcap/verify/matching.hpp"

namespace handcap::verify {

RocCurve roc(std::span<const double> genuine, std::span<const double> imposter) {
    if (genuine.empty()) throw InvalidArgument("roc needs genuine distances");
    std::vector<double> g(genuine.begin(), genuine.end()), im(imposter.begin(), imposter.end());
    for (double d : g) {
        if (std::isnan(d)) throw InvalidArgument("NaN distance");
    }
    for (double d : im) {
        if (std::isnan(d)) throw InvalidArgument("NaN distance");
    }
    std::sort(g.begin(), g.end());
    std::sort(im.begin(), im.end());
    std::vector<double> support(g);
    support.insert(support.end(), im.begin(), im.end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    support.insert(support.begin(), std::nextafter(support.front(), -std::numeric_limits<double>::infinity()));

    RocCurve curve;
    curve.far_defined = !im.empty();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double t : support) {
        const auto g_acc = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), t) - g.begin());
        const auto i_acc = static_cast<std::size_t>(std::upper_bound(im.begin(), im.end(), t) - im.begin());
        RocPoint p;
        p.threshold = t;
        p.far = curve.far_defined ? static_cast<double>(i_acc) / static_cast<double>(im.size()) : nan;
        p.frr = static_cast<double>(g.size() - g_acc) / static_cast<double>(g.size());
        p.gar = 1.0 - p.frr;
        curve.points.push_back(p);
    }
    if (!curve.far_defined) {
        curve.eer = curve.eer_threshold = nan;
        return curve;
    }
    // FAR - FRR rises from -1 (first point) to +1 or 0 (last point).
    const auto& pts = curve.points;
    std::size_t i = 1;
    while (i < pts.size() && pts[i].far - pts[i].frr < 0) ++i;
    if (i == pts.size()) {
        curve.eer = pts.back().frr;  // unreachable: the last point has frr = 0
        curve.eer_threshold = pts.back().threshold;
        return curve;
    }
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    const double da = a.far - a.frr, db = b.far - b.frr;
    const double lambda = da == db ? 1.0 : -da / (db - da);
    curve.eer = a.far + lambda * (b.far - a.far);
    curve.eer_threshold = a.threshold + lambda * (b.threshold - a.threshold);
    return curve;
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
    out << "threshold,far,frr,gar\n";
    out.precision(17);  // round-trips the threshold just below the smallest distance
    for (const auto& p : curve.points) out << p.threshold << ',' << p.far << ',' << p.frr << ',' << p.gar << '\n';
}

std::string DisjointResult::accounting() const { return std::to_string(rows) + " x " + std::to_string(columns); }

DisjointResult disjoint_protocol(const TemplateStore& store, const std::map<std::string, Samples>& genuine_probes,
                                 const std::map<std::string, Samples>& imposters) {
    for (const auto& [id, _] : imposters) {
        if (store.contains(id) || genuine_probes.count(id)) throw InvalidArgument("overlap: imposter '" + id + "'");
    }
    if (genuine_probes.empty()) throw InvalidArgument("no genuine subjects");
    for (const auto& [id, probes] : genuine_probes) {
        store.samples(id);
        if (probes.empty()) throw InvalidArgument("genuine subject '" + id + "' has no probes");
    }

    DisjointResult r;
    r.other_genuine = genuine_probes.size() - 1;
    for (const auto& [_, s] : imposters) r.imposter_vectors += s.size();
    r.columns = 1 + r.other_genuine + r.imposter_vectors;

    for (const auto& [id, probes] : genuine_probes) {
        for (const auto& probe : probes) {
            ++r.rows;
            r.genuine_distances.push_back(claim_distance(probe, id, store));
            for (const auto& [other, _] : genuine_probes) {
                if (other != id) r.imposter_distances.push_back(claim_distance(probe, other, store));
            }
            for (const auto& [_, samples] : imposters) {
                for (const auto& v : samples) r.imposter_distances.push_back(claim_distance(v, id, store));
            }
        }
    }
    r.genuine_comparisons = r.genuine_distances.size();
    r.imposter_comparisons = r.imposter_distances.size();
    r.curve = roc(r.genuine_distances, r.imposter_distances);
    return r;
}

}  // namespace handcap::verify
