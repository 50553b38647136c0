#include "handcap/gateway/stage2.hpp"

#include "handcap/common/error.hpp"
#include "handcap/fingergeom/features.hpp"
#include "handcap/verify/matching.hpp"
#include "handcap/verify/roc.hpp"

namespace handcap::gateway {

std::string_view biometric_reason(BiometricResult r) {
    switch (r) {
        case BiometricResult::Verified: return "";
        case BiometricResult::Spoof: return "spoof";
        case BiometricResult::Imposter: return "imposter";
        case BiometricResult::UnknownSubject: return "unknown subject";
        case BiometricResult::Unprocessable: return "unprocessable image";
    }
    return "?";
}

Stage2::Stage2(pad::PadModel pad, fingergeom::MinMaxNormalizer extrema, verify::TemplateStore store, double threshold)
    : pad_(std::move(pad)), extrema_(std::move(extrema)), store_(std::move(store)), threshold_(threshold) {
    if (!store_.has_sigma()) store_.fit_sigma();
    if (!(threshold_ >= 0)) throw InvalidArgument("threshold must be non-negative");
}

BiometricOutcome Stage2::check(const imaging::Raster& scan, const std::string& claimed) const {
    BiometricOutcome out;
    if (scan.empty()) return out;
    try {
        if (pad_.classify(scan) == pad::Label::Fake) {
            out.result = BiometricResult::Spoof;
            return out;
        }
    } catch (const Error&) {
        return out;
    }
    out.pad_passed = true;
    if (!store_.contains(claimed)) {
        out.result = BiometricResult::UnknownSubject;
        return out;
    }
    std::vector<double> features;
    try {
        features = extrema_.apply(fingergeom::hand_vector(scan));
    } catch (const Error&) {
        out.result = BiometricResult::Unprocessable;
        return out;
    }
    const auto claim = verify::verify_claim(store_.project(features), claimed, store_, threshold_);
    out.distance = claim.distance;
    out.result = claim.genuine ? BiometricResult::Verified : BiometricResult::Imposter;
    return out;
}

verify::TemplateStore enroll_templates(const fingergeom::TemplateFile& file, const std::vector<std::size_t>& columns,
                                       const std::string& subset_version) {
    verify::TemplateStore store(columns, subset_version);
    for (const auto& s : file.subjects) {
        verify::Samples projected;
        for (const auto& v : s.samples) projected.push_back(store.project(v));
        store.enroll(s.subject_id, std::move(projected));
    }
    store.fit_sigma();
    return store;
}

double calibrate_threshold(const verify::TemplateStore& store) {
    std::vector<double> genuine, imposter;
    for (const auto& subject : store.subjects()) {
        const auto& own = store.samples(subject);
        if (own.size() < 2) throw InvalidArgument("calibration needs 2 samples per subject: '" + subject + "'");
        for (std::size_t i = 0; i < own.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < own.size(); ++j) {
                if (j != i) best = std::min(best, verify::weighted_l1(own[i], own[j], store.sigma()));
            }
            genuine.push_back(best);
            for (const auto& other : store.subjects()) {
                if (other != subject) imposter.push_back(verify::claim_distance(own[i], other, store));
            }
        }
    }
    const auto curve = verify::roc(genuine, imposter);
    if (!curve.far_defined) throw InvalidArgument("calibration needs at least 2 subjects");
    return curve.eer_threshold;
}

}  // namespace handcap::gateway
