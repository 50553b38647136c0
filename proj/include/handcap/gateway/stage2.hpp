#pragma once

#include <string>
#include <string_view>

#include "handcap/fingergeom/normalizer.hpp"
#include "handcap/fingergeom/templates.hpp"
#include "handcap/imaging/raster.hpp"
#include "handcap/pad/evaluate.hpp"
#include "handcap/verify/templates.hpp"

namespace handcap::gateway {

enum class BiometricResult { Verified, Spoof, Imposter, UnknownSubject, Unprocessable };

/// "" for Verified, otherwise the rejection reason reported to clients.
std::string_view biometric_reason(BiometricResult r);

struct BiometricOutcome {
    BiometricResult result = BiometricResult::Unprocessable;
    bool pad_passed = false;
    double distance = 0;  // claim distance when matching ran
};

/// Stage-2 check as the session manager sees it.
class BiometricChecker {
public:
    virtual ~BiometricChecker() = default;
    virtual BiometricOutcome check(const imaging::Raster& scan, const std::string& claimed) const = 0;
};

/// PAD on the scan first, then feature extraction, normalization with the
/// enrollment extrema, projection onto the store's subset and threshold matching.
class Stage2 : public BiometricChecker {
public:
    Stage2(pad::PadModel pad, fingergeom::MinMaxNormalizer extrema, verify::TemplateStore store, double threshold);

    BiometricOutcome check(const imaging::Raster& scan, const std::string& claimed) const override;

    double threshold() const { return threshold_; }
    const verify::TemplateStore& store() const { return store_; }

private:
    pad::PadModel pad_;
    fingergeom::MinMaxNormalizer extrema_;
    verify::TemplateStore store_;
    double threshold_;
};

/// Enrolls every subject of a template file on the given columns and fits sigma.
verify::TemplateStore enroll_templates(const fingergeom::TemplateFile& file, const std::vector<std::size_t>& columns,
                                       const std::string& subset_version);

/// Equal-error threshold of leave-one-out claims on the store: each enrolled
/// sample is claimed as its own subject (against the subject's other samples)
/// and as every other subject. Subjects need at least 2 samples.
double calibrate_threshold(const verify::TemplateStore& store);

}  // namespace handcap::gateway
