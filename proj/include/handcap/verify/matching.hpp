#pragma once

#include <span>
#include <string>

#include "handcap/verify/templates.hpp"

namespace handcap::verify {

/// sum_i |a_i - b_i| / sigma_i over features with sigma_i > 0.
double weighted_l1(std::span<const double> a, std::span<const double> b, std::span<const double> sigma);

/// Smallest weighted_l1 between the probe and the subject's enrolled samples.
/// Throws "not enrolled" for an unknown subject.
double claim_distance(std::span<const double> probe, const std::string& subject, const TemplateStore& store);

struct ClaimResult {
    bool genuine = false;
    double distance = 0;
};

/// Genuine iff claim_distance <= threshold.
ClaimResult verify_claim(std::span<const double> probe, const std::string& claimed, const TemplateStore& store,
                         double threshold);

}  // namespace handcap::verify
