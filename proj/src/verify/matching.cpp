#include "handcap/verify/matching.hpp"

#include <cmath>
#include <limits>

#include "handcap/common/error.hpp"

namespace handcap::verify {

double weighted_l1(std::span<const double> a, std::span<const double> b, std::span<const double> sigma) {
    if (a.size() != b.size() || a.size() != sigma.size()) throw InvalidArgument("dimension mismatch");
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (sigma[i] > 0) d += std::abs(a[i] - b[i]) / sigma[i];
    }
    return d;
}

double claim_distance(std::span<const double> probe, const std::string& subject, const TemplateStore& store) {
    const auto& enrolled = store.samples(subject);
    if (!store.has_sigma()) throw InvalidArgument("store has no sigma; fit or set it before matching");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : enrolled) best = std::min(best, weighted_l1(probe, v, store.sigma()));
    return best;
}

ClaimResult verify_claim(std::span<const double> probe, const std::string& claimed, const TemplateStore& store,
                         double threshold) {
    const double d = claim_distance(probe, claimed, store);
    return {d <= threshold, d};
}

}  // namespace handcap::verify
