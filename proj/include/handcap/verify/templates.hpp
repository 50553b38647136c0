#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace handcap::verify {

using Samples = std::vector<std::vector<double>>;

/// Enrolled feature vectors per subject, all restricted to one feature subset,
/// plus the per-feature spread used by the weighted L1 matcher.
class TemplateStore {
public:
    TemplateStore() = default;
    /// `features` are indices into the full hand vector; their count fixes
    /// the template dimension. `subset_version` tags the subset they came from.
    TemplateStore(std::vector<std::size_t> features, std::string subset_version);

    std::size_t dimension() const { return features_.size(); }
    const std::vector<std::size_t>& features() const { return features_; }
    const std::string& subset_version() const { return subset_version_; }

    /// Appends restricted vectors for a subject (new or existing).
    void enroll(const std::string& subject, const Samples& vectors);
    /// Picks the subset's entries out of a full-length vector.
    std::vector<double> project(std::span<const double> full) const;

    bool contains(const std::string& subject) const { return subjects_.count(subject) != 0; }
    const Samples& samples(const std::string& subject) const;  // throws "not enrolled"
    std::vector<std::string> subjects() const;
    std::size_t subject_count() const { return subjects_.size(); }
    std::size_t sample_count() const;
    bool empty() const { return subjects_.empty(); }

    /// Sample standard deviation of every feature over all enrolled vectors.
    /// Features with zero spread get sigma 0 and are left out of matching
    /// (recorded in warnings()).
    void fit_sigma();
    /// Throws on a length mismatch or a negative / non-finite entry.
    void set_sigma(std::vector<double> sigma);
    const std::vector<double>& sigma() const { return sigma_; }
    bool has_sigma() const { return !sigma_.empty(); }
    const std::vector<std::string>& warnings() const { return warnings_; }

    nlohmann::json to_json() const;
    static TemplateStore from_json(const nlohmann::json& j);

private:
    std::vector<std::size_t> features_;
    std::string subset_version_;
    std::map<std::string, Samples> subjects_;
    std::vector<double> sigma_;
    std::vector<std::string> warnings_;
};

/// One subject's enrolment and held-out probe for a rotation fold.
struct FoldSplit {
    std::map<std::string, Samples> enrolled;
    std::map<std::string, std::vector<double>> probes;
};

/// 3-fold rotation over subjects with exactly 3 samples: fold f holds out
/// sample f and enrolls the other two.
FoldSplit rotation_split(const std::map<std::string, Samples>& samples, int fold);

}  // namespace handcap::verify
