#pragma once

#include <span>
#include <string>
#include <vector>

namespace handcap::fingergeom {

/// Per-feature min-max scaling, (f - min) / (max - min), with extrema frozen
/// at fit time. Test values outside the training range are not clamped
/// unless `clamp` is set.
class MinMaxNormalizer {
public:
    void fit(const std::vector<std::vector<double>>& rows);
    bool fitted() const { return !min_.empty(); }

    /// Throws when not fitted or on a length mismatch. Features that were
    /// constant during fitting map to 0.
    std::vector<double> apply(std::span<const double> v) const;

    const std::vector<double>& mins() const { return min_; }
    const std::vector<double>& maxs() const { return max_; }
    /// Indices that were constant in training (each also logged in warnings()).
    const std::vector<std::size_t>& constant_features() const { return constant_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Short stable digest of the extrema, stored alongside templates.
    std::string version() const;

    std::string to_json() const;
    static MinMaxNormalizer from_json(const std::string& text);

    bool clamp = false;

private:
    std::vector<double> min_;
    std::vector<double> max_;
    std::vector<std::size_t> constant_;
    std::vector<std::string> warnings_;
};

}  // namespace handcap::fingergeom
