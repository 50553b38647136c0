#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "handcap/fingergeom/normalizer.hpp"
#include "handcap/pad/metrics.hpp"
#include "handcap/verify/matrix.hpp"

namespace handcap::pad {

struct QualityVector {
    std::string id;
    std::vector<Metric> metrics;
    std::vector<double> values;
    bool normalized = false;
    bool psnr_capped = false;

    double operator[](Metric m) const;  // throws when m is not in the subset
};

/// Evaluates each metric between the image and its Gaussian-degraded copy.
/// With a normalizer the values are min-max scaled by its frozen extrema
/// (throws "normalizer not fitted" when it has not been fit).
QualityVector quality_vector(const Raster& img, const std::vector<Metric>& metrics,
                             const fingergeom::MinMaxNormalizer* normalizer = nullptr, std::string id = {});

enum class Label { Fake = 0, Real = 1 };
std::string_view label_name(Label l);
Label parse_label(std::string_view s);  // "real" / "fake"

/// Labelled raw quality vectors. Row ids are "<subject>/<sample>" when they
/// come from a subject-structured collection, which the rotation protocol
/// relies on.
struct QualitySet {
    std::vector<Metric> metrics;
    std::vector<std::string> ids;
    std::vector<Label> labels;
    verify::Matrix values;

    std::size_t size() const { return ids.size(); }
    void add(std::string id, Label label, std::span<const double> row);
    /// Same rows restricted to a metric subset (in the given order).
    QualitySet select(const std::vector<Metric>& subset) const;
    QualitySet rows(const std::vector<std::size_t>& idx) const;
    std::vector<int> int_labels() const;

    /// CSV: "id,label,<metric>,..." then one row per image.
    void write_csv(std::ostream& out) const;
    static QualitySet read_csv(std::istream& in);
    void save_csv(const std::filesystem::path& p) const;
    static QualitySet load_csv(const std::filesystem::path& p);
};

/// Quality vectors for every PNG under <dir>/real and <dir>/fake (either may
/// be missing). Ids are the paths relative to the class directory without
/// extension.
QualitySet quality_set_from_dir(const std::filesystem::path& dir, const std::vector<Metric>& metrics);

/// Subject and sample parts of a "<subject>/<sample>" id; throws otherwise.
std::pair<std::string, std::string> split_id(const std::string& id);

}  // namespace handcap::pad
