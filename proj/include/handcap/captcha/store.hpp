#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "handcap/imaging/raster.hpp"

namespace handcap::captcha {

using imaging::Raster;

enum class StoreKind { Background, Genuine, Fake };

std::string_view store_kind_name(StoreKind k);

/// Label-indexed image set. Genuine stores hold exactly two images (two
/// captures of one hand) per class label; the other kinds hold one image per
/// label.
///
/// On disk a genuine store is `<dir>/<label>/1.png, 2.png`; background and
/// fake stores are flat `<dir>/<label>.png`.
class ImageStore {
public:
    explicit ImageStore(StoreKind kind) : kind_(kind) {}

    StoreKind kind() const { return kind_; }

    /// Throws "duplicate label", or InvalidArgument when the image count does
    /// not match the store kind (2 for genuine, 1 otherwise).
    void add(const std::string& label, std::vector<Raster> images);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<Raster>& images(const std::string& label) const;
    const std::vector<Raster>& images_at(std::size_t index) const { return images(labels_.at(index)); }
    /// Hand ROI masks (genuine and fake stores), computed when the entry is added.
    const std::vector<Raster>& rois(const std::string& label) const;

    /// Throws IoError for a missing directory and Error("malformed store")
    /// when a genuine class does not have exactly 1.png and 2.png.
    static ImageStore load(const std::filesystem::path& dir, StoreKind kind);
    void save(const std::filesystem::path& dir) const;

private:
    StoreKind kind_;
    std::vector<std::string> labels_;  // insertion order, used for random selection
    std::map<std::string, std::vector<Raster>> entries_;
    std::map<std::string, std::vector<Raster>> rois_;
};

struct StoreSet {
    ImageStore backgrounds{StoreKind::Background};
    ImageStore genuine{StoreKind::Genuine};
    ImageStore fakes{StoreKind::Fake};

    /// Loads `<root>/backgrounds`, `<root>/genuine`, `<root>/fakes`.
    static StoreSet load(const std::filesystem::path& root);
    void save(const std::filesystem::path& root) const;
};

/// Synthetic stand-in stores: gradient backgrounds, two-capture genuine
/// hand classes and stylized fake hands.
StoreSet synthetic_stores(std::size_t backgrounds, std::size_t genuine_classes, std::size_t fakes,
                          std::uint64_t seed);

}  // namespace handcap::captcha
