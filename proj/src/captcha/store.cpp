#include "handcap/captcha/store.hpp"

#include <algorithm>
#include <cstdio>

#include "handcap/captcha/layout.hpp"
#include "handcap/common/error.hpp"
#include "handcap/imaging/png_io.hpp"
#include "handcap/synth/scenes.hpp"

namespace fs = std::filesystem;

namespace handcap::captcha {

std::string_view store_kind_name(StoreKind k) {
    switch (k) {
        case StoreKind::Background: return "background";
        case StoreKind::Genuine: return "genuine";
        case StoreKind::Fake: return "fake";
    }
    return "?";
}

void ImageStore::add(const std::string& label, std::vector<Raster> images) {
    if (label.empty() || label.find('/') != std::string::npos) throw InvalidArgument("invalid label '" + label + "'");
    if (entries_.count(label)) throw InvalidArgument("duplicate label '" + label + "'");
    const std::size_t want = kind_ == StoreKind::Genuine ? 2 : 1;
    if (images.size() != want) {
        throw InvalidArgument(std::string(store_kind_name(kind_)) + " entries need " + std::to_string(want) +
                              " image(s), got " + std::to_string(images.size()));
    }
    for (const auto& img : images) {
        if (img.empty()) throw InvalidArgument("empty image for label '" + label + "'");
    }
    if (kind_ != StoreKind::Background) {
        std::vector<Raster> masks;
        for (const auto& img : images) masks.push_back(hand_roi(img));
        rois_.emplace(label, std::move(masks));
    }
    labels_.push_back(label);
    entries_.emplace(label, std::move(images));
}

const std::vector<Raster>& ImageStore::images(const std::string& label) const {
    const auto it = entries_.find(label);
    if (it == entries_.end()) throw InvalidArgument("unknown label '" + label + "'");
    return it->second;
}

const std::vector<Raster>& ImageStore::rois(const std::string& label) const {
    const auto it = rois_.find(label);
    if (it == rois_.end()) throw InvalidArgument("no ROI for label '" + label + "'");
    return it->second;
}

ImageStore ImageStore::load(const fs::path& dir, StoreKind kind) {
    if (!fs::is_directory(dir)) throw IoError("store directory not found: " + dir.string());
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(dir)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());

    ImageStore store(kind);
    for (const auto& p : entries) {
        if (kind == StoreKind::Genuine) {
            if (!fs::is_directory(p)) continue;
            const fs::path a = p / "1.png", b = p / "2.png";
            if (!fs::exists(a) || !fs::exists(b)) {
                throw Error("malformed store: class '" + p.filename().string() + "' needs 1.png and 2.png");
            }
            std::size_t pngs = 0;
            for (const auto& f : fs::directory_iterator(p)) pngs += f.path().extension() == ".png";
            if (pngs != 2) {
                throw Error("malformed store: class '" + p.filename().string() + "' has " + std::to_string(pngs) +
                            " images");
            }
            store.add(p.filename().string(), {imaging::read_png(a), imaging::read_png(b)});
        } else {
            if (!fs::is_regular_file(p) || p.extension() != ".png") continue;
            store.add(p.stem().string(), {imaging::read_png(p)});
        }
    }
    return store;
}

void ImageStore::save(const fs::path& dir) const {
    fs::create_directories(dir);
    for (const auto& label : labels_) {
        const auto& imgs = entries_.at(label);
        if (kind_ == StoreKind::Genuine) {
            fs::create_directories(dir / label);
            imaging::write_png(dir / label / "1.png", imgs[0]);
            imaging::write_png(dir / label / "2.png", imgs[1]);
        } else {
            imaging::write_png(dir / (label + ".png"), imgs[0]);
        }
    }
}

StoreSet StoreSet::load(const fs::path& root) {
    StoreSet s;
    s.backgrounds = ImageStore::load(root / "backgrounds", StoreKind::Background);
    s.genuine = ImageStore::load(root / "genuine", StoreKind::Genuine);
    s.fakes = ImageStore::load(root / "fakes", StoreKind::Fake);
    return s;
}

void StoreSet::save(const fs::path& root) const {
    backgrounds.save(root / "backgrounds");
    genuine.save(root / "genuine");
    fakes.save(root / "fakes");
}

StoreSet synthetic_stores(std::size_t backgrounds, std::size_t genuine_classes, std::size_t fakes,
                          std::uint64_t seed) {
    auto scenes = synth::make_scene_set(backgrounds, genuine_classes, fakes, seed);
    StoreSet s;
    char label[32];
    for (std::size_t i = 0; i < scenes.backgrounds.size(); ++i) {
        std::snprintf(label, sizeof label, "bg%04zu", i);
        s.backgrounds.add(label, {std::move(scenes.backgrounds[i])});
    }
    for (std::size_t i = 0; i < scenes.genuine.size(); ++i) {
        std::snprintf(label, sizeof label, "subject%04zu", i);
        s.genuine.add(label, {std::move(scenes.genuine[i].first), std::move(scenes.genuine[i].second)});
    }
    for (std::size_t i = 0; i < scenes.fakes.size(); ++i) {
        std::snprintf(label, sizeof label, "fake%04zu", i);
        s.fakes.add(label, {std::move(scenes.fakes[i])});
    }
    return s;
}

}  // namespace handcap::captcha
