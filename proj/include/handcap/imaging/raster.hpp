#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace handcap::imaging {

struct Size {
    int width = 0;
    int height = 0;
    friend bool operator==(const Size&, const Size&) = default;
};

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

// Half-open pixel rectangle [x, x + width) x [y, y + height).
struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    int right() const { return x + width; }
    int bottom() const { return y + height; }
    bool empty() const { return width <= 0 || height <= 0; }
    bool contains(const Rect& other) const;
    bool intersects(const Rect& other) const;
    Rect inflated(int margin) const;
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// 8-bit raster, row-major with interleaved channels (1 = gray, 3 = RGB).
/// data().size() == width * height * channels always holds.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, int channels, std::uint8_t fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    Size size() const { return {width_, height_}; }
    bool empty() const { return data_.empty(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    std::uint8_t& at(int x, int y, int c = 0) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<std::uint8_t> data() { return data_; }
    std::span<const std::uint8_t> data() const { return data_; }

    bool same_shape(const Raster& other) const {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    /// Copy of the region r (must lie inside the raster).
    Raster crop(const Rect& r) const;

    /// Single channel c as a gray raster.
    Raster channel(int c) const;

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Real-valued single-channel image on the 0..255 scale. Metrics work on this
/// so that blurred references keep full precision.
class RealImage {
public:
    RealImage() = default;
    RealImage(int width, int height, double fill = 0.0);

    static RealImage from_raster(const Raster& gray);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return values_.size(); }

    double& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool same_shape(const RealImage& o) const { return width_ == o.width_ && height_ == o.height_; }

    /// Rounded and clamped to 8 bits.
    Raster to_raster() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

}  // namespace handcap::imaging
