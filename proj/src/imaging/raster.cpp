#include "handcap/imaging/raster.hpp"

#include <algorithm>
#include <cmath>

#include "handcap/common/error.hpp"

namespace handcap::imaging {

bool Rect::contains(const Rect& o) const {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
}

bool Rect::intersects(const Rect& o) const {
    return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
}

Rect Rect::inflated(int margin) const {
    return {x - margin, y - margin, width + 2 * margin, height + 2 * margin};
}

Raster::Raster(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0) throw InvalidArgument("negative raster dimensions");
    if (channels != 1 && channels != 3) throw InvalidArgument("raster channels must be 1 or 3");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Raster Raster::crop(const Rect& r) const {
    if (!Rect{0, 0, width_, height_}.contains(r)) throw InvalidArgument("crop outside raster");
    Raster out(r.width, r.height, channels_);
    const std::size_t row_bytes = static_cast<std::size_t>(r.width) * channels_;
    for (int y = 0; y < r.height; ++y) {
        const auto* src = &data_[(static_cast<std::size_t>(r.y + y) * width_ + r.x) * channels_];
        std::copy_n(src, row_bytes, &out.data_[static_cast<std::size_t>(y) * row_bytes]);
    }
    return out;
}

Raster Raster::channel(int c) const {
    if (c < 0 || c >= channels_) throw InvalidArgument("channel index out of range");
    Raster out(width_, height_, 1);
    for (std::size_t i = 0; i < pixel_count(); ++i) out.data_[i] = data_[i * channels_ + c];
    return out;
}

RealImage::RealImage(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidArgument("negative image dimensions");
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

RealImage RealImage::from_raster(const Raster& gray) {
    if (gray.channels() != 1) throw InvalidArgument("expected a single-channel raster");
    RealImage out(gray.width(), gray.height());
    auto src = gray.data();
    std::transform(src.begin(), src.end(), out.values_.begin(),
                   [](std::uint8_t v) { return static_cast<double>(v); });
    return out;
}

Raster RealImage::to_raster() const {
    Raster out(width_, height_, 1);
    auto dst = out.data();
    for (std::size_t i = 0; i < values_.size(); ++i) {
        dst[i] = static_cast<std::uint8_t>(std::clamp(std::lround(values_[i]), 0L, 255L));
    }
    return out;
}

}  // namespace handcap::imaging
