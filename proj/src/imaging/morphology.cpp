#include "handcap/imaging/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>

#include "handcap/common/error.hpp"

namespace handcap::imaging {

std::vector<int> disk_half_widths(int radius) {
    if (radius < 0) throw InvalidArgument("disk radius must be non-negative");
    std::vector<int> hw(2 * radius + 1);
    for (int dy = -radius; dy <= radius; ++dy) {
        int w = 0;
        while ((w + 1) * (w + 1) + dy * dy <= radius * radius) ++w;
        hw[dy + radius] = w;
    }
    return hw;
}

namespace {

// Disk filter on one plane. Row minima (or maxima) for every half-width level
// are built incrementally on a padded row, then combined across the disk rows.
template <class Op>
void disk_filter_plane(const std::uint8_t* src, std::uint8_t* dst, int w, int h, int radius,
                       std::uint8_t neutral, Op op) {
    const auto hw = disk_half_widths(radius);
    const int levels = radius + 1;
    const int pw = w + 2 * radius;
    std::vector<std::uint8_t> padded(static_cast<std::size_t>(pw), neutral);
    std::vector<std::uint8_t> rows(static_cast<std::size_t>(levels) * w * h);
    auto level_row = [&](int k, int y) { return &rows[(static_cast<std::size_t>(k) * h + y) * w]; };

    for (int y = 0; y < h; ++y) {
        std::copy_n(src + static_cast<std::size_t>(y) * w, w, padded.begin() + radius);
        std::uint8_t* l0 = level_row(0, y);
        std::copy_n(src + static_cast<std::size_t>(y) * w, w, l0);
        for (int k = 1; k < levels; ++k) {
            const std::uint8_t* prev = level_row(k - 1, y);
            std::uint8_t* cur = level_row(k, y);
            const std::uint8_t* left = padded.data() + radius - k;
            const std::uint8_t* right = padded.data() + radius + k;
            for (int x = 0; x < w; ++x) cur[x] = op(prev[x], op(left[x], right[x]));
        }
    }

    for (int y = 0; y < h; ++y) {
        std::uint8_t* out = dst + static_cast<std::size_t>(y) * w;
        std::fill_n(out, w, neutral);
        for (int dy = -radius; dy <= radius; ++dy) {
            const int yy = y + dy;
            if (yy < 0 || yy >= h) continue;
            const std::uint8_t* row = level_row(hw[dy + radius], yy);
            for (int x = 0; x < w; ++x) out[x] = op(out[x], row[x]);
        }
    }
}

template <class Op>
Raster disk_filter(const Raster& img, int radius, std::uint8_t neutral, Op op) {
    if (radius < 0) throw InvalidArgument("disk radius must be non-negative");
    if (img.empty() || radius == 0) return img;
    const int w = img.width();
    const int h = img.height();
    const int ch = img.channels();
    if (ch == 1) {
        Raster out(w, h, 1);
        disk_filter_plane(img.data().data(), out.data().data(), w, h, radius, neutral, op);
        return out;
    }
    Raster out(w, h, ch);
    std::vector<std::uint8_t> plane(img.pixel_count()), filtered(img.pixel_count());
    for (int c = 0; c < ch; ++c) {
        auto src = img.data();
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = src[i * ch + c];
        disk_filter_plane(plane.data(), filtered.data(), w, h, radius, neutral, op);
        auto dst = out.data();
        for (std::size_t i = 0; i < plane.size(); ++i) dst[i * ch + c] = filtered[i];
    }
    return out;
}

struct MinOp {
    std::uint8_t operator()(std::uint8_t a, std::uint8_t b) const { return a < b ? a : b; }
};
struct MaxOp {
    std::uint8_t operator()(std::uint8_t a, std::uint8_t b) const { return a > b ? a : b; }
};

}  // namespace

Raster erode(const Raster& img, int radius) { return disk_filter(img, radius, 255, MinOp{}); }

Raster dilate(const Raster& img, int radius) { return disk_filter(img, radius, 0, MaxOp{}); }

Raster open_with_disk(const Raster& img, int radius) { return dilate(erode(img, radius), radius); }

Raster morphological_open(const Raster& img, int radius) {
    if (radius < 5 || radius > 10) throw InvalidArgument("opening radius must lie in [5, 10]");
    return open_with_disk(img, radius);
}

}  // namespace handcap::imaging
