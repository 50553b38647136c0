#include "handcap/imaging/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "handcap/common/error.hpp"

namespace handcap::imaging {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::uint8_t round_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Bilinear sample with border clamping; (fx, fy) in pixel-index coordinates.
double sample_clamped(const Raster& img, double fx, double fy, int c) {
    const int w = img.width();
    const int h = img.height();
    fx = std::clamp(fx, 0.0, static_cast<double>(w - 1));
    fy = std::clamp(fy, 0.0, static_cast<double>(h - 1));
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double ax = fx - x0;
    const double ay = fy - y0;
    const double top = (1 - ax) * img.at(x0, y0, c) + ax * img.at(x1, y0, c);
    const double bot = (1 - ax) * img.at(x0, y1, c) + ax * img.at(x1, y1, c);
    return (1 - ay) * top + ay * bot;
}

// Bilinear sample treating everything outside the image as zero.
double sample_zero(const Raster& img, double fx, double fy) {
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double ax = fx - x0;
    const double ay = fy - y0;
    auto px = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return 0.0;
        return img.at(x, y);
    };
    const double top = (1 - ax) * px(x0, y0) + ax * px(x0 + 1, y0);
    const double bot = (1 - ax) * px(x0, y0 + 1) + ax * px(x0 + 1, y0 + 1);
    return (1 - ay) * top + ay * bot;
}

Raster full_mask(Size s) { return Raster(s.width, s.height, 1, 255); }

}  // namespace

Size rotated_bounds(Size s, double angle_deg) {
    const double a = angle_deg * kDegToRad;
    const double c = std::abs(std::cos(a));
    const double sn = std::abs(std::sin(a));
    // The epsilon absorbs cos(90 deg) != 0 style rounding.
    const int w = static_cast<int>(std::ceil(s.width * c + s.height * sn - 1e-9));
    const int h = static_cast<int>(std::ceil(s.width * sn + s.height * c - 1e-9));
    return {std::max(w, 1), std::max(h, 1)};
}

Raster resize(const Raster& img, Size to, Resample mode) {
    if (to.width <= 0 || to.height <= 0) throw InvalidArgument("resize to an empty size");
    if (img.empty()) throw InvalidArgument("resize of an empty image");
    if (to == img.size()) return img;
    Raster out(to.width, to.height, img.channels());
    const double sx = static_cast<double>(img.width()) / to.width;
    const double sy = static_cast<double>(img.height()) / to.height;
    for (int y = 0; y < to.height; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < to.width; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            for (int c = 0; c < img.channels(); ++c) {
                if (mode == Resample::Nearest) {
                    const int nx = std::clamp(static_cast<int>(std::lround(fx)), 0, img.width() - 1);
                    const int ny = std::clamp(static_cast<int>(std::lround(fy)), 0, img.height() - 1);
                    out.at(x, y, c) = img.at(nx, ny, c);
                } else {
                    out.at(x, y, c) = round_u8(sample_clamped(img, fx, fy, c));
                }
            }
        }
    }
    return out;
}

Sprite rotate(const Sprite& s, double angle_deg, Resample mode) {
    const Size in = s.image.size();
    const Size out_size = rotated_bounds(in, angle_deg);
    const double a = angle_deg * kDegToRad;
    const double ca = std::cos(a);
    const double sa = std::sin(a);
    const double icx = in.width / 2.0;
    const double icy = in.height / 2.0;
    const double ocx = out_size.width / 2.0;
    const double ocy = out_size.height / 2.0;
    Sprite out{Raster(out_size.width, out_size.height, s.image.channels()),
               Raster(out_size.width, out_size.height, 1)};
    for (int y = 0; y < out_size.height; ++y) {
        for (int x = 0; x < out_size.width; ++x) {
            const double dx = x + 0.5 - ocx;
            const double dy = y + 0.5 - ocy;
            // Inverse of the on-screen counter-clockwise rotation.
            const double sx = dx * ca - dy * sa + icx - 0.5;
            const double sy = dx * sa + dy * ca + icy - 0.5;
            double m;
            if (mode == Resample::Nearest) {
                const int nx = static_cast<int>(std::lround(sx));
                const int ny = static_cast<int>(std::lround(sy));
                m = (nx >= 0 && ny >= 0 && nx < in.width && ny < in.height) ? s.mask.at(nx, ny) : 0.0;
            } else {
                m = sample_zero(s.mask, sx, sy);
            }
            if (m < 127.5) continue;
            out.mask.at(x, y) = 255;
            for (int c = 0; c < s.image.channels(); ++c) {
                if (mode == Resample::Nearest) {
                    const int nx = std::clamp(static_cast<int>(std::lround(sx)), 0, in.width - 1);
                    const int ny = std::clamp(static_cast<int>(std::lround(sy)), 0, in.height - 1);
                    out.image.at(x, y, c) = s.image.at(nx, ny, c);
                } else {
                    out.image.at(x, y, c) = round_u8(sample_clamped(s.image, sx, sy, c));
                }
            }
        }
    }
    return out;
}

Sprite transform_sprite(const Sprite& s, Size scale_to, double angle_deg, Resample mode) {
    if (s.image.empty()) throw InvalidArgument("transform of an empty sprite");
    if (!(s.mask.size() == s.image.size()) || s.mask.channels() != 1) {
        throw InvalidArgument("sprite mask must match the image size");
    }
    Sprite scaled{resize(s.image, scale_to, mode), resize(s.mask, scale_to, Resample::Nearest)};
    if (angle_deg == 0.0) return scaled;
    return rotate(scaled, angle_deg, mode);
}

Rect mask_bounds(const Raster& mask) {
    int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y) == 0) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Sprite trim_to_mask(const Sprite& s, Point* origin) {
    const Rect r = mask_bounds(s.mask);
    if (r.empty()) throw InvalidArgument("sprite has an empty region of interest");
    if (origin) *origin = {r.x, r.y};
    return {s.image.crop(r), s.mask.crop(r)};
}

Raster overlay(const Raster& canvas, const Sprite& sprite, Point offset) {
    const Rect box{offset.x, offset.y, sprite.image.width(), sprite.image.height()};
    if (!Rect{0, 0, canvas.width(), canvas.height()}.contains(box)) {
        throw InvalidArgument("placement overflow");
    }
    const int cc = canvas.channels();
    const int sc = sprite.image.channels();
    Raster out = canvas;
    for (int y = 0; y < box.height; ++y) {
        for (int x = 0; x < box.width; ++x) {
            if (sprite.mask.at(x, y) == 0) continue;
            for (int c = 0; c < cc; ++c) {
                out.at(offset.x + x, offset.y + y, c) = sprite.image.at(x, y, sc == 1 ? 0 : c);
            }
        }
    }
    return out;
}

Raster composite_transform(const Raster& img, const std::optional<Raster>& roi, Size scale_to,
                           double angle_deg, Point offset, const Raster& canvas, Resample mode) {
    Sprite s{img, roi ? *roi : full_mask(img.size())};
    return overlay(canvas, transform_sprite(s, scale_to, angle_deg, mode), offset);
}

}  // namespace handcap::imaging
