#include "handcap/fingergeom/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "handcap/common/error.hpp"
#include "handcap/imaging/binary.hpp"
#include "handcap/imaging/ops.hpp"
#include "handcap/imaging/transform.hpp"

namespace handcap::fingergeom {

namespace {

constexpr double kPi = std::numbers::pi;

Raster crop_padded(const Raster& mask, int pad) {
    const auto box = imaging::mask_bounds(mask);
    if (box.empty()) return Raster(2 * pad + 1, 2 * pad + 1, 1);
    Raster out(box.width + 2 * pad, box.height + 2 * pad, 1);
    for (int y = 0; y < box.height; ++y) {
        for (int x = 0; x < box.width; ++x) out.at(x + pad, y + pad) = mask.at(box.x + x, box.y + y);
    }
    return out;
}

Raster flip_180(const Raster& mask) {
    Raster out(mask.width(), mask.height(), 1);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) out.at(mask.width() - 1 - x, mask.height() - 1 - y) = mask.at(x, y);
    }
    return out;
}

int runs_in_row(const Raster& mask, int y) {
    int runs = 0;
    bool inside = false;
    for (int x = 0; x < mask.width(); ++x) {
        const bool fg = mask.at(x, y) != 0;
        if (fg && !inside) ++runs;
        inside = fg;
    }
    return runs;
}

// The finger side of an upright hand has many rows crossed by 3+ runs.
bool fingers_at_bottom(const Raster& mask) {
    int top = 0, bottom = 0;
    const int h = mask.height();
    for (int y = 0; y < h; ++y) {
        if (runs_in_row(mask, y) < 3) continue;
        (y < h / 2 ? top : bottom) += 1;
    }
    return bottom > top;
}

// Removes rows below the wrist reference line: scanning up from the bottom,
// the first row wider than 1.2x the wrist's median width marks the palm.
int wrist_row(const Raster& mask) {
    const int h = mask.height();
    std::vector<int> widths(static_cast<std::size_t>(h), 0);
    int first = h, last = -1;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < mask.width(); ++x) widths[y] += mask.at(x, y) ? 1 : 0;
        if (widths[y] > 0) {
            first = std::min(first, y);
            last = y;
        }
    }
    if (last < 0) return -1;
    const int extent = last - first + 1;
    const int band = std::max(3, extent / 10);
    std::vector<int> bottom(widths.begin() + (last - band + 1), widths.begin() + last + 1);
    std::nth_element(bottom.begin(), bottom.begin() + bottom.size() / 2, bottom.end());
    const double w0 = bottom[bottom.size() / 2];
    const int limit = last - static_cast<int>(0.35 * extent);
    for (int y = last; y >= limit; --y) {
        if (widths[y] > 1.2 * w0) return y;
    }
    return -1;
}

}  // namespace

double upright_rotation(double theta) {
    double phi = kPi / 2 - theta;
    while (phi > kPi / 2) phi -= kPi;
    while (phi <= -kPi / 2) phi += kPi;
    return phi;
}

double MaskMoments::major_axis_angle() const { return 0.5 * std::atan2(2 * mu11, mu20 - mu02); }

double MaskMoments::major_variance() const {
    const double mid = (mu20 + mu02) / 2;
    const double d = std::sqrt(((mu20 - mu02) / 2) * ((mu20 - mu02) / 2) + mu11 * mu11);
    return mid + d + 1.0 / 12;
}

double MaskMoments::minor_variance() const {
    const double mid = (mu20 + mu02) / 2;
    const double d = std::sqrt(((mu20 - mu02) / 2) * ((mu20 - mu02) / 2) + mu11 * mu11);
    return std::max(mid - d, 0.0) + 1.0 / 12;
}

MaskMoments mask_moments(const Raster& mask) {
    MaskMoments m;
    double sx = 0, sy = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            m.area += 1;
            sx += x;
            sy += y;
        }
    }
    if (m.area == 0) return m;
    m.cx = sx / m.area;
    m.cy = sy / m.area;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            const double dx = x - m.cx, dy = y - m.cy;
            m.mu20 += dx * dx;
            m.mu02 += dy * dy;
            m.mu11 += dx * dy;
        }
    }
    m.mu20 /= m.area;
    m.mu02 /= m.area;
    m.mu11 /= m.area;
    return m;
}

Raster rotate_mask(const Raster& mask, double angle_rad) {
    // Rotate about the centroid and keep its sub-pixel phase, so a shifted
    // input yields an identically shifted output.
    const MaskMoments m = mask_moments(mask);
    const double cx = m.area > 0 ? m.cx + 0.5 : mask.width() / 2.0;
    const double cy = m.area > 0 ? m.cy + 0.5 : mask.height() / 2.0;
    const imaging::Size rb = imaging::rotated_bounds(mask.size(), angle_rad * 180.0 / kPi);
    const int margin = static_cast<int>(std::ceil(std::hypot(mask.width(), mask.height()) / 2.0)) + 2;
    Raster out(rb.width + 2 * margin, rb.height + 2 * margin, 1);
    const double ocx = std::floor(out.width() / 2.0) + (cx - std::floor(cx));
    const double ocy = std::floor(out.height() / 2.0) + (cy - std::floor(cy));
    const double ca = std::cos(angle_rad), sa = std::sin(angle_rad);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const double dx = x + 0.5 - ocx;
            const double dy = y + 0.5 - ocy;
            const double sx = dx * ca + dy * sa + cx;
            const double sy = -dx * sa + dy * ca + cy;
            const int nx = static_cast<int>(std::floor(sx));
            const int ny = static_cast<int>(std::floor(sy));
            if (nx < 0 || ny < 0 || nx >= mask.width() || ny >= mask.height()) continue;
            out.at(x, y) = mask.at(nx, ny) ? 255 : 0;
        }
    }
    return out;
}

std::vector<Point> trace_boundary(const Raster& mask) {
    // Clockwise neighbourhood (y down) starting west.
    static constexpr std::array<Point, 8> kDirs{
        {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};
    auto fg = [&](Point p) {
        return p.x >= 0 && p.y >= 0 && p.x < mask.width() && p.y < mask.height() && mask.at(p.x, p.y) != 0;
    };
    auto dir_index = [](Point d) {
        for (int i = 0; i < 8; ++i) {
            if (kDirs[i] == d) return i;
        }
        return 0;
    };

    Point start{-1, -1};
    for (int y = 0; y < mask.height() && start.x < 0; ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                start = {x, y};
                break;
            }
        }
    }
    if (start.x < 0) return {};

    std::vector<Point> chain{start};
    Point c = start;
    int back = 0;  // direction from c to its backtrack pixel
    Point second{-1, -1};
    const std::size_t guard = 4 * static_cast<std::size_t>(mask.width()) * mask.height() + 16;
    for (std::size_t iter = 0; iter < guard; ++iter) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int nd = (back + k) % 8;
            if (fg({c.x + kDirs[nd].x, c.y + kDirs[nd].y})) {
                found = nd;
                break;
            }
        }
        if (found < 0) return chain;  // isolated pixel
        const Point q{c.x + kDirs[found].x, c.y + kDirs[found].y};
        const int prev = (found + 7) % 8;
        const Point b{c.x + kDirs[prev].x, c.y + kDirs[prev].y};
        if (c == start && second.x >= 0 && q == second) break;
        if (second.x < 0) second = q;
        back = dir_index({b.x - q.x, b.y - q.y});
        c = q;
        if (c == start) continue;
        chain.push_back(c);
    }
    return chain;
}

HandContour normalize_mask(const Raster& input) {
    Raster bin(input.width(), input.height(), 1);
    for (int y = 0; y < input.height(); ++y) {
        for (int x = 0; x < input.width(); ++x) bin.at(x, y) = input.at(x, y) ? 255 : 0;
    }
    Raster m = imaging::largest_component(bin);
    const double min_area = 0.01 * static_cast<double>(input.pixel_count());
    if (static_cast<double>(imaging::count_nonzero(m)) < min_area) throw Error("no hand found");

    HandContour hc;
    const double phi = upright_rotation(mask_moments(m).major_axis_angle());
    Raster up = crop_padded(rotate_mask(m, phi), 2);
    double total = phi;
    if (fingers_at_bottom(up)) {
        up = flip_180(up);
        total += kPi;
    }

    const int cut = wrist_row(up);
    if (cut >= 0) {
        for (int y = cut + 1; y < up.height(); ++y) {
            for (int x = 0; x < up.width(); ++x) up.at(x, y) = 0;
        }
        up = imaging::largest_component(up);
    }

    // Refit without the wrist so truncated forearms do not bias the axis.
    const double phi2 = upright_rotation(mask_moments(up).major_axis_angle());
    if (std::abs(phi2) > 1e-6) {
        up = rotate_mask(up, phi2);
        total += phi2;
    }
    hc.mask = crop_padded(up, 2);
    hc.orientation_deg = total * 180.0 / kPi;

    const auto box = imaging::mask_bounds(hc.mask);
    const int yb = box.bottom() - 1;
    int xl = -1, xr = -1;
    for (int x = 0; x < hc.mask.width(); ++x) {
        if (!hc.mask.at(x, yb)) continue;
        if (xl < 0) xl = x;
        xr = x;
    }
    hc.wrist_left = {xl, yb};
    hc.wrist_right = {xr, yb};
    hc.boundary = trace_boundary(hc.mask);
    return hc;
}

HandContour normalize_hand(const Raster& img) {
    const Raster gray = imaging::to_grayscale(img);
    const auto [lo, hi] = std::minmax_element(gray.data().begin(), gray.data().end());
    if (gray.empty() || *hi - *lo < 16) throw Error("no hand found");
    Raster fg = imaging::foreground_mask(gray);
    if (imaging::count_nonzero(fg) == fg.pixel_count()) throw Error("no hand found");
    return normalize_mask(fg);
}

}  // namespace handcap::fingergeom
