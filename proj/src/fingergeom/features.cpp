#include "handcap/fingergeom/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "handcap/common/error.hpp"
#include "handcap/imaging/transform.hpp"

namespace handcap::fingergeom {

namespace {

Raster crop_to_mask(const Raster& mask, int pad) {
    const auto box = imaging::mask_bounds(mask);
    Raster out(box.width + 2 * pad, box.height + 2 * pad, 1);
    for (int y = 0; y < box.height; ++y) {
        for (int x = 0; x < box.width; ++x) out.at(x + pad, y + pad) = mask.at(box.x + x, box.y + y) ? 255 : 0;
    }
    return out;
}

long long cross(Point o, Point a, Point b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) - static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

}  // namespace

double chain_length(const std::vector<Point>& chain) {
    if (chain.size() < 2) return 0.0;
    double len = 0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Point a = chain[i];
        const Point b = chain[(i + 1) % chain.size()];
        len += (a.x != b.x && a.y != b.y) ? std::numbers::sqrt2 : 1.0;
    }
    return len;
}

std::vector<StationPoint> arc_length_stations(const std::vector<Point>& chain, int n) {
    std::vector<StationPoint> out;
    if (chain.empty() || n <= 0) return out;
    std::vector<double> cum(chain.size() + 1, 0.0);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Point a = chain[i];
        const Point b = chain[(i + 1) % chain.size()];
        cum[i + 1] = cum[i] + ((a.x != b.x && a.y != b.y) ? std::numbers::sqrt2 : (a == b ? 0.0 : 1.0));
    }
    const double total = cum.back();
    for (int s = 0; s < n; ++s) {
        const double target = (s + 0.5) / n * total;
        StationPoint p{static_cast<double>(chain.front().x), static_cast<double>(chain.front().y), target};
        if (total > 0) {
            const auto it = std::upper_bound(cum.begin(), cum.end(), target);
            const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum.begin() - 1, 0));
            const Point a = chain[i % chain.size()];
            const Point b = chain[(i + 1) % chain.size()];
            const double seg = cum[i + 1] - cum[i];
            const double t = seg > 0 ? (target - cum[i]) / seg : 0.0;
            p.x = a.x + t * (b.x - a.x);
            p.y = a.y + t * (b.y - a.y);
        }
        out.push_back(p);
    }
    return out;
}

double convex_hull_pixels(const Raster& mask) {
    // Row extremes are enough to span the hull.
    std::vector<Point> pts;
    for (int y = 0; y < mask.height(); ++y) {
        int lo = -1, hi = -1;
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            if (lo < 0) lo = x;
            hi = x;
        }
        if (lo < 0) continue;
        pts.push_back({lo, y});
        if (hi != lo) pts.push_back({hi, y});
    }
    if (pts.empty()) return 0;
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() == 1) return 1;

    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);

    // Pick's theorem: interior + boundary = area + boundary / 2 + 1.
    long long twice_area = 0;
    long long boundary = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point a = hull[i];
        const Point b = hull[(i + 1) % hull.size()];
        twice_area += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
        boundary += std::gcd(std::abs(b.x - a.x), std::abs(b.y - a.y));
    }
    return std::abs(twice_area) / 2.0 + boundary / 2.0 + 1.0;
}

FingerFeatures finger_features(const Raster& full_mask) {
    const Raster mask = crop_to_mask(full_mask, 1);
    const MaskMoments m = mask_moments(mask);
    if (m.area < 20) throw InvalidArgument("degenerate finger mask");

    FingerFeatures f{};
    f[kArea] = m.area;
    const auto boundary = trace_boundary(mask);
    f[kPerimeter] = chain_length(boundary);
    f[kMajorAxis] = 4.0 * std::sqrt(m.major_variance());
    f[kMinorAxis] = 4.0 * std::sqrt(m.minor_variance());
    f[kEquivDiameter] = std::sqrt(4.0 * m.area / std::numbers::pi);
    f[kSolidity] = std::min(1.0, m.area / convex_hull_pixels(mask));

    // Centroid distance at arc-length fractions 0.05, 0.15, ..., 0.95 from the top-most boundary pixel.
    const auto stations = arc_length_stations(boundary, 10);
    for (int s = 0; s < 10; ++s) f[kCentroidDist0 + s] = std::hypot(stations[s].x - m.cx, stations[s].y - m.cy);

    // Widths: chords across the finger after turning its own axis vertical.
    const double phi = upright_rotation(m.major_axis_angle());
    const Raster upright = std::abs(phi) > 1e-3 ? crop_to_mask(rotate_mask(mask, phi), 0) : crop_to_mask(mask, 0);
    const int h = upright.height();
    for (int s = 0; s < 10; ++s) {
        const int y = std::min(h - 1, static_cast<int>((s + 0.5) * h / 10.0));
        int count = 0;
        for (int x = 0; x < upright.width(); ++x) count += upright.at(x, y) ? 1 : 0;
        f[kWidth0 + s] = count;
    }
    return f;
}

std::vector<double> hand_vector(const HandContour& hand) {
    const auto fingers = segment_fingers(hand);
    std::vector<double> v;
    v.reserve(kHandFeatures);
    for (const auto& finger : fingers) {
        const auto f = finger_features(finger.mask);
        v.insert(v.end(), f.begin(), f.end());
    }
    return v;
}

std::vector<double> hand_vector(const Raster& scan) { return hand_vector(normalize_hand(scan)); }

std::string feature_name(int index) {
    if (index < 0 || index >= kHandFeatures) throw InvalidArgument("feature index out of range");
    static const char* base[] = {"area", "perimeter", "major_axis", "minor_axis", "equiv_diameter", "solidity"};
    const int finger = index / kFeaturesPerFinger;
    const int slot = index % kFeaturesPerFinger;
    std::string name(finger_name(static_cast<FingerKind>(finger)));
    name += '.';
    if (slot < kCentroidDist0) return name + base[slot];
    if (slot < kWidth0) return name + "centroid_dist" + std::to_string(slot - kCentroidDist0);
    return name + "width" + std::to_string(slot - kWidth0);
}

}  // namespace handcap::fingergeom
