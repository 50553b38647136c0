#include "handcap/synth/hand_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace handcap::synth {

using imaging::Raster;
using imaging::RandomSource;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Vec {
    double x, y;
};

double capsule_sdf(Vec p, Vec a, Vec b, double r) {
    const double bax = b.x - a.x, bay = b.y - a.y;
    const double pax = p.x - a.x, pay = p.y - a.y;
    const double h = std::clamp((pax * bax + pay * bay) / (bax * bax + bay * bay), 0.0, 1.0);
    return std::hypot(pax - bax * h, pay - bay * h) - r;
}

double rounded_box_sdf(Vec p, Vec center, double hx, double hy, double radius) {
    const double qx = std::abs(p.x - center.x) - (hx - radius);
    const double qy = std::abs(p.y - center.y) - (hy - radius);
    const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
    return outside + std::min(std::max(qx, qy), 0.0) - radius;
}

Vec direction(double angle_deg) { return {std::sin(angle_deg * kDeg), -std::cos(angle_deg * kDeg)}; }

// Signed distance to the whole hand in local coordinates (palm center at the
// origin, y pointing down).
double hand_sdf(const HandGeometry& g, const CaptureParams& c, Vec p) {
    const double top = -g.palm_height / 2;
    double d = rounded_box_sdf(p, {0, 0}, g.palm_width / 2, g.palm_height / 2, g.palm_corner);

    const int n = std::clamp(g.digits, 1, 6);
    const double spacing = g.palm_width / n;
    for (int i = 0; i < n; ++i) {
        const int k = std::min(i, 3);
        // Fakes with other digit counts reuse the nearest real finger parameters.
        const double len = g.finger_length[k];
        const double width = g.finger_width[k];
        const double angle = g.finger_angle[k] + (n == 4 ? c.finger_jitter_deg[k] : 0.0) +
                             (n != 4 ? (i - (n - 1) / 2.0) * 4.0 : 0.0);
        const Vec base{-g.palm_width / 2 + spacing * (i + 0.5), top + 4};
        const Vec dir = direction(angle);
        const Vec tip{base.x + dir.x * len, base.y + dir.y * len};
        d = std::min(d, capsule_sdf(p, base, tip, width / 2));
    }

    if (g.thumb) {
        const Vec base{-g.palm_width / 2 + 0.16 * g.palm_width, top + 0.6 * g.palm_height};
        const Vec dir = direction(g.thumb_angle);
        const Vec tip{base.x + dir.x * g.thumb_length, base.y + dir.y * g.thumb_length};
        d = std::min(d, capsule_sdf(p, base, tip, g.thumb_width / 2));
    }

    const double wrist_half = g.wrist_length / 2 + 6;
    d = std::min(d, rounded_box_sdf(p, {4, g.palm_height / 2 - 6 + wrist_half}, g.wrist_width / 2,
                                    wrist_half, 2.0));
    return d;
}

Vec to_local(const CaptureParams& c, const RenderOptions& o, double x, double y) {
    const double ax = o.width / 2.0 + 4 + c.shift_x;
    const double ay = o.height * 0.57 + c.shift_y;
    const double dx = x - ax;
    const double dy = y - ay;
    const double a = c.rotation_deg * kDeg;
    const double ca = std::cos(a), sa = std::sin(a);
    return {dx * ca - dy * sa, dx * sa + dy * ca};
}

}  // namespace

HandGeometry random_geometry(RandomSource& rng) {
    HandGeometry g;
    g.palm_width = rng.uniform(98, 110);
    g.palm_height = rng.uniform(92, 108);
    const double index = rng.uniform(58, 70);
    g.finger_length = {index, index * rng.uniform(1.08, 1.16), index * rng.uniform(1.0, 1.07),
                       index * rng.uniform(0.76, 0.86)};
    g.finger_width = {rng.uniform(16.5, 19.5), rng.uniform(17, 20), rng.uniform(16, 19),
                      rng.uniform(13.5, 16.5)};
    g.finger_angle = {-7 + rng.uniform(-1.5, 1.5), -2 + rng.uniform(-1, 1), 3 + rng.uniform(-1, 1),
                      9 + rng.uniform(-1.5, 1.5)};
    g.thumb_length = rng.uniform(50, 60);
    g.thumb_width = rng.uniform(21, 25);
    g.thumb_angle = rng.uniform(-46, -38);
    g.wrist_width = 0.7 * g.palm_width + rng.uniform(-3, 3);
    g.wrist_length = rng.uniform(34, 46);
    return g;
}

CaptureParams random_capture(RandomSource& rng) {
    CaptureParams c;
    c.rotation_deg = rng.uniform(-4, 4);
    c.shift_x = rng.uniform(-6, 6);
    c.shift_y = rng.uniform(-6, 6);
    for (double& j : c.finger_jitter_deg) j = rng.uniform(-0.8, 0.8);
    c.hand_level = rng.uniform(150, 225);
    c.backdrop_level = rng.uniform(15, 45);
    c.shading = rng.uniform(0.05, 0.2);
    c.texture_amp = rng.uniform(3, 7);
    c.texture_phase = rng.uniform(0, 2 * std::numbers::pi);
    c.noise_sigma = rng.uniform(1.5, 4.5);
    return c;
}

double hand_coverage(const HandGeometry& g, const CaptureParams& c, const RenderOptions& o, double x,
                     double y) {
    const Vec p = to_local(c, o, x, y);
    return std::clamp(0.5 - hand_sdf(g, c, p), 0.0, 1.0);
}

Raster render_hand(const HandGeometry& g, const CaptureParams& c, const RenderOptions& o,
                   std::uint64_t noise_seed) {
    Raster out(o.width, o.height, 1);
    RandomSource noise(noise_seed);
    for (int y = 0; y < o.height; ++y) {
        for (int x = 0; x < o.width; ++x) {
            const Vec p = to_local(c, o, x + 0.5, y + 0.5);
            const double cov = std::clamp(0.5 - hand_sdf(g, c, p), 0.0, 1.0);
            // Illumination falls off toward the fingertips and the edges of the platen.
            const double falloff = 1.0 - c.shading * std::clamp((-p.y + 40) / 180.0, 0.0, 1.0) -
                                   0.5 * c.shading * std::abs(p.x) / 120.0;
            const double ripple = c.texture_amp * std::sin(p.x / 2.3 + c.texture_phase) *
                                  std::sin(p.y / 3.1 - 0.7 * c.texture_phase);
            const double hand = c.hand_level * falloff + ripple;
            double v = c.backdrop_level + cov * (hand - c.backdrop_level);
            v += c.noise_sigma * noise.normal();
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return out;
}

Raster render_mask(const HandGeometry& g, const CaptureParams& c, const RenderOptions& o) {
    Raster out(o.width, o.height, 1);
    for (int y = 0; y < o.height; ++y) {
        for (int x = 0; x < o.width; ++x) {
            if (hand_coverage(g, c, o, x + 0.5, y + 0.5) >= 0.5) out.at(x, y) = 255;
        }
    }
    return out;
}

Population Population::make(std::size_t n, std::uint64_t seed) {
    Population pop;
    pop.seed = seed;
    pop.subjects.reserve(n);
    const RandomSource root(seed);
    for (std::size_t s = 0; s < n; ++s) {
        auto rng = root.fork(s);
        pop.subjects.push_back(random_geometry(rng));
    }
    return pop;
}

CaptureParams Population::capture(std::size_t s, std::size_t k) const {
    RandomSource rng(imaging::mix_seed(seed ^ imaging::mix_seed((s << 8) + k + 0x5eed)));
    return random_capture(rng);
}

Raster Population::sample(std::size_t s, std::size_t k, const RenderOptions& o) const {
    return render_hand(subjects.at(s), capture(s, k), o, imaging::mix_seed(seed + 31 * s + k + 1));
}

}  // namespace handcap::synth
