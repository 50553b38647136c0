#include "handcap/synth/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace handcap::synth {

using imaging::Raster;
using imaging::RandomSource;

namespace {

std::uint8_t clamp_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

Rgb random_rgb(RandomSource& rng, int lo = 0, int hi = 255) {
    return {static_cast<std::uint8_t>(rng.uniform_int(lo, hi)), static_cast<std::uint8_t>(rng.uniform_int(lo, hi)),
            static_cast<std::uint8_t>(rng.uniform_int(lo, hi))};
}

Rgb skin_tone(RandomSource& rng) {
    const double t = rng.uniform();
    // Interpolate between a light and a dark skin reference.
    const double r = 236 - 90 * t, g = 196 - 100 * t, b = 170 - 110 * t;
    return {clamp_u8(r), clamp_u8(g), clamp_u8(b)};
}

}  // namespace

Raster render_color_hand(const HandGeometry& g, const CaptureParams& c, Rgb skin, Rgb backdrop,
                         const RenderOptions& o, std::uint64_t noise_seed) {
    Raster out(o.width, o.height, 3);
    RandomSource noise(noise_seed);
    for (int y = 0; y < o.height; ++y) {
        for (int x = 0; x < o.width; ++x) {
            const double cov = hand_coverage(g, c, o, x + 0.5, y + 0.5);
            const double shade = 1.0 - c.shading * y / static_cast<double>(o.height);
            const double n = c.noise_sigma * noise.normal();
            for (int ch = 0; ch < 3; ++ch) {
                const double v = backdrop[ch] + cov * (skin[ch] * shade - backdrop[ch]) + n;
                out.at(x, y, ch) = clamp_u8(v);
            }
        }
    }
    return out;
}

Raster random_fake_hand(RandomSource& rng, const RenderOptions& o) {
    HandGeometry g = random_geometry(rng);
    const int digit_choices[] = {2, 3, 5, 6, 4};
    g.digits = digit_choices[rng.index(5)];
    g.thumb = rng.bernoulli(0.5);
    for (double& w : g.finger_width) w *= rng.uniform(0.8, 1.5);
    for (double& l : g.finger_length) l *= rng.uniform(0.6, 1.2);
    CaptureParams c = random_capture(rng);
    c.rotation_deg = rng.uniform(-10, 10);

    const Rgb a = random_rgb(rng, 40, 255);
    const Rgb b = random_rgb(rng, 0, 200);
    const Rgb backdrop = random_rgb(rng, 0, 90);
    const int pattern = rng.uniform_int(0, 2);
    const double period = rng.uniform(6, 18);
    const double phase = rng.uniform(0, 2 * std::numbers::pi);

    Raster out(o.width, o.height, 3);
    for (int y = 0; y < o.height; ++y) {
        for (int x = 0; x < o.width; ++x) {
            const double cov = hand_coverage(g, c, o, x + 0.5, y + 0.5);
            double t = 0;
            switch (pattern) {
                case 0: t = 0.5 + 0.5 * std::sin((x + y) / period + phase); break;  // diagonal stripes
                case 1: t = ((x / static_cast<int>(period) + y / static_cast<int>(period)) % 2) ? 1.0 : 0.0; break;
                default: t = static_cast<double>(y) / o.height; break;  // vertical gradient
            }
            for (int ch = 0; ch < 3; ++ch) {
                const double fill = a[ch] * (1 - t) + b[ch] * t;
                out.at(x, y, ch) = clamp_u8(backdrop[ch] + cov * (fill - backdrop[ch]));
            }
        }
    }
    return out;
}

Raster random_background(RandomSource& rng, imaging::Size size) {
    const Rgb a = random_rgb(rng), b = random_rgb(rng);
    const double angle = rng.uniform(0, 2 * std::numbers::pi);
    const double ux = std::cos(angle), uy = std::sin(angle);
    struct Blob {
        double x, y, r, amp;
        Rgb color;
    };
    std::vector<Blob> blobs(static_cast<std::size_t>(rng.uniform_int(4, 10)));
    for (auto& bl : blobs) {
        bl = {rng.uniform(0, size.width), rng.uniform(0, size.height), rng.uniform(30, 120),
              rng.uniform(0.3, 0.8), random_rgb(rng)};
    }
    const double diag = std::hypot(size.width, size.height);
    Raster out(size.width, size.height, 3);
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            const double t = std::clamp(0.5 + ((x - size.width / 2.0) * ux + (y - size.height / 2.0) * uy) / diag,
                                        0.0, 1.0);
            double px[3];
            for (int ch = 0; ch < 3; ++ch) px[ch] = a[ch] * (1 - t) + b[ch] * t;
            for (const auto& bl : blobs) {
                const double d2 = ((x - bl.x) * (x - bl.x) + (y - bl.y) * (y - bl.y)) / (bl.r * bl.r);
                if (d2 > 9) continue;
                const double w = bl.amp * std::exp(-d2);
                for (int ch = 0; ch < 3; ++ch) px[ch] = px[ch] * (1 - w) + bl.color[ch] * w;
            }
            for (int ch = 0; ch < 3; ++ch) out.at(x, y, ch) = clamp_u8(px[ch]);
        }
    }
    return out;
}

SceneSet make_scene_set(std::size_t backgrounds, std::size_t genuine_classes, std::size_t fakes,
                        std::uint64_t seed) {
    SceneSet set;
    const RandomSource root(seed);
    for (std::size_t i = 0; i < backgrounds; ++i) {
        auto rng = root.fork(i);
        set.backgrounds.push_back(random_background(rng));
    }
    for (std::size_t i = 0; i < genuine_classes; ++i) {
        auto rng = root.fork(100000 + i);
        const HandGeometry g = random_geometry(rng);
        const Rgb skin = skin_tone(rng);
        const Rgb backdrop = random_rgb(rng, 0, 50);
        const CaptureParams c1 = random_capture(rng);
        const CaptureParams c2 = random_capture(rng);
        set.genuine.emplace_back(render_color_hand(g, c1, skin, backdrop, {}, rng.next_u64()),
                                 render_color_hand(g, c2, skin, backdrop, {}, rng.next_u64()));
    }
    for (std::size_t i = 0; i < fakes; ++i) {
        auto rng = root.fork(200000 + i);
        set.fakes.push_back(random_fake_hand(rng));
    }
    return set;
}

}  // namespace handcap::synth
