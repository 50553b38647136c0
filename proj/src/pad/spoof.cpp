#include "handcap/pad/spoof.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "handcap/common/error.hpp"
#include "handcap/synth/hand_model.hpp"

namespace handcap::pad {

nlohmann::json SpoofParams::to_json() const {
    return {{"blur_sigma", blur_sigma},       {"pattern_amp", pattern_amp}, {"pattern_period", pattern_period},
            {"pattern_angle", pattern_angle}, {"brightness", brightness},   {"contrast", contrast},
            {"block_mix", block_mix},         {"sensor_noise", sensor_noise}};
}

RealImage gaussian_blur(const RealImage& img, double sigma) {
    if (sigma <= 0) throw InvalidArgument("gaussian sigma must be positive");
    const int r = static_cast<int>(std::ceil(3 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double sum = 0;
    for (int i = -r; i <= r; ++i) sum += k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (auto& v : k) v /= sum;
    const int w = img.width(), h = img.height();
    RealImage tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0;
            for (int i = -r; i <= r; ++i) s += k[static_cast<std::size_t>(i + r)] * img.at(std::clamp(x + i, 0, w - 1), y);
            tmp.at(x, y) = s;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0;
            for (int i = -r; i <= r; ++i) s += k[static_cast<std::size_t>(i + r)] * tmp.at(x, std::clamp(y + i, 0, h - 1));
            out.at(x, y) = s;
        }
    }
    return out;
}

Raster synth_spoof(const Raster& img, imaging::RandomSource& rng, SpoofParams* params) {
    if (img.empty()) throw InvalidArgument("empty image");
    SpoofParams p;
    p.blur_sigma = rng.uniform(0.8, 1.5);
    p.pattern_amp = rng.uniform(3, 9);
    p.pattern_period = rng.uniform(3, 7);
    p.pattern_angle = rng.uniform(0, std::numbers::pi);
    p.brightness = rng.uniform(-20, 20);
    p.contrast = rng.uniform(0.85, 1.1);
    p.block_mix = rng.uniform(0.1, 0.3);
    p.sensor_noise = rng.uniform(1.5, 4.5);

    const int w = img.width(), h = img.height();
    const double fx = std::cos(p.pattern_angle) * 2 * std::numbers::pi / p.pattern_period;
    const double fy = std::sin(p.pattern_angle) * 2 * std::numbers::pi / p.pattern_period;
    Raster out(w, h, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        auto plane = gaussian_blur(RealImage::from_raster(img.channel(c)), p.blur_sigma);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double v = plane.at(x, y);
                plane.at(x, y) = p.contrast * (v - 128) + 128 + p.brightness + p.pattern_amp * std::sin(fx * x + fy * y);
            }
        }
        for (int by = 0; by < h; by += 8) {
            for (int bx = 0; bx < w; bx += 8) {
                const int ex = std::min(w, bx + 8), ey = std::min(h, by + 8);
                double mean = 0;
                for (int y = by; y < ey; ++y) {
                    for (int x = bx; x < ex; ++x) mean += plane.at(x, y);
                }
                mean /= static_cast<double>((ex - bx) * (ey - by));
                for (int y = by; y < ey; ++y) {
                    for (int x = bx; x < ex; ++x) {
                        const double v = (1 - p.block_mix) * plane.at(x, y) + p.block_mix * mean +
                                         p.sensor_noise * rng.normal();
                        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
                    }
                }
            }
        }
    }
    if (params) *params = p;
    return out;
}

QualitySet synthetic_pad_set(std::size_t subjects, const std::vector<Metric>& metrics, std::uint64_t seed) {
    const auto pop = synth::Population::make(subjects, seed);
    QualitySet set;
    set.metrics = metrics;
    char id[32];
    for (std::size_t s = 0; s < subjects; ++s) {
        imaging::RandomSource rng(imaging::mix_seed(seed ^ (0x5900f + s)));
        for (std::size_t k = 0; k < 3; ++k) {
            std::snprintf(id, sizeof id, "s%04zu/%zu", s, k + 1);
            const auto real = quality_vector(pop.sample(s, k), metrics);
            set.add(id, Label::Real, real.values);
            // The spoof is a recapture of a separate scan of the same hand.
            const auto fake = quality_vector(synth_spoof(pop.sample(s, k + 3), rng), metrics);
            set.add(id, Label::Fake, fake.values);
        }
    }
    return set;
}

}  // namespace handcap::pad
