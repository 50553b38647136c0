#pragma once

#include <cstdint>

#include <json.hpp>

#include "handcap/imaging/random.hpp"
#include "handcap/pad/quality.hpp"

namespace handcap::pad {

/// Parameters drawn for one simulated screen recapture.
struct SpoofParams {
    double blur_sigma = 1.0;      // [0.8, 1.5]
    double pattern_amp = 6;       // gray levels, [3, 9]
    double pattern_period = 4;    // pixels, [3, 7]
    double pattern_angle = 0;     // radians
    double brightness = 0;        // [-20, 20]
    double contrast = 1;          // [0.85, 1.1]
    double block_mix = 0.2;       // weight of the 8x8 block mean, [0.1, 0.3]
    double sensor_noise = 3;      // recapturing camera's Gaussian noise, [1.5, 4.5]

    nlohmann::json to_json() const;
};

/// Simulated display recapture: defocus blur, periodic luminance pattern,
/// brightness/contrast shift, 8x8 blockiness and the recapturing
/// camera's sensor noise. Keeps size and channels.
Raster synth_spoof(const Raster& img, imaging::RandomSource& rng, SpoofParams* params = nullptr);

/// Separable Gaussian blur with a 2*ceil(3 sigma)+1 tap kernel and edge
/// replication.
RealImage gaussian_blur(const RealImage& img, double sigma);

/// Synthetic real/fake quality set: per subject, 3 rendered captures labelled
/// real and 3 spoofs of further captures labelled fake. Ids "sNNNN/k".
QualitySet synthetic_pad_set(std::size_t subjects, const std::vector<Metric>& metrics, std::uint64_t seed);

}  // namespace handcap::pad
