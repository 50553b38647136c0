#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "handcap/imaging/random.hpp"
#include "handcap/imaging/raster.hpp"

// Parametric stand-in for flatbed hand scans: palm, four fingers, thumb and a
// short wrist stub, rendered bright on a dark backdrop with the thumb on the
// left. Subjects differ in geometry; captures of one subject differ in pose,
// exposure and sensor noise.
namespace handcap::synth {

struct HandGeometry {
    double palm_width = 100;
    double palm_height = 100;
    double palm_corner = 14;
    // index, middle, ring, little (left to right)
    std::array<double, 4> finger_length{64, 72, 68, 52};
    std::array<double, 4> finger_width{18, 19, 18, 15};
    std::array<double, 4> finger_angle{-7, -2, 3, 9};  // degrees from vertical, + leans right
    double thumb_length = 56;
    double thumb_width = 23;
    double thumb_angle = -42;
    double wrist_width = 72;
    double wrist_length = 40;
    int digits = 4;  // visible fingers besides the thumb (fakes may use 2..5)
    bool thumb = true;
};

struct CaptureParams {
    double rotation_deg = 0;
    double shift_x = 0;
    double shift_y = 0;
    std::array<double, 4> finger_jitter_deg{};
    double hand_level = 200;    // mean hand intensity
    double backdrop_level = 28;
    double shading = 0.12;      // strength of the low-frequency illumination falloff
    double texture_amp = 5;     // skin-texture ripple amplitude
    double texture_phase = 0;
    double noise_sigma = 3;
};

struct RenderOptions {
    int width = 256;
    int height = 320;
};

HandGeometry random_geometry(imaging::RandomSource& rng);

/// Pose/exposure for one capture of a subject.
CaptureParams random_capture(imaging::RandomSource& rng);

/// Anti-aliased hand coverage in [0, 1] for the pixel center (x, y).
double hand_coverage(const HandGeometry& g, const CaptureParams& c, const RenderOptions& o, double x,
                     double y);

/// Gray scan of one capture.
imaging::Raster render_hand(const HandGeometry& g, const CaptureParams& c, const RenderOptions& o = {},
                            std::uint64_t noise_seed = 0);

/// Coverage mask (0/255, threshold 0.5) without shading or noise.
imaging::Raster render_mask(const HandGeometry& g, const CaptureParams& c, const RenderOptions& o = {});

/// A subject population: geometry per subject, captures drawn per sample.
struct Population {
    std::vector<HandGeometry> subjects;
    std::uint64_t seed = 0;

    static Population make(std::size_t n, std::uint64_t seed);

    /// Deterministic sample `k` of subject `s`.
    imaging::Raster sample(std::size_t s, std::size_t k, const RenderOptions& o = {}) const;
    CaptureParams capture(std::size_t s, std::size_t k) const;
};

}  // namespace handcap::synth
