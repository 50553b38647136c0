#pragma once

#include <array>
#include <utility>
#include <vector>

#include "handcap/synth/hand_model.hpp"

// Synthetic image sets for the challenge generator: backgrounds, genuine
// hand pairs (two captures of one subject) and artificial "fake" hands.
namespace handcap::synth {

using Rgb = std::array<std::uint8_t, 3>;

imaging::Raster render_color_hand(const HandGeometry& g, const CaptureParams& c, Rgb skin, Rgb backdrop,
                                  const RenderOptions& o = {}, std::uint64_t noise_seed = 0);

/// Stylized non-biological hand: odd digit counts, saturated pattern fills.
imaging::Raster random_fake_hand(imaging::RandomSource& rng, const RenderOptions& o = {});

/// Smooth two-color gradient with low-frequency blotches.
imaging::Raster random_background(imaging::RandomSource& rng, imaging::Size size = {460, 460});

struct SceneSet {
    std::vector<imaging::Raster> backgrounds;
    std::vector<std::pair<imaging::Raster, imaging::Raster>> genuine;
    std::vector<imaging::Raster> fakes;
};

SceneSet make_scene_set(std::size_t backgrounds, std::size_t genuine_classes, std::size_t fakes,
                        std::uint64_t seed);

}  // namespace handcap::synth
