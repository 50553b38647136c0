#pragma once

#include <optional>

#include "handcap/imaging/raster.hpp"

namespace handcap::imaging {

enum class Resample { Nearest, Bilinear };

/// An image plus its region-of-interest mask (1 channel, 0 or 255). Only mask
/// pixels are drawn when the sprite is overlaid.
struct Sprite {
    Raster image;
    Raster mask;
};

/// Bounding box of a w x h rectangle rotated by angle_deg.
Size rotated_bounds(Size s, double angle_deg);

Raster resize(const Raster& img, Size to, Resample mode);

/// Rotates counter-clockwise (as displayed) about the image center onto the
/// enlarged bounding canvas. Uncovered pixels get a zero mask.
Sprite rotate(const Sprite& s, double angle_deg, Resample mode);

/// Size then rotation (the inner part of the composite distortion).
Sprite transform_sprite(const Sprite& s, Size scale_to, double angle_deg, Resample mode);

/// Crops the sprite to the bounding box of its mask. `origin` receives the
/// top-left of the kept box in the input sprite's coordinates.
Sprite trim_to_mask(const Sprite& s, Point* origin = nullptr);

/// Bounding box of non-zero mask pixels (empty Rect when none).
Rect mask_bounds(const Raster& mask);

/// Copies the sprite's ROI pixels onto canvas at offset. Throws
/// "placement overflow" when the sprite box leaves the canvas.
Raster overlay(const Raster& canvas, const Sprite& sprite, Point offset);

/// size -> rotation -> translation, overlaid on canvas. Without a ROI the
/// whole (rotated) image rectangle is the ROI.
Raster composite_transform(const Raster& img, const std::optional<Raster>& roi, Size scale_to,
                           double angle_deg, Point offset, const Raster& canvas,
                           Resample mode = Resample::Bilinear);

}  // namespace handcap::imaging
