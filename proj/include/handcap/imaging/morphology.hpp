#pragma once

#include <vector>

#include "handcap/imaging/raster.hpp"

namespace handcap::imaging {

/// Half-widths of the discrete disk {dx^2 + dy^2 <= r^2}, indexed by dy + r.
std::vector<int> disk_half_widths(int radius);

/// Grayscale erosion / dilation with a disk of the given radius. Channels are
/// processed independently; pixels outside the image are ignored.
Raster erode(const Raster& img, int radius);
Raster dilate(const Raster& img, int radius);

/// Opening (erosion then dilation) with a disk; radius must lie in [5, 10].
Raster morphological_open(const Raster& img, int radius);

/// Opening with any radius >= 0.
Raster open_with_disk(const Raster& img, int radius);

}  // namespace handcap::imaging
