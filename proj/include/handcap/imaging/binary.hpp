#pragma once

#include <vector>

#include "handcap/imaging/raster.hpp"

namespace handcap::imaging {

/// 8-connected component labels of non-zero pixels (0 = background, 1..n).
/// Returns the label count.
int label_components(const Raster& mask, std::vector<int>& labels);

/// Keeps only the largest 8-connected component (output 0/255).
Raster largest_component(const Raster& mask);

/// Fills background regions not connected to the border.
Raster fill_holes(const Raster& mask);

/// Number of non-zero pixels.
std::size_t count_nonzero(const Raster& mask);

/// Foreground of a scan-like image: Otsu threshold, with the class that
/// differs from the border taken as foreground, reduced to the largest
/// component with holes filled. Falls back to the full frame when the
/// threshold separates nothing.
Raster foreground_mask(const Raster& img);

}  // namespace handcap::imaging
