#pragma once

#include "handcap/imaging/raster.hpp"

namespace handcap::fingergeom {

// Left-side finger profile fields: positive half-differences along x and y,
// FP_x(x, y) = 0.5 * max(0, I(x + 1, y) - I(x, y)) and likewise for y. On a
// bright hand over a dark backdrop FP_x lights up the left flank of each
// finger. The last column (row) is zero.
struct FingerProfile {
    imaging::RealImage fp_x;
    imaging::RealImage fp_y;
};

FingerProfile left_finger_profile(const imaging::RealImage& img);
FingerProfile left_finger_profile(const imaging::Raster& gray);

}  // namespace handcap::fingergeom
