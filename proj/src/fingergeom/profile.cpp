#include "handcap/fingergeom/profile.hpp"

#include <algorithm>

#include "handcap/imaging/ops.hpp"

namespace handcap::fingergeom {

FingerProfile left_finger_profile(const imaging::RealImage& img) {
    const int w = img.width(), h = img.height();
    FingerProfile p{imaging::RealImage(w, h), imaging::RealImage(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) p.fp_x.at(x, y) = 0.5 * std::max(0.0, img.at(x + 1, y) - img.at(x, y));
            if (y + 1 < h) p.fp_y.at(x, y) = 0.5 * std::max(0.0, img.at(x, y + 1) - img.at(x, y));
        }
    }
    return p;
}

FingerProfile left_finger_profile(const imaging::Raster& gray) {
    return left_finger_profile(imaging::RealImage::from_raster(imaging::to_grayscale(gray)));
}

}  // namespace handcap::fingergeom
