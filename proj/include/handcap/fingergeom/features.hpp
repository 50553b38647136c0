#pragma once

#include <array>
#include <string>
#include <vector>

#include "handcap/fingergeom/segment.hpp"

namespace handcap::fingergeom {

inline constexpr int kFeaturesPerFinger = 26;
inline constexpr int kHandFeatures = 4 * kFeaturesPerFinger;

// Layout of one finger's block.
enum FeatureSlot : int {
    kArea = 0,
    kPerimeter = 1,
    kMajorAxis = 2,
    kMinorAxis = 3,
    kEquivDiameter = 4,
    kSolidity = 5,
    kCentroidDist0 = 6,  // 10 entries
    kWidth0 = 16,        // 10 entries
};

using FingerFeatures = std::array<double, kFeaturesPerFinger>;

/// 26 shape features of a binary finger mask (0/255). Throws
/// "degenerate finger mask" below 20 pixels.
FingerFeatures finger_features(const Raster& mask);

/// 104 raw features, finger-major (Index block first).
std::vector<double> hand_vector(const HandContour& hand);

/// normalize_hand + hand_vector.
std::vector<double> hand_vector(const Raster& scan);

/// "middle.width3" style name of feature i in a hand vector.
std::string feature_name(int index);

/// Ordered boundary perimeter: 1 per axis step, sqrt(2) per diagonal step.
double chain_length(const std::vector<Point>& chain);

struct StationPoint {
    double x = 0;
    double y = 0;
    double arc = 0;  // arc length from the chain start
};

/// n points at arc-length fractions (i + 0.5) / n along the closed chain.
std::vector<StationPoint> arc_length_stations(const std::vector<Point>& chain, int n);

/// Number of lattice points inside or on the convex hull of the mask's pixel centers.
double convex_hull_pixels(const Raster& mask);

}  // namespace handcap::fingergeom
