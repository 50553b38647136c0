#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "handcap/fingergeom/contour.hpp"

namespace handcap::fingergeom {

enum class FingerKind { Index = 0, Middle = 1, Ring = 2, Little = 3 };

std::string_view finger_name(FingerKind k);

struct Finger {
    FingerKind kind = FingerKind::Index;
    Raster mask;        // same size as the hand mask, finger pixels only
    imaging::Rect box;  // bounding box in hand-mask coordinates
    Point tip;
    double cx = 0;
    double cy = 0;
};

// One horizontal run of foreground pixels. x0 is where the left-side profile
// crosses the row (0 -> 1 transition), x1 - 1 the right-side one (1 -> 0).
struct RowRun {
    int y = 0;
    int x0 = 0;
    int x1 = 0;  // exclusive
    int width() const { return x1 - x0; }
};

/// Runs of every row, found by forward differencing the binary mask.
std::vector<std::vector<RowRun>> row_runs(const Raster& mask);

/// Pairs left and right side profile fragments row by row into vertical
/// chains starting at fingertips and returns the four non-thumb fingers in
/// Index, Middle, Ring, Little order. Throws "segmentation failure" when the
/// candidate count is not 4 (or 5 with a thumb).
std::array<Finger, 4> segment_fingers(const HandContour& hand);

}  // namespace handcap::fingergeom
