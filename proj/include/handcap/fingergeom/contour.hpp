#pragma once

#include <vector>

#include "handcap/imaging/raster.hpp"

namespace handcap::fingergeom {

using imaging::Point;
using imaging::Raster;

struct MaskMoments {
    double area = 0;
    double cx = 0;
    double cy = 0;
    double mu20 = 0;  // central moments normalized by area
    double mu02 = 0;
    double mu11 = 0;

    /// Angle of the major axis in image coordinates (radians, +x rotating toward +y).
    double major_axis_angle() const;
    /// Eigenvalues of the pixel covariance including the 1/12 pixel-extent term.
    double major_variance() const;
    double minor_variance() const;
};

MaskMoments mask_moments(const Raster& mask);

/// Rotation (radians, magnitude <= pi/2) that turns an axis at angle theta vertical.
double upright_rotation(double theta);

/// Rotates a 0/255 mask by angle_rad (image coordinates) about its centroid
/// onto a canvas large enough for the result. Nearest-neighbour.
Raster rotate_mask(const Raster& mask, double angle_rad);

/// Closed 8-connected outer boundary of the component containing the
/// top-most (then left-most) foreground pixel, clockwise, start not repeated.
std::vector<Point> trace_boundary(const Raster& mask);

struct HandContour {
    Raster mask;                  // upright hand, wrist removed, 0/255
    std::vector<Point> boundary;  // outer boundary chain of mask
    double orientation_deg = 0;   // total rotation applied
    Point wrist_left;             // wrist reference line in mask coordinates
    Point wrist_right;
};

/// Binarizes a scan, keeps the largest component, turns the ellipse major
/// axis vertical with fingers up, and cuts the wrist below the reference
/// line. Throws "no hand found" for blank input or a component under 1% of
/// the image area.
HandContour normalize_hand(const Raster& img);

/// Same pipeline starting from an already binarized mask.
HandContour normalize_mask(const Raster& mask);

}  // namespace handcap::fingergeom
