#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "handcap/imaging/random.hpp"
#include "handcap/imaging/transform.hpp"

namespace handcap::captcha {

using imaging::Point;
using imaging::RandomSource;
using imaging::Raster;
using imaging::Rect;
using imaging::Size;

struct ChallengeSpec {
    Size canvas{460, 460};
    int n_genuine = 2;
    int n_fake_min = 5;
    int n_fake_max = 7;
    int shapes_per_kind = 100;
    int shape_size_min = 6;
    int shape_size_max = 30;
    double opacity_min = 0.3;
    double opacity_max = 1.0;
    double alpha = 0.25;  // weight of the preserved cluttered background in the final blend
    double gamma = 2.5;
    int hand_size_min = 100;  // longer side after scaling
    int hand_size_max = 150;
    double rotation_deg = 25;  // hands rotate uniformly in [-rotation_deg, rotation_deg]
    double noise_density_min = 0.02;
    double noise_density_max = 0.05;
    int open_radius_min = 5;
    int open_radius_max = 10;
    int spacing = 4;             // minimum gap between hand boxes, and twice the gap to the canvas edge
    int placement_attempts = 50;  // per hand

    /// Throws InvalidArgument naming the first violated constraint.
    void validate() const;
};

/// 3x3 tiling of the canvas with column-major labels 1..9:
///   1 4 7
///   2 5 8
///   3 6 9
class GridLayout {
public:
    explicit GridLayout(Size canvas);

    Size canvas() const { return canvas_; }
    /// Throws InvalidArgument outside 1..9.
    Rect cell(int label) const;
    static int label_of(int col, int row) { return col * 3 + row + 1; }
    /// Label of the cell containing pixel p, or 0 outside the canvas.
    int label_at(Point p) const;

private:
    Size canvas_;
    std::array<int, 4> xs_{};
    std::array<int, 4> ys_{};
};

enum class ShapeKind { Circle, Rectangle, Star };

struct ShapeSpec {
    ShapeKind kind = ShapeKind::Circle;
    Point position;  // center
    int size = 10;   // diameter or longer side, <= 30
    double aspect = 1.0;    // rectangle height / width
    double rotation = 0.0;  // radians, stars and rectangles
    std::array<std::uint8_t, 3> color{};
    double opacity = 1.0;
};

/// spec.shapes_per_kind shapes of each kind. Centers are distinct within a
/// kind and lie inside the canvas.
std::vector<ShapeSpec> random_shapes(const ChallengeSpec& spec, RandomSource& rng);

/// Paints one shape onto an RGB raster with its opacity (pixel-center test).
void draw_shape(Raster& rgb, const ShapeSpec& shape);

/// Shapes, then disk opening, then salt-and-pepper noise. A larger background
/// is center-cropped; a smaller one throws InvalidArgument. Gray input is
/// promoted to RGB. `shapes` receives the drawn shapes when non-null.
Raster clutter_background(const Raster& bg, const ChallengeSpec& spec, RandomSource& rng,
                          std::vector<ShapeSpec>* shapes = nullptr);

/// Region of interest of a hand picture: Otsu foreground, largest component,
/// holes filled.
Raster hand_roi(const Raster& img);

struct Placement {
    int cell = 0;
    bool genuine = false;
    std::size_t source = 0;  // index into the hand list given to place_hands
    Size scaled;
    double angle_deg = 0;
    Rect box;                // ROI bounding box on the canvas
    imaging::Sprite sprite;  // transformed, trimmed hand as overlaid
};

struct PlacementResult {
    Raster canvas;
    std::array<int, 2> truth{};  // cells of the first and second genuine image
    std::vector<int> occupied;   // sorted
    std::vector<Placement> placements;
};

/// Scales each hand sprite (longer side in [hand_size_min, hand_size_max], aspect kept),
/// rotates and overlays every hand's ROI inside its own random cell, keeping
/// `spacing` pixels between hand boxes. Throws Error("layout failure") when a
/// hand does not fit within spec.placement_attempts draws.
PlacementResult place_hands(const Raster& bg, const std::array<imaging::Sprite, 2>& genuine,
                            const std::vector<imaging::Sprite>& fakes, const GridLayout& layout,
                            const ChallengeSpec& spec, RandomSource& rng);

}  // namespace handcap::captcha
