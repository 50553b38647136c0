#include "handcap/captcha/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "handcap/common/error.hpp"
#include "handcap/imaging/binary.hpp"
#include "handcap/imaging/morphology.hpp"
#include "handcap/imaging/ops.hpp"

namespace handcap::captcha {

namespace {

Raster to_rgb(const Raster& img) {
    if (img.channels() == 3) return img;
    Raster out(img.width(), img.height(), 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, 0);
        }
    }
    return out;
}

bool inside_star(double u, double v, double outer) {
    // 5-pointed star, inner radius half the outer one, first tip pointing up.
    std::array<std::array<double, 2>, 10> poly;
    for (int i = 0; i < 10; ++i) {
        const double r = i % 2 == 0 ? outer : 0.5 * outer;
        const double a = -std::numbers::pi / 2 + i * std::numbers::pi / 5;
        poly[i] = {r * std::cos(a), r * std::sin(a)};
    }
    bool in = false;
    for (int i = 0, j = 9; i < 10; j = i++) {
        const auto& pi = poly[i];
        const auto& pj = poly[j];
        if ((pi[1] > v) != (pj[1] > v) && u < (pj[0] - pi[0]) * (v - pi[1]) / (pj[1] - pi[1]) + pi[0]) in = !in;
    }
    return in;
}

}  // namespace

void ChallengeSpec::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidArgument(std::string("invalid challenge spec: ") + what);
    };
    require(canvas.width >= 60 && canvas.height >= 60, "canvas too small");
    require(n_genuine == 2, "n_genuine must be 2");
    require(n_fake_min >= 5 && n_fake_max <= 7 && n_fake_min <= n_fake_max, "n_fake range must lie in [5, 7]");
    require(shapes_per_kind >= 0, "shapes_per_kind must be non-negative");
    require(shape_size_min >= 1 && shape_size_min <= shape_size_max && shape_size_max <= 30,
            "shape sizes must lie in [1, 30]");
    require(opacity_min >= 0 && opacity_min <= opacity_max && opacity_max <= 1, "opacity range must lie in [0, 1]");
    require(alpha >= 0 && alpha <= 1, "alpha must lie in [0, 1]");
    require(gamma > 0, "gamma must be positive");
    require(hand_size_min >= 1 && hand_size_min <= hand_size_max, "hand size range is empty");
    require(rotation_deg >= 0 && rotation_deg <= 180, "rotation range must lie in [0, 180]");
    require(noise_density_min >= 0.02 && noise_density_max <= 0.05 && noise_density_min <= noise_density_max,
            "noise density range must lie in [0.02, 0.05]");
    require(open_radius_min >= 5 && open_radius_max <= 10 && open_radius_min <= open_radius_max,
            "opening radius range must lie in [5, 10]");
    require(spacing >= 0, "spacing must be non-negative");
    require(placement_attempts >= 1, "placement_attempts must be positive");
}

GridLayout::GridLayout(Size canvas) : canvas_(canvas) {
    if (canvas.width < 3 || canvas.height < 3) throw InvalidArgument("canvas too small for a 3x3 grid");
    for (int i = 0; i <= 3; ++i) {
        xs_[i] = i * canvas.width / 3;
        ys_[i] = i * canvas.height / 3;
    }
}

Rect GridLayout::cell(int label) const {
    if (label < 1 || label > 9) throw InvalidArgument("cell label out of range: " + std::to_string(label));
    const int col = (label - 1) / 3;
    const int row = (label - 1) % 3;
    return {xs_[col], ys_[row], xs_[col + 1] - xs_[col], ys_[row + 1] - ys_[row]};
}

int GridLayout::label_at(Point p) const {
    if (p.x < 0 || p.y < 0 || p.x >= canvas_.width || p.y >= canvas_.height) return 0;
    int col = 0, row = 0;
    while (col < 2 && p.x >= xs_[col + 1]) ++col;
    while (row < 2 && p.y >= ys_[row + 1]) ++row;
    return label_of(col, row);
}

std::vector<ShapeSpec> random_shapes(const ChallengeSpec& spec, RandomSource& rng) {
    std::vector<ShapeSpec> out;
    out.reserve(static_cast<std::size_t>(3 * spec.shapes_per_kind));
    const auto cells = static_cast<std::size_t>(spec.canvas.width) * spec.canvas.height;
    for (ShapeKind kind : {ShapeKind::Circle, ShapeKind::Rectangle, ShapeKind::Star}) {
        std::set<std::pair<int, int>> used;
        if (static_cast<std::size_t>(spec.shapes_per_kind) > cells) throw InvalidArgument("more shapes than pixels");
        for (int i = 0; i < spec.shapes_per_kind; ++i) {
            ShapeSpec s;
            s.kind = kind;
            do {
                s.position = {rng.uniform_int(0, spec.canvas.width - 1), rng.uniform_int(0, spec.canvas.height - 1)};
            } while (!used.insert({s.position.x, s.position.y}).second);
            s.size = rng.uniform_int(spec.shape_size_min, spec.shape_size_max);
            s.aspect = kind == ShapeKind::Rectangle ? rng.uniform(0.4, 1.0) : 1.0;
            s.rotation = kind == ShapeKind::Circle ? 0.0 : rng.uniform(0, 2 * std::numbers::pi);
            for (auto& c : s.color) c = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
            s.opacity = rng.uniform(spec.opacity_min, spec.opacity_max);
            out.push_back(s);
        }
    }
    return out;
}

void draw_shape(Raster& rgb, const ShapeSpec& s) {
    const double half = s.size / 2.0;
    const int reach = static_cast<int>(std::ceil(half)) + 1;
    const double ca = std::cos(s.rotation), sa = std::sin(s.rotation);
    for (int y = std::max(0, s.position.y - reach); y <= std::min(rgb.height() - 1, s.position.y + reach); ++y) {
        for (int x = std::max(0, s.position.x - reach); x <= std::min(rgb.width() - 1, s.position.x + reach); ++x) {
            const double dx = x - s.position.x, dy = y - s.position.y;
            const double u = dx * ca + dy * sa;
            const double v = -dx * sa + dy * ca;
            bool in = false;
            switch (s.kind) {
                case ShapeKind::Circle: in = dx * dx + dy * dy <= half * half; break;
                case ShapeKind::Rectangle: in = std::abs(u) <= half && std::abs(v) <= half * s.aspect; break;
                case ShapeKind::Star: in = inside_star(u, v, half); break;
            }
            if (!in) continue;
            for (int c = 0; c < rgb.channels(); ++c) {
                const double mixed = s.opacity * s.color[c] + (1 - s.opacity) * rgb.at(x, y, c);
                rgb.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(mixed), 0L, 255L));
            }
        }
    }
}

Raster clutter_background(const Raster& bg, const ChallengeSpec& spec, RandomSource& rng,
                          std::vector<ShapeSpec>* shapes) {
    if (bg.width() < spec.canvas.width || bg.height() < spec.canvas.height) {
        throw InvalidArgument("background smaller than canvas");
    }
    Raster canvas = to_rgb(bg);
    if (!(bg.size() == spec.canvas)) {
        canvas = canvas.crop({(bg.width() - spec.canvas.width) / 2, (bg.height() - spec.canvas.height) / 2,
                              spec.canvas.width, spec.canvas.height});
    }
    auto drawn = random_shapes(spec, rng);
    for (const auto& s : drawn) draw_shape(canvas, s);
    const int radius = rng.uniform_int(spec.open_radius_min, spec.open_radius_max);
    canvas = imaging::morphological_open(canvas, radius);
    const double density = rng.uniform(spec.noise_density_min, spec.noise_density_max);
    canvas = imaging::salt_pepper_noise(canvas, density, rng);
    if (shapes) *shapes = std::move(drawn);
    return canvas;
}

Raster hand_roi(const Raster& img) { return imaging::foreground_mask(img); }

PlacementResult place_hands(const Raster& bg, const std::array<imaging::Sprite, 2>& genuine,
                            const std::vector<imaging::Sprite>& fakes, const GridLayout& layout,
                            const ChallengeSpec& spec, RandomSource& rng) {
    if (static_cast<int>(fakes.size()) < spec.n_fake_min || static_cast<int>(fakes.size()) > spec.n_fake_max) {
        throw InvalidArgument("fake count outside the configured range");
    }
    if (!(bg.size() == layout.canvas())) throw InvalidArgument("background does not match the layout canvas");

    std::vector<const imaging::Sprite*> hands{&genuine[0], &genuine[1]};
    for (const auto& f : fakes) hands.push_back(&f);
    std::array<int, 9> cells{1, 2, 3, 4, 5, 6, 7, 8, 9};
    rng.shuffle(cells.begin(), cells.end());

    PlacementResult res;
    res.canvas = to_rgb(bg);
    const int h1 = spec.spacing / 2;
    for (std::size_t i = 0; i < hands.size(); ++i) {
        const imaging::Sprite& src = *hands[i];
        const Raster& img = src.image;
        const Rect cell = layout.cell(cells[i]);
        const Rect inner{cell.x + h1, cell.y + h1, cell.width - spec.spacing, cell.height - spec.spacing};

        bool placed = false;
        for (int attempt = 0; attempt < spec.placement_attempts && !placed; ++attempt) {
            const int longer = rng.uniform_int(spec.hand_size_min, spec.hand_size_max);
            Size scaled;
            if (img.width() >= img.height()) {
                scaled = {longer, std::max(1, static_cast<int>(std::lround(1.0 * longer * img.height() / img.width())))};
            } else {
                scaled = {std::max(1, static_cast<int>(std::lround(1.0 * longer * img.width() / img.height()))), longer};
            }
            const double angle = rng.uniform(-spec.rotation_deg, spec.rotation_deg);
            const auto sprite =
                imaging::trim_to_mask(imaging::transform_sprite(src, scaled, angle, imaging::Resample::Bilinear));
            const int free_x = inner.width - sprite.image.width();
            const int free_y = inner.height - sprite.image.height();
            if (free_x < 0 || free_y < 0) continue;
            const Point at{inner.x + rng.uniform_int(0, free_x), inner.y + rng.uniform_int(0, free_y)};
            res.canvas = imaging::overlay(res.canvas, sprite, at);
            res.placements.push_back({cells[i], i < 2, i, scaled, angle,
                                      Rect{at.x, at.y, sprite.image.width(), sprite.image.height()}, sprite});
            placed = true;
        }
        if (!placed) {
            throw Error("layout failure: hand " + std::to_string(i) + " did not fit cell " + std::to_string(cells[i]) +
                        " in " + std::to_string(spec.placement_attempts) + " attempts");
        }
    }
    res.truth = {cells[0], cells[1]};
    res.occupied.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(hands.size()));
    std::sort(res.occupied.begin(), res.occupied.end());
    return res;
}

}  // namespace handcap::captcha
