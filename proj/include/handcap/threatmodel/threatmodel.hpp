#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace handcap::threatmodel {

struct Dimensions {
    double width = 0;
    double height = 0;
    double area() const { return width * height; }
};

/// Probability that a random click lands on one genuine hand and then on the
/// other, with rectangular hand regions of size hand on a canvas.
/// Throws "degenerate geometry" when the hand area reaches the canvas area.
double rect_guess_probability(Dimensions canvas, Dimensions hand);

/// Same chain with circular click-tolerance regions of radius r.
double circ_guess_probability(Dimensions canvas, double radius);

/// Radius of the circle with the same area as an m x n rectangle.
double equivalent_radius(Dimensions hand);

/// (1 / n_answers)^challenges.
double bot_far(std::uint64_t n_answers, std::uint64_t challenges);

struct OnlineGuess {
    double p_hand_type = 0;   // 1 / (2 N_G)
    double p_size = 0;        // dimension match
    double p_location = 0;    // 1 / P(grid_slots, picks)
    double p_total = 0;       // product of the three
};

/// Learned-image online guessing chain. pixel_fraction scales the dimension
/// gap (1.0 = attacker must match every pixel; 0.1 = only a tenth suffices).
OnlineGuess online_guess_probability(std::uint64_t genuine_classes, double dim_gap,
                                     double pixel_fraction = 1.0, std::uint64_t grid_slots = 9,
                                     std::uint64_t picks = 2);

/// Number of ordered selections of `picks` out of `n`.
double permutations(std::uint64_t n, std::uint64_t picks);

/// beta^(n1 - n2): relative cost of segmenting n1 vs n2 objects.
double segmentation_complexity_ratio(int n1, int n2, double beta);

/// Search space 2 N_G * (dim_gap^2)^2 * grid_perms times the cost of one test.
double search_space(std::uint64_t genuine_classes, double dim_gap, double grid_perms);
double search_time_estimate(std::uint64_t genuine_classes, double dim_gap, double grid_perms,
                            double per_pixel_cost_s);

/// Random guessing over grid cells: 1 / (9 * 8) ordered, 1 / C(9, 2) unordered.
double grid_guess_probability(std::uint64_t cells, bool ordered);

struct ReportParams {
    double canvas_width = 460;
    double canvas_height = 460;
    double hand_width = 100;
    double hand_height = 100;
    double click_radius = 62;
    std::uint64_t n_answers = 9;
    std::uint64_t challenges = 2;
    std::uint64_t genuine_classes = 500;
    double dim_gap = 51;
    double pixel_fraction = 1.0;
    std::uint64_t grid_slots = 9;
    std::uint64_t picks = 2;
    int objects = 9;
    int baseline_objects = 6;
    double beta = 2.0;
    double per_pixel_cost_s = 1e-9;
    std::optional<double> p_human;  // measured, e.g. from session statistics
};

struct SecurityReport {
    double p_rect = 0;
    double p_rect_max = 0;  // largest hand size of the range (150 x 150 by default)
    double p_circ = 0;
    double far_bot = 0;
    OnlineGuess online;
    double complexity_ratio = 0;
    double search_space = 0;
    double search_time_s = 0;
    double p_grid_ordered = 0;
    double p_grid_unordered = 0;
    std::optional<double> p_human;
    std::optional<double> p_machine;
    std::optional<double> recognizability_gap;
};

SecurityReport security_report(const ReportParams& params, double hand_max = 150);

std::string to_json(const SecurityReport& report, int indent = 2);

}  // namespace handcap::threatmodel
