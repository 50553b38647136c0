#include "handcap/threatmodel/threatmodel.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "handcap/common/error.hpp"

namespace handcap::threatmodel {

double rect_guess_probability(Dimensions canvas, Dimensions hand) {
    const double total = canvas.area();
    const double sg = hand.area();
    if (total <= 0 || hand.width < 0 || hand.height < 0) throw InvalidArgument("degenerate geometry");
    if (sg >= total) throw InvalidArgument("degenerate geometry");
    const double p1 = 2.0 * sg / total;
    const double p2 = sg / (total - sg);
    return p1 * p2;
}

double circ_guess_probability(Dimensions canvas, double radius) {
    const double total = canvas.area();
    const double disk = std::numbers::pi * radius * radius;
    if (radius < 0 || total <= 0 || disk >= total) throw InvalidArgument("degenerate geometry");
    const double p3 = 2.0 * disk / total;
    const double p4 = disk / (total - disk);
    return p3 * p4;
}

double equivalent_radius(Dimensions hand) { return std::sqrt(hand.area() / std::numbers::pi); }

double bot_far(std::uint64_t n_answers, std::uint64_t challenges) {
    if (n_answers == 0) throw InvalidArgument("bot_far needs at least one answer");
    return std::pow(1.0 / static_cast<double>(n_answers), static_cast<double>(challenges));
}

double permutations(std::uint64_t n, std::uint64_t picks) {
    if (picks > n) return 0.0;
    double p = 1.0;
    for (std::uint64_t i = 0; i < picks; ++i) p *= static_cast<double>(n - i);
    return p;
}

OnlineGuess online_guess_probability(std::uint64_t genuine_classes, double dim_gap,
                                     double pixel_fraction, std::uint64_t grid_slots,
                                     std::uint64_t picks) {
    if (genuine_classes == 0) throw InvalidArgument("need at least one genuine class");
    if (dim_gap < 1) throw InvalidArgument("dimension gap must be >= 1");
    if (!(pixel_fraction > 0 && pixel_fraction <= 1)) {
        throw InvalidArgument("pixel fraction must lie in (0, 1]");
    }
    OnlineGuess g;
    g.p_hand_type = 1.0 / (2.0 * static_cast<double>(genuine_classes));
    // (1/gap^2)^2 with the gap shrunk to the fraction of pixels that must match.
    const double effective_gap = std::max(1.0, pixel_fraction * dim_gap);
    g.p_size = std::pow(1.0 / (effective_gap * effective_gap), 2.0);
    g.p_location = 1.0 / permutations(grid_slots, picks);
    g.p_total = g.p_hand_type * g.p_size * g.p_location;
    return g;
}

double segmentation_complexity_ratio(int n1, int n2, double beta) {
    if (!(beta > 1.0)) throw InvalidArgument("beta must exceed 1");
    return std::pow(beta, n1 - n2);
}

double search_space(std::uint64_t genuine_classes, double dim_gap, double grid_perms) {
    const double sq = dim_gap * dim_gap;
    return 2.0 * static_cast<double>(genuine_classes) * sq * sq * grid_perms;
}

double search_time_estimate(std::uint64_t genuine_classes, double dim_gap, double grid_perms,
                            double per_pixel_cost_s) {
    if (per_pixel_cost_s < 0) throw InvalidArgument("per-pixel cost must be non-negative");
    return search_space(genuine_classes, dim_gap, grid_perms) * per_pixel_cost_s;
}

double grid_guess_probability(std::uint64_t cells, bool ordered) {
    const double perms = permutations(cells, 2);
    if (perms == 0) throw InvalidArgument("need at least two cells");
    return ordered ? 1.0 / perms : 2.0 / perms;
}

SecurityReport security_report(const ReportParams& p, double hand_max) {
    SecurityReport r;
    const Dimensions canvas{p.canvas_width, p.canvas_height};
    r.p_rect = rect_guess_probability(canvas, {p.hand_width, p.hand_height});
    r.p_rect_max = rect_guess_probability(canvas, {hand_max, hand_max});
    r.p_circ = circ_guess_probability(canvas, p.click_radius);
    r.far_bot = bot_far(p.n_answers, p.challenges);
    r.online = online_guess_probability(p.genuine_classes, p.dim_gap, p.pixel_fraction, p.grid_slots,
                                        p.picks);
    r.complexity_ratio = segmentation_complexity_ratio(p.objects, p.baseline_objects, p.beta);
    const double perms = permutations(p.grid_slots, p.picks);
    r.search_space = search_space(p.genuine_classes, p.dim_gap, perms);
    r.search_time_s = search_time_estimate(p.genuine_classes, p.dim_gap, perms, p.per_pixel_cost_s);
    r.p_grid_ordered = grid_guess_probability(p.grid_slots, true);
    r.p_grid_unordered = grid_guess_probability(p.grid_slots, false);
    if (p.p_human) {
        r.p_human = p.p_human;
        r.p_machine = r.far_bot;
        r.recognizability_gap = *p.p_human - r.far_bot;
    }
    return r;
}

std::string to_json(const SecurityReport& r, int indent) {
    nlohmann::json j;
    j["p_rect"] = r.p_rect;
    j["p_rect_max"] = r.p_rect_max;
    j["p_circ"] = r.p_circ;
    j["far_bot"] = r.far_bot;
    j["online"] = {{"p_hand_type", r.online.p_hand_type},
                   {"p_size", r.online.p_size},
                   {"p_location", r.online.p_location},
                   {"p_total", r.online.p_total}};
    j["complexity_ratio"] = r.complexity_ratio;
    j["search_space"] = r.search_space;
    j["search_time_s"] = r.search_time_s;
    j["p_grid_ordered"] = r.p_grid_ordered;
    j["p_grid_unordered"] = r.p_grid_unordered;
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
    j["p_human"] = opt(r.p_human);
    j["p_machine"] = opt(r.p_machine);
    j["recognizability_gap"] = opt(r.recognizability_gap);
    return j.dump(indent);
}

}  // namespace handcap::threatmodel
