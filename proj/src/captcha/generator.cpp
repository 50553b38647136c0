#include "handcap/captcha/generator.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>

#include "handcap/common/error.hpp"
#include "handcap/imaging/ops.hpp"
#include "handcap/imaging/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace handcap::captcha {

std::string challenge_id(std::uint64_t seed) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "ch-%016llx", static_cast<unsigned long long>(imaging::mix_seed(seed)));
    return buf;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Challenge generate_challenge(const StoreSet& stores, const ChallengeSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (stores.backgrounds.empty()) throw InvalidArgument("empty store: background");
    if (stores.genuine.empty()) throw InvalidArgument("empty store: genuine");
    if (stores.fakes.empty()) throw InvalidArgument("empty store: fake");

    RandomSource rng(seed);
    Challenge ch;
    ch.id = challenge_id(seed);
    ch.seed = seed;
    ch.spec = spec;

    // Background selection and cluttering; the cluttered copy is kept for the final blend.
    ch.background = stores.backgrounds.labels()[rng.index(stores.backgrounds.size())];
    const Raster cluttered = clutter_background(stores.backgrounds.images(ch.background)[0], spec, rng);

    ch.genuine_class = stores.genuine.labels()[rng.index(stores.genuine.size())];
    const auto& pair = stores.genuine.images(ch.genuine_class);
    const auto& pair_roi = stores.genuine.rois(ch.genuine_class);

    const int n_fake = rng.uniform_int(spec.n_fake_min, spec.n_fake_max);
    std::vector<std::size_t> order(stores.fakes.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<imaging::Sprite> fakes;
    if (order.size() >= static_cast<std::size_t>(n_fake)) {
        // Partial Fisher-Yates: n_fake distinct fakes.
        for (int j = 0; j < n_fake; ++j) {
            const std::size_t k = j + rng.index(order.size() - j);
            std::swap(order[j], order[k]);
            ch.fakes.push_back(stores.fakes.labels()[order[j]]);
        }
    } else {
        for (int j = 0; j < n_fake; ++j) ch.fakes.push_back(stores.fakes.labels()[rng.index(order.size())]);
    }
    for (const auto& label : ch.fakes) {
        fakes.push_back({stores.fakes.images(label)[0], stores.fakes.rois(label)[0]});
    }

    const GridLayout layout(spec.canvas);
    const std::array<imaging::Sprite, 2> genuine{imaging::Sprite{pair[0], pair_roi[0]},
                                                 imaging::Sprite{pair[1], pair_roi[1]}};
    auto placed = place_hands(cluttered, genuine, fakes, layout, spec, rng);

    const Raster blended = imaging::alpha_blend(cluttered, placed.canvas, spec.alpha);
    ch.image = imaging::gamma_correct(blended, spec.gamma);
    ch.truth = placed.truth;
    ch.occupied_cells = std::move(placed.occupied);
    ch.placements = std::move(placed.placements);
    ch.created_at = utc_timestamp();
    return ch;
}

Challenge generate_challenge_retrying(const StoreSet& stores, const ChallengeSpec& spec, std::uint64_t seed,
                                      int tries) {
    for (int k = 0;; ++k) {
        const std::uint64_t s = k == 0 ? seed : imaging::mix_seed(seed + static_cast<std::uint64_t>(k));
        try {
            return generate_challenge(stores, spec, s);
        } catch (const Error& e) {
            if (k + 1 >= tries || std::string(e.what()).rfind("layout failure", 0) != 0) throw;
        }
    }
}

json spec_to_json(const ChallengeSpec& s) {
    return json{{"canvas", {s.canvas.width, s.canvas.height}},
                {"n_genuine", s.n_genuine},
                {"n_fake_range", {s.n_fake_min, s.n_fake_max}},
                {"shapes_per_kind", s.shapes_per_kind},
                {"shape_size_range", {s.shape_size_min, s.shape_size_max}},
                {"opacity_range", {s.opacity_min, s.opacity_max}},
                {"alpha", s.alpha},
                {"gamma", s.gamma},
                {"hand_size_range", {s.hand_size_min, s.hand_size_max}},
                {"rotation_deg", s.rotation_deg},
                {"noise_density_range", {s.noise_density_min, s.noise_density_max}},
                {"open_radius_range", {s.open_radius_min, s.open_radius_max}},
                {"spacing", s.spacing},
                {"placement_attempts", s.placement_attempts}};
}

ChallengeSpec spec_from_json(const json& j) {
    ChallengeSpec s;
    auto pair_int = [&](const char* key, int& a, int& b) {
        if (!j.contains(key)) return;
        a = j.at(key).at(0).get<int>();
        b = j.at(key).at(1).get<int>();
    };
    auto pair_double = [&](const char* key, double& a, double& b) {
        if (!j.contains(key)) return;
        a = j.at(key).at(0).get<double>();
        b = j.at(key).at(1).get<double>();
    };
    pair_int("canvas", s.canvas.width, s.canvas.height);
    s.n_genuine = j.value("n_genuine", s.n_genuine);
    pair_int("n_fake_range", s.n_fake_min, s.n_fake_max);
    s.shapes_per_kind = j.value("shapes_per_kind", s.shapes_per_kind);
    pair_int("shape_size_range", s.shape_size_min, s.shape_size_max);
    pair_double("opacity_range", s.opacity_min, s.opacity_max);
    s.alpha = j.value("alpha", s.alpha);
    s.gamma = j.value("gamma", s.gamma);
    pair_int("hand_size_range", s.hand_size_min, s.hand_size_max);
    s.rotation_deg = j.value("rotation_deg", s.rotation_deg);
    pair_double("noise_density_range", s.noise_density_min, s.noise_density_max);
    pair_int("open_radius_range", s.open_radius_min, s.open_radius_max);
    s.spacing = j.value("spacing", s.spacing);
    s.placement_attempts = j.value("placement_attempts", s.placement_attempts);
    s.validate();
    return s;
}

json sidecar_json(const Challenge& ch) {
    return json{{"id", ch.id},
                {"seed", ch.seed},
                {"occupied_cells", ch.occupied_cells},
                {"created_at", ch.created_at},
                {"spec", spec_to_json(ch.spec)}};
}

void write_challenge(const Challenge& ch, const fs::path& dir, const fs::path& truth_dir) {
    fs::create_directories(dir);
    imaging::write_png(dir / (ch.id + ".png"), ch.image);
    std::ofstream(dir / (ch.id + ".json")) << sidecar_json(ch).dump(2) << '\n';
    if (!truth_dir.empty()) {
        fs::create_directories(truth_dir);
        const json truth{{"id", ch.id}, {"truth", ch.truth}, {"genuine_class", ch.genuine_class}};
        std::ofstream(truth_dir / (ch.id + ".truth.json")) << truth.dump(2) << '\n';
    }
}

json EntropyGapReport::to_json() const {
    return json{{"genuine_difference", genuine_difference},
                {"fake_differences", fake_differences},
                {"fake_difference_mean", fake_difference_mean},
                {"conditional", conditional},
                {"conditional_mean", conditional_mean}};
}

EntropyGapReport entropy_gap_report(const Challenge& ch, const StoreSet& stores) {
    EntropyGapReport r;
    const auto& pair = stores.genuine.images(ch.genuine_class);
    r.genuine_difference =
        std::abs(imaging::entropy(imaging::to_grayscale(pair[0])) - imaging::entropy(imaging::to_grayscale(pair[1])));

    std::vector<double> h;
    for (const auto& label : ch.fakes) {
        h.push_back(imaging::entropy(imaging::to_grayscale(stores.fakes.images(label)[0])));
    }
    for (std::size_t i = 0; i < h.size() && h.size() > 1; ++i) {
        r.fake_differences.push_back(std::abs(h[i] - h[(i + 1) % h.size()]));
    }
    if (!r.fake_differences.empty()) {
        r.fake_difference_mean = std::accumulate(r.fake_differences.begin(), r.fake_differences.end(), 0.0) /
                                 static_cast<double>(r.fake_differences.size());
    }

    const Raster gray = imaging::to_grayscale(ch.image);
    for (const auto& p : ch.placements) {
        r.conditional.push_back(
            imaging::conditional_entropy(gray.crop(p.box), imaging::to_grayscale(p.sprite.image)));
    }
    if (!r.conditional.empty()) {
        r.conditional_mean =
            std::accumulate(r.conditional.begin(), r.conditional.end(), 0.0) / static_cast<double>(r.conditional.size());
    }
    return r;
}

}  // namespace handcap::captcha
