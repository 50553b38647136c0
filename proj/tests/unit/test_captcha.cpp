#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "handcap/captcha/generator.hpp"
#include "handcap/captcha/solution.hpp"
#include "handcap/common/error.hpp"
#include "handcap/imaging/png_io.hpp"

using namespace handcap;
using namespace handcap::captcha;
namespace fs = std::filesystem;

namespace {

const StoreSet& small_stores() {
    static const StoreSet s = synthetic_stores(3, 4, 9, 21);
    return s;
}

fs::path temp_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / (std::string("handcap_captcha_") + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<imaging::Sprite> fake_sprites(std::size_t n) {
    std::vector<imaging::Sprite> out;
    const auto& st = small_stores().fakes;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& label = st.labels()[i % st.size()];
        out.push_back({st.images(label)[0], st.rois(label)[0]});
    }
    return out;
}

std::array<imaging::Sprite, 2> genuine_sprites() {
    const auto& st = small_stores().genuine;
    const auto& label = st.labels()[0];
    return {imaging::Sprite{st.images(label)[0], st.rois(label)[0]},
            imaging::Sprite{st.images(label)[1], st.rois(label)[1]}};
}

}  // namespace

TEST_CASE("grid labels are column-major and tile the canvas") {
    const GridLayout g({460, 460});
    CHECK(g.cell(1) == Rect{0, 0, 153, 153});
    CHECK(g.cell(2) == Rect{0, 153, 153, 153});
    CHECK(g.cell(4) == Rect{153, 0, 153, 153});
    CHECK(g.cell(9) == Rect{306, 306, 154, 154});
    long area = 0;
    for (int a = 1; a <= 9; ++a) {
        area += static_cast<long>(g.cell(a).width) * g.cell(a).height;
        for (int b = a + 1; b <= 9; ++b) CHECK_FALSE(g.cell(a).intersects(g.cell(b)));
    }
    CHECK(area == 460L * 460);
    for (int y = 0; y < 460; y += 7) {
        for (int x = 0; x < 460; x += 7) {
            const int label = g.label_at({x, y});
            const Rect c = g.cell(label);
            CHECK((x >= c.x && x < c.right() && y >= c.y && y < c.bottom()));
        }
    }
    CHECK(g.label_at({-1, 5}) == 0);
    CHECK(g.label_at({460, 5}) == 0);
    CHECK_THROWS_AS(g.cell(0), InvalidArgument);
    CHECK_THROWS_AS(g.cell(10), InvalidArgument);
}

TEST_CASE("challenge spec validation") {
    ChallengeSpec s;
    CHECK_NOTHROW(s.validate());
    ChallengeSpec bad = s;
    bad.n_fake_max = 8;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = s;
    bad.n_fake_min = 4;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = s;
    bad.shape_size_max = 31;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = s;
    bad.open_radius_max = 11;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = s;
    bad.noise_density_min = 0.01;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("random shapes") {
    ChallengeSpec spec;
    RandomSource rng(3);
    const auto shapes = random_shapes(spec, rng);
    REQUIRE(shapes.size() == 300);
    std::map<ShapeKind, std::set<std::pair<int, int>>> pos;
    for (const auto& s : shapes) {
        CHECK(s.position.x >= 0);
        CHECK(s.position.y >= 0);
        CHECK(s.position.x < 460);
        CHECK(s.position.y < 460);
        CHECK(s.size <= 30);
        CHECK(s.size >= spec.shape_size_min);
        CHECK(s.opacity >= spec.opacity_min);
        CHECK(s.opacity <= spec.opacity_max);
        pos[s.kind].insert({s.position.x, s.position.y});
    }
    for (auto kind : {ShapeKind::Circle, ShapeKind::Rectangle, ShapeKind::Star}) CHECK(pos[kind].size() == 100);
}

TEST_CASE("draw_shape blends with opacity") {
    Raster img(40, 40, 3, 100);
    ShapeSpec c;
    c.kind = ShapeKind::Circle;
    c.position = {20, 20};
    c.size = 10;
    c.color = {200, 0, 50};
    c.opacity = 0.5;
    draw_shape(img, c);
    CHECK(img.at(20, 20, 0) == 150);
    CHECK(img.at(20, 20, 1) == 50);
    CHECK(img.at(20, 20, 2) == 75);
    CHECK(img.at(25, 20, 0) == 150);  // on the rim
    CHECK(img.at(26, 20, 0) == 100);
    CHECK(img.at(24, 24, 0) == 100);  // corner of the box, outside the disk

    Raster star(40, 40, 3, 0);
    ShapeSpec s;
    s.kind = ShapeKind::Star;
    s.position = {20, 20};
    s.size = 30;
    s.color = {255, 255, 255};
    draw_shape(star, s);
    CHECK(star.at(20, 20) == 255);
    CHECK(star.at(20, 7) == 255);   // upper tip
    CHECK(star.at(28, 8) == 0);     // notch between tips
    std::size_t lit = 0;
    for (int y = 0; y < 40; ++y) {
        for (int x = 0; x < 40; ++x) lit += star.at(x, y) == 255;
    }
    // A 5-point star with inner radius r/2 covers ~0.37 of its circumscribed disk.
    CHECK(lit > 0.25 * 3.14159 * 15 * 15);
    CHECK(lit < 0.5 * 3.14159 * 15 * 15);
}

TEST_CASE("clutter_background") {
    ChallengeSpec spec;
    const Raster& bg = small_stores().backgrounds.images_at(0)[0];
    RandomSource a(5), b(5);
    std::vector<ShapeSpec> shapes;
    const Raster ca = clutter_background(bg, spec, a, &shapes);
    const Raster cb = clutter_background(bg, spec, b);
    CHECK(ca == cb);
    CHECK(shapes.size() == 300);
    CHECK(ca.size() == spec.canvas);
    CHECK(ca.channels() == 3);
    CHECK(ca != bg);

    RandomSource c(5);
    CHECK_THROWS_WITH_AS(clutter_background(Raster(400, 460, 3), spec, c), "background smaller than canvas",
                         InvalidArgument);
    RandomSource d(5);
    const Raster big = clutter_background(Raster(500, 480, 1, 90), spec, d);
    CHECK(big.size() == spec.canvas);
    CHECK(big.channels() == 3);
}

TEST_CASE("place_hands occupancy and spacing") {
    ChallengeSpec spec;
    const GridLayout layout(spec.canvas);
    const Raster bg(460, 460, 3, 40);
    for (int n_fake : {5, 6, 7}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            CAPTURE(n_fake);
            CAPTURE(seed);
            RandomSource rng(seed);
            const auto res = place_hands(bg, genuine_sprites(), fake_sprites(n_fake), layout, spec, rng);
            REQUIRE(res.placements.size() == static_cast<std::size_t>(2 + n_fake));
            CHECK(res.occupied.size() == static_cast<std::size_t>(2 + n_fake));
            CHECK(9 - res.occupied.size() == static_cast<std::size_t>(7 - n_fake));
            CHECK(res.truth[0] != res.truth[1]);
            CHECK(std::binary_search(res.occupied.begin(), res.occupied.end(), res.truth[0]));
            CHECK(std::binary_search(res.occupied.begin(), res.occupied.end(), res.truth[1]));
            CHECK(res.placements[0].genuine);
            CHECK(res.placements[1].genuine);
            CHECK(res.placements[0].cell == res.truth[0]);
            CHECK(res.placements[1].cell == res.truth[1]);

            for (std::size_t i = 0; i < res.placements.size(); ++i) {
                const auto& p = res.placements[i];
                CHECK(layout.cell(p.cell).contains(p.box));
                CHECK(Rect{2, 2, 456, 456}.contains(p.box));
                CHECK(std::max(p.scaled.width, p.scaled.height) >= spec.hand_size_min);
                CHECK(std::max(p.scaled.width, p.scaled.height) <= spec.hand_size_max);
                CHECK(std::abs(p.angle_deg) <= spec.rotation_deg);
                // Boxes keep the spacing: inflating one by spacing - 1 still leaves the other clear.
                for (std::size_t j = i + 1; j < res.placements.size(); ++j) {
                    CHECK_FALSE(p.box.inflated(spec.spacing - 1).intersects(res.placements[j].box));
                }
                // ROI pixels are the hand's, the rest of the box shows the background.
                for (int y = 0; y < p.box.height; y += 3) {
                    for (int x = 0; x < p.box.width; x += 3) {
                        const auto px = res.canvas.at(p.box.x + x, p.box.y + y, 0);
                        if (p.sprite.mask.at(x, y)) {
                            CHECK(px == p.sprite.image.at(x, y, 0));
                        } else {
                            CHECK(px == 40);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("place_hands rejects bad input and reports layout failure") {
    ChallengeSpec spec;
    const GridLayout layout(spec.canvas);
    const Raster bg(460, 460, 3, 40);
    RandomSource rng(1);
    CHECK_THROWS_AS(place_hands(bg, genuine_sprites(), fake_sprites(4), layout, spec, rng), InvalidArgument);
    CHECK_THROWS_AS(place_hands(bg, genuine_sprites(), fake_sprites(8), layout, spec, rng), InvalidArgument);

    ChallengeSpec huge = spec;
    huge.hand_size_min = 300;
    huge.hand_size_max = 300;
    huge.placement_attempts = 3;
    try {
        place_hands(bg, genuine_sprites(), fake_sprites(5), layout, huge, rng);
        FAIL("expected a layout failure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).rfind("layout failure", 0) == 0);
    }
}

TEST_CASE("generate_challenge invariants and determinism") {
    ChallengeSpec spec;
    const auto& st = small_stores();
    std::set<int> seen_fakes;
    for (std::uint64_t seed = 100; seed < 112; ++seed) {
        CAPTURE(seed);
        const Challenge ch = generate_challenge(st, spec, seed);
        CHECK(ch.image.size() == spec.canvas);
        CHECK(ch.image.channels() == 3);
        CHECK(ch.n_fake() >= 5);
        CHECK(ch.n_fake() <= 7);
        seen_fakes.insert(ch.n_fake());
        CHECK(ch.occupied_cells.size() == static_cast<std::size_t>(2 + ch.n_fake()));
        CHECK(ch.truth[0] != ch.truth[1]);
        CHECK(std::binary_search(ch.occupied_cells.begin(), ch.occupied_cells.end(), ch.truth[0]));
        CHECK(std::binary_search(ch.occupied_cells.begin(), ch.occupied_cells.end(), ch.truth[1]));
        CHECK(std::set<std::string>(ch.fakes.begin(), ch.fakes.end()).size() == ch.fakes.size());
        CHECK(ch.id == challenge_id(seed));

        const Challenge again = generate_challenge(st, spec, seed);
        CHECK(again.image == ch.image);
        CHECK(again.truth == ch.truth);
        CHECK(again.occupied_cells == ch.occupied_cells);
        CHECK(again.genuine_class == ch.genuine_class);
        CHECK(again.fakes == ch.fakes);
    }
    CHECK(seen_fakes.size() >= 2);
    CHECK(generate_challenge(st, spec, 1).image != generate_challenge(st, spec, 2).image);
}

TEST_CASE("final blend and gamma") {
    // With alpha 0 and gamma 1 the challenge is exactly the composed canvas,
    // so outside every hand box it equals the cluttered background.
    ChallengeSpec spec;
    spec.alpha = 0;
    spec.gamma = 1;
    const auto& st = small_stores();
    const Challenge ch = generate_challenge(st, spec, 77);
    RandomSource rng(77);
    rng.index(st.backgrounds.size());
    const Raster cluttered = clutter_background(st.backgrounds.images(ch.background)[0], spec, rng);
    std::size_t checked = 0;
    for (int y = 0; y < 460; y += 5) {
        for (int x = 0; x < 460; x += 5) {
            bool in_box = false;
            for (const auto& p : ch.placements) {
                in_box |= x >= p.box.x && x < p.box.right() && y >= p.box.y && y < p.box.bottom();
            }
            if (in_box) continue;
            CHECK(ch.image.at(x, y, 1) == cluttered.at(x, y, 1));
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("generate_challenge errors") {
    ChallengeSpec spec;
    StoreSet empty;
    CHECK_THROWS_WITH_AS(generate_challenge(empty, spec, 1), "empty store: background", InvalidArgument);
    StoreSet partial;
    partial.backgrounds.add("b", {Raster(460, 460, 3, 10)});
    CHECK_THROWS_WITH_AS(generate_challenge(partial, spec, 1), "empty store: genuine", InvalidArgument);
}

TEST_CASE("sidecar withholds the truth") {
    const Challenge ch = generate_challenge(small_stores(), ChallengeSpec{}, 9);
    const auto j = sidecar_json(ch);
    std::set<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.insert(k);
    CHECK(keys == std::set<std::string>{"id", "seed", "occupied_cells", "created_at", "spec"});
    CHECK(j.dump().find("truth") == std::string::npos);
    CHECK(j.dump().find(ch.genuine_class) == std::string::npos);
    CHECK(j["occupied_cells"].get<std::vector<int>>() == ch.occupied_cells);
    CHECK(ch.created_at.size() == 20);

    const ChallengeSpec back = spec_from_json(j["spec"]);
    CHECK(spec_to_json(back) == j["spec"]);

    const auto dir = temp_dir("sidecar");
    write_challenge(ch, dir / "public", dir / "private");
    CHECK(imaging::read_png(dir / "public" / (ch.id + ".png")) == ch.image);
    std::ifstream in(dir / "public" / (ch.id + ".json"));
    const auto parsed = nlohmann::json::parse(in);
    CHECK(parsed == j);
    std::ifstream tin(dir / "private" / (ch.id + ".truth.json"));
    const auto truth = nlohmann::json::parse(tin);
    CHECK(truth["truth"].get<std::array<int, 2>>() == ch.truth);
    fs::remove_all(dir);
}

TEST_CASE("verify_solution") {
    const std::array<int, 2> truth{3, 7};
    CHECK(verify_solution(truth, {3, 7}, 5).outcome == Outcome::Accept);
    CHECK(verify_solution(truth, {7, 3}, 5).outcome == Outcome::Accept);
    CHECK(verify_solution(truth, {7, 3}, 5, MatchMode::Ordered).outcome == Outcome::Reject);
    CHECK(verify_solution(truth, {3, 7}, 5, MatchMode::Ordered).outcome == Outcome::Accept);
    CHECK(verify_solution(truth, {3, 7}, 30).outcome == Outcome::Accept);
    CHECK(verify_solution(truth, {3, 7}, 31).outcome == Outcome::Timeout);
    CHECK(verify_solution(truth, {1, 2}, 31).outcome == Outcome::Timeout);
    CHECK(verify_solution(truth, {3, 8}, 5).reason == "incorrect");
    const auto bad = verify_solution(truth, {0, 7}, 5);
    CHECK(bad.outcome == Outcome::Reject);
    CHECK(bad.reason == "malformed");
    CHECK(verify_solution(truth, {3, 10}, 5).reason == "malformed");
    CHECK(verify_solution(truth, {3, 7}, -1).reason == "malformed");
    CHECK(verify_solution(truth, {3, 7}, std::nan("")).reason == "malformed");
    CHECK(outcome_name(Outcome::Timeout) == "timeout");
}

TEST_CASE("exactly one of 36 unordered and one of 72 ordered answers is accepted") {
    for (int a = 1; a <= 9; ++a) {
        for (int b = 1; b <= 9; ++b) {
            if (a == b) continue;
            const std::array<int, 2> truth{a, b};
            int unordered = 0, ordered = 0;
            for (int x = 1; x <= 9; ++x) {
                for (int y = 1; y <= 9; ++y) {
                    if (x == y) continue;
                    ordered += verify_solution(truth, {x, y}, 1, MatchMode::Ordered).outcome == Outcome::Accept;
                    if (x < y) unordered += verify_solution(truth, {x, y}, 1).outcome == Outcome::Accept;
                }
            }
            CHECK(unordered == 1);
            CHECK(ordered == 1);
        }
    }
}

TEST_CASE("entropy gap report") {
    const auto& st = small_stores();
    const Challenge ch = generate_challenge(st, ChallengeSpec{}, 31);
    const auto r = entropy_gap_report(ch, st);
    CHECK(r.genuine_difference >= 0);
    CHECK(r.fake_differences.size() == static_cast<std::size_t>(ch.n_fake()));
    CHECK(r.conditional.size() == ch.placements.size());
    for (double v : r.conditional) CHECK(v >= 0);
    CHECK(r.to_json().contains("conditional_mean"));

    // Identical genuine captures give a zero intra-class difference.
    StoreSet same;
    same.backgrounds.add("b", {st.backgrounds.images_at(0)[0]});
    const Raster& g = st.genuine.images_at(0)[0];
    same.genuine.add("twin", {g, g});
    for (std::size_t i = 0; i < st.fakes.size(); ++i) same.fakes.add(st.fakes.labels()[i], {st.fakes.images_at(i)[0]});
    const Challenge tc = generate_challenge(same, ChallengeSpec{}, 4);
    CHECK(entropy_gap_report(tc, same).genuine_difference == 0.0);
}

TEST_CASE("image store rules and disk round trip") {
    ImageStore g(StoreKind::Genuine);
    CHECK_THROWS_AS(g.add("a", {Raster(8, 8, 1)}), InvalidArgument);
    g.add("a", {Raster(8, 8, 1, 10), Raster(8, 8, 1, 20)});
    CHECK_THROWS_AS(g.add("a", {Raster(8, 8, 1), Raster(8, 8, 1)}), InvalidArgument);
    ImageStore f(StoreKind::Fake);
    CHECK_THROWS_AS(f.add("x", {Raster(8, 8, 1), Raster(8, 8, 1)}), InvalidArgument);

    const auto dir = temp_dir("store");
    small_stores().save(dir);
    CHECK(fs::exists(dir / "genuine" / small_stores().genuine.labels()[0] / "1.png"));
    CHECK(fs::exists(dir / "fakes" / (small_stores().fakes.labels()[0] + ".png")));
    const StoreSet back = StoreSet::load(dir);
    CHECK(back.backgrounds.size() == small_stores().backgrounds.size());
    CHECK(back.genuine.size() == small_stores().genuine.size());
    CHECK(back.fakes.size() == small_stores().fakes.size());
    for (const auto& label : back.genuine.labels()) {
        CHECK(back.genuine.images(label) == small_stores().genuine.images(label));
    }
    // Same stores from disk give the same challenge.
    CHECK(generate_challenge(back, ChallengeSpec{}, 8).image ==
          generate_challenge(small_stores(), ChallengeSpec{}, 8).image);

    imaging::write_png(dir / "genuine" / back.genuine.labels()[0] / "3.png", Raster(4, 4, 1));
    try {
        ImageStore::load(dir / "genuine", StoreKind::Genuine);
        FAIL("expected malformed store");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).rfind("malformed store", 0) == 0);
    }
    CHECK_THROWS_AS(ImageStore::load(dir / "nope", StoreKind::Fake), IoError);
    fs::remove_all(dir);
}
