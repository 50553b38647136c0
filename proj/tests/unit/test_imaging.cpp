#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "handcap/common/error.hpp"
#include "handcap/imaging/binary.hpp"
#include "handcap/imaging/morphology.hpp"
#include "handcap/imaging/ops.hpp"
#include "handcap/imaging/png_io.hpp"
#include "handcap/imaging/transform.hpp"

using namespace handcap;
using namespace handcap::imaging;

namespace {

Raster random_gray(RandomSource& rng, int w, int h, int levels = 256) {
    Raster r(w, h, 1);
    for (auto& v : r.data()) v = static_cast<std::uint8_t>(rng.uniform_int(0, levels - 1));
    return r;
}

// Direct per-pixel erosion/dilation over the disk, used as an oracle.
Raster brute_morph(const Raster& img, int radius, bool erode_op) {
    Raster out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            int best = erode_op ? 255 : 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dx * dx + dy * dy > radius * radius) continue;
                    const int xx = x + dx, yy = y + dy;
                    if (xx < 0 || yy < 0 || xx >= img.width() || yy >= img.height()) continue;
                    best = erode_op ? std::min<int>(best, img.at(xx, yy)) : std::max<int>(best, img.at(xx, yy));
                }
            }
            out.at(x, y) = static_cast<std::uint8_t>(best);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("to_grayscale") {
    Raster white(4, 3, 3, 255);
    auto g = to_grayscale(white);
    CHECK(g.channels() == 1);
    CHECK(std::all_of(g.data().begin(), g.data().end(), [](auto v) { return v == 255; }));

    Raster red(5, 5, 3, 0);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) red.at(x, y, 0) = 255;
    auto gr = to_grayscale(red);
    // 0.299 * 255 = 76.245
    CHECK(std::all_of(gr.data().begin(), gr.data().end(), [](auto v) { return v == 76; }));

    RandomSource rng(1);
    Raster one = random_gray(rng, 7, 6);
    CHECK(to_grayscale(one) == one);
}

TEST_CASE("gaussian_degrade") {
    const auto k = gaussian_kernel_3x3(0.5);
    double sum = 0;
    for (double w : k) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    // exp(-d^2 / (2 * 0.25)) -> 1, e^-2 (edge), e^-4 (corner)
    const double e2 = std::exp(-2.0), e4 = std::exp(-4.0);
    const double norm = 1 + 4 * e2 + 4 * e4;
    CHECK(k[4] == doctest::Approx(1 / norm).epsilon(1e-12));
    CHECK(k[1] == doctest::Approx(e2 / norm).epsilon(1e-12));
    CHECK(k[0] == doctest::Approx(e4 / norm).epsilon(1e-12));

    RealImage dot(3, 3, 0.0);
    dot.at(1, 1) = 200.0;
    auto out = gaussian_degrade(dot);
    CHECK(out.at(1, 1) == doctest::Approx(200 / norm).epsilon(1e-12));
    CHECK(out.at(0, 0) == doctest::Approx(200 * e4 / norm).epsilon(1e-12));
    CHECK(out.at(1, 0) == doctest::Approx(200 * e2 / norm).epsilon(1e-12));

    Raster flat(9, 7, 1, 93);
    CHECK(gaussian_degrade(flat) == flat);

    CHECK_THROWS_WITH_AS(gaussian_degrade(Raster(2, 5, 1)), "degenerate image", InvalidArgument);
}

TEST_CASE("entropy") {
    CHECK(entropy(Raster(10, 10, 1, 17)) == 0.0);
    Raster half(10, 10, 1, 0);
    for (int i = 0; i < 50; ++i) half.data()[i] = 200;
    CHECK(entropy(half) == doctest::Approx(1.0));
    Raster four(4, 4, 1);
    for (int i = 0; i < 16; ++i) four.data()[i] = static_cast<std::uint8_t>((i % 4) * 60);
    CHECK(entropy(four) == doctest::Approx(2.0));
}

TEST_CASE("conditional_entropy") {
    RandomSource rng(7);
    Raster u = random_gray(rng, 64, 64);
    CHECK(conditional_entropy(u, u) == doctest::Approx(0.0));
    CHECK(conditional_entropy(Raster(64, 64, 1, 5), u) == doctest::Approx(0.0));

    // Brute-force oracle over the joint histogram.
    Raster v = random_gray(rng, 64, 64, 4);
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> pv;
    const double n = 64.0 * 64.0;
    for (std::size_t i = 0; i < u.data().size(); ++i) {
        joint[{u.data()[i], v.data()[i]}] += 1 / n;
        pv[v.data()[i]] += 1 / n;
    }
    double oracle = 0;
    for (auto& [key, p] : joint) oracle -= p * std::log2(p / pv[key.second]);
    CHECK(conditional_entropy(u, v) == doctest::Approx(oracle).epsilon(1e-12));

    CHECK(conditional_entropy(u, Raster(64, 64, 1, 3)) == doctest::Approx(entropy(u)).epsilon(1e-12));
    CHECK_THROWS_AS(conditional_entropy(u, Raster(63, 64, 1)), InvalidArgument);
}

TEST_CASE("entropy properties on random images") {
    RandomSource rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int levels = rng.uniform_int(1, 256);
        Raster u = random_gray(rng, rng.uniform_int(1, 40), rng.uniform_int(1, 40), levels);
        Raster v = random_gray(rng, u.width(), u.height(), rng.uniform_int(1, 256));
        const double h = entropy(u);
        CHECK(h >= 0.0);
        CHECK(h <= 8.0);
        CHECK(conditional_entropy(u, v) <= h + 1e-9);
    }
}

TEST_CASE("alpha_blend") {
    Raster fg(3, 2, 1, 200), bg(3, 2, 1, 100);
    CHECK(alpha_blend(fg, bg, 1.0) == fg);
    CHECK(alpha_blend(fg, bg, 0.0) == bg);
    CHECK(alpha_blend(fg, bg, 0.25).at(1, 1) == 125);
    CHECK_THROWS_AS(alpha_blend(fg, bg, 1.5), InvalidArgument);
    CHECK_THROWS_AS(alpha_blend(fg, bg, -0.1), InvalidArgument);

    RandomSource rng(3);
    for (int t = 0; t < 20; ++t) {
        Raster img = random_gray(rng, 9, 9);
        CHECK(alpha_blend(img, img, rng.uniform()) == img);
    }
}

TEST_CASE("gamma_correct") {
    RandomSource rng(5);
    Raster img = random_gray(rng, 16, 16);
    CHECK(gamma_correct(img, 1.0) == img);
    Raster ends(2, 1, 1);
    ends.at(0, 0) = 0;
    ends.at(1, 0) = 255;
    for (double g : {0.3, 1.5, 2.5, 7.0}) CHECK(gamma_correct(ends, g) == ends);

    // 255 * (64/255)^0.4 = 146.68
    Raster one(1, 1, 1, 64);
    const int v = gamma_correct(one, 2.5).at(0, 0);
    CHECK(std::abs(v - 146) <= 1);
    CHECK(v == static_cast<int>(std::lround(255 * std::pow(64 / 255.0, 0.4))));

    CHECK_THROWS_AS(gamma_correct(img, 0.0), InvalidArgument);
    CHECK_THROWS_AS(gamma_correct(img, -1.0), InvalidArgument);

    Raster ramp(256, 1, 1);
    for (int i = 0; i < 256; ++i) ramp.at(i, 0) = static_cast<std::uint8_t>(i);
    for (double g : {0.5, 1.5, 2.0, 2.5}) {
        auto out = gamma_correct(ramp, g);
        for (int i = 1; i < 256; ++i) CHECK(out.at(i, 0) >= out.at(i - 1, 0));
    }
}

TEST_CASE("morphology matches brute force") {
    RandomSource rng(21);
    for (int r : {0, 1, 3, 5, 10}) {
        Raster img = random_gray(rng, 23, 19);
        CHECK(erode(img, r) == brute_morph(img, r, true));
        CHECK(dilate(img, r) == brute_morph(img, r, false));
    }
    Raster rgb(12, 9, 3);
    for (auto& v : rgb.data()) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    auto opened = open_with_disk(rgb, 2);
    for (int c = 0; c < 3; ++c) {
        auto plane = rgb.channel(c);
        CHECK(opened.channel(c) == brute_morph(brute_morph(plane, 2, true), 2, false));
    }
}

TEST_CASE("morphological_open") {
    Raster flat(21, 21, 1, 80);
    CHECK(morphological_open(flat, 5) == flat);

    Raster speck(21, 21, 1, 40);
    speck.at(10, 10) = 250;
    speck.at(11, 10) = 250;
    auto cleaned = morphological_open(speck, 5);
    CHECK(cleaned == brute_morph(brute_morph(speck, 5, true), 5, false));
    CHECK(cleaned.at(10, 10) == 40);
    CHECK(cleaned == Raster(21, 21, 1, 40));

    RandomSource rng(4);
    for (int t = 0; t < 10; ++t) {
        Raster img = random_gray(rng, 30, 25);
        const int r = rng.uniform_int(5, 10);
        auto once = morphological_open(img, r);
        CHECK(morphological_open(once, r) == once);
        for (std::size_t i = 0; i < img.data().size(); ++i) CHECK(once.data()[i] <= img.data()[i]);
    }
    CHECK_THROWS_AS(morphological_open(flat, 4), InvalidArgument);
    CHECK_THROWS_AS(morphological_open(flat, 11), InvalidArgument);
}

TEST_CASE("salt_pepper_noise") {
    Raster img(100, 100, 1, 128);
    RandomSource rng(99);
    auto noisy = salt_pepper_noise(img, 0.02, rng);
    int corrupted = 0;
    for (auto v : noisy.data()) {
        if (v == 128) continue;
        ++corrupted;
        CHECK((v == 0 || v == 255));
    }
    // Binomial(10^4, 0.02): mean 200, sigma = sqrt(10^4 * 0.02 * 0.98) = 14
    CHECK(std::abs(corrupted - 200) <= 3 * 14);

    RandomSource a(5), b(5);
    CHECK(salt_pepper_noise(img, 0.03, a) == salt_pepper_noise(img, 0.03, b));
    CHECK_THROWS_AS(salt_pepper_noise(img, 0.01, a), InvalidArgument);
    CHECK_THROWS_AS(salt_pepper_noise(img, 0.06, a), InvalidArgument);
}

TEST_CASE("composite_transform") {
    Raster canvas(20, 20, 1, 9);
    Raster img(20, 20, 1, 200);
    Raster roi(20, 20, 1, 0);
    for (int y = 5; y < 10; ++y)
        for (int x = 3; x < 8; ++x) roi.at(x, y) = 255;
    auto out = composite_transform(img, roi, {20, 20}, 0.0, {0, 0}, canvas);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x) CHECK(out.at(x, y) == (roi.at(x, y) ? 200 : 9));

    CHECK(rotated_bounds({40, 25}, 90.0) == Size{25, 40});
    CHECK(rotated_bounds({40, 25}, -90.0) == Size{25, 40});
    Sprite s{Raster(40, 25, 1, 50), Raster(40, 25, 1, 255)};
    CHECK(rotate(s, 90.0, Resample::Bilinear).image.size() == Size{25, 40});

    const int expected = static_cast<int>(std::ceil(100 * (std::cos(std::numbers::pi / 6) + 0.5)));
    CHECK(expected == 137);
    Sprite big{Raster(150, 150, 3, 70), Raster(150, 150, 1, 255)};
    auto t = transform_sprite(big, {100, 100}, 30.0, Resample::Bilinear);
    CHECK(t.image.size() == Size{expected, expected});

    Raster small_canvas(100, 100, 1);
    CHECK_THROWS_WITH_AS(composite_transform(img, std::nullopt, {20, 20}, 45.0, {80, 80}, small_canvas),
                         "placement overflow", InvalidArgument);
}

TEST_CASE("foreground_mask picks the object, not the border") {
    Raster scan(40, 30, 1, 20);
    for (int y = 8; y < 22; ++y)
        for (int x = 10; x < 30; ++x) scan.at(x, y) = 210;
    auto m = foreground_mask(scan);
    CHECK(count_nonzero(m) == 14 * 20);
    CHECK(m.at(15, 15) == 255);
    CHECK(m.at(0, 0) == 0);
}

TEST_CASE("png round trip") {
    RandomSource rng(8);
    const auto dir = std::filesystem::temp_directory_path();
    for (int ch : {1, 3}) {
        Raster img(13, 7, ch);
        for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        const auto path = dir / ("handcap_png_" + std::to_string(ch) + ".png");
        write_png(path, img);
        CHECK(read_png(path) == img);
        CHECK(decode_png(encode_png(img)) == img);
        std::filesystem::remove(path);
    }
    std::vector<std::uint8_t> junk(32, 7);
    CHECK_THROWS_AS(decode_png(junk), IoError);
}
