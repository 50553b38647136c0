#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "handcap/common/error.hpp"
#include "handcap/imaging/random.hpp"
#include "handcap/synth/features.hpp"
#include "handcap/verify/forest.hpp"
#include "handcap/verify/knn.hpp"
#include "handcap/verify/matching.hpp"
#include "handcap/verify/roc.hpp"

using namespace handcap;
using namespace handcap::verify;
using handcap::imaging::RandomSource;

namespace {

// Independent k-NN: full sort of (distance, row), then explicit vote count.
int oracle_knn(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
               const std::vector<double>& probe, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double s = 0;
        for (std::size_t c = 0; c < probe.size(); ++c) s += (rows[r][c] - probe[c]) * (rows[r][c] - probe[c]);
        d.push_back({std::sqrt(s), r});
    }
    std::sort(d.begin(), d.end());
    std::map<int, std::pair<int, double>> votes;
    for (std::size_t i = 0; i < k; ++i) {
        votes[labels[d[i].second]].first += 1;
        votes[labels[d[i].second]].second += d[i].first;
    }
    int best = -1;
    double best_mean = 0;
    int best_votes = 0;
    for (const auto& [label, v] : votes) {
        const double mean = v.second / v.first;
        if (v.first > best_votes || (v.first == best_votes && mean < best_mean)) {
            best = label;
            best_votes = v.first;
            best_mean = mean;
        }
    }
    return best;
}

std::vector<double> random_vector(RandomSource& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform();
    return v;
}

TemplateStore store_from(const synth::FeatureSamples& pop, std::size_t dim, std::size_t enrolled) {
    std::vector<std::size_t> features(dim);
    for (std::size_t i = 0; i < dim; ++i) features[i] = i;
    TemplateStore store(features, "test");
    for (const auto& [id, rows] : pop) store.enroll(id, Samples(rows.begin(), rows.begin() + enrolled));
    store.fit_sigma();
    return store;
}

void check_monotone(const RocCurve& c) {
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        CHECK(c.points[i].threshold > c.points[i - 1].threshold);
        CHECK(c.points[i].far >= c.points[i - 1].far);
        CHECK(c.points[i].frr <= c.points[i - 1].frr);
    }
    for (const auto& p : c.points) CHECK(p.gar == doctest::Approx(1 - p.frr).epsilon(1e-15));
}

// Genuine distance: each probe to its own subject; imposter: each probe to
// every other subject.
RocCurve population_roc(double noise, std::uint64_t seed) {
    const auto pop = synth::feature_population(60, 3, 20, noise, seed);
    const auto split = rotation_split(pop, 0);
    std::vector<std::size_t> features(20);
    for (std::size_t i = 0; i < 20; ++i) features[i] = i;
    TemplateStore store(features, "t");
    for (const auto& [id, rows] : split.enrolled) store.enroll(id, rows);
    store.fit_sigma();
    std::vector<double> gen, imp;
    for (const auto& [id, probe] : split.probes) {
        for (const auto& other : store.subjects()) {
            (other == id ? gen : imp).push_back(claim_distance(probe, other, store));
        }
    }
    return roc(gen, imp);
}

}  // namespace

TEST_CASE("matrix rows, columns and selection") {
    auto m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 6);
    CHECK(m.column(1) == std::vector<double>{2, 5});
    const auto s = m.select_columns({2, 0});
    CHECK(s(0, 0) == 3);
    CHECK(s(1, 1) == 4);
    CHECK(m.select_rows({1}).row(0)[0] == 4);
    CHECK_THROWS_WITH_AS(Matrix::from_rows({{1, 2}, {3}}), "ragged rows", InvalidArgument);
    CHECK(euclidean(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == 5);
}

TEST_CASE("knn matches an exhaustive scan") {
    RandomSource rng(17);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        rows.push_back(random_vector(rng, 6));
        labels.push_back(static_cast<int>(rng.index(20)));
    }
    const auto x = Matrix::from_rows(rows);
    for (std::size_t k : {1u, 3u, 4u, 7u}) {
        for (int p = 0; p < 200; ++p) {
            const auto probe = random_vector(rng, 6);
            CHECK(knn_predict(x, labels, probe, k) == oracle_knn(rows, labels, probe, k));
        }
    }
}

TEST_CASE("knn vote ties fall to the closer label") {
    // Two votes each for labels 1 and 2; label 2's voters are closer on average.
    const auto x = Matrix::from_rows({{1.0}, {4.0}, {2.0}, {2.5}, {100.0}});
    const std::vector<int> y{1, 1, 2, 2, 3};
    CHECK(knn_predict(x, y, std::vector<double>{0.0}, 4) == 2);
    CHECK(knn_predict(x, y, std::vector<double>{0.0}, 1) == 1);
}

TEST_CASE("knn_identify on a template store") {
    const auto pop = synth::feature_population(20, 3, 8, 0.02, 5);
    const auto store = store_from(pop, 8, 3);
    for (const auto& [id, rows] : pop) CHECK(knn_identify(rows[1], store, 1) == id);
    CHECK_THROWS_WITH_AS(knn_identify(pop.begin()->second[0], store, 61), doctest::Contains("k too large"),
                         InvalidArgument);
    CHECK_THROWS_AS(knn_identify(pop.begin()->second[0], store, 0), InvalidArgument);
    TemplateStore empty({0, 1}, "v");
    CHECK_THROWS_WITH_AS(knn_identify(std::vector<double>{0, 0}, empty, 1), "empty store", InvalidArgument);
}

TEST_CASE("identification accuracy does not grow with the population") {
    const auto pop = synth::feature_population(400, 3, 12, 0.08, 77);
    double previous = 1.0;
    for (std::size_t n : {25u, 50u, 100u, 200u, 400u}) {
        synth::FeatureSamples part;
        for (const auto& [id, rows] : pop) {
            if (part.size() == n) break;
            part.emplace(id, rows);
        }
        double acc = 0;
        for (int fold = 0; fold < 3; ++fold) {
            const auto split = rotation_split(part, fold);
            std::vector<std::size_t> features(12);
            for (std::size_t i = 0; i < 12; ++i) features[i] = i;
            TemplateStore store(features, "t");
            for (const auto& [id, rows] : split.enrolled) store.enroll(id, rows);
            acc += identification_accuracy(store, split.probes, 1) / 3;
        }
        CHECK(acc <= previous + 1e-12);
        previous = acc;
    }
    CHECK(previous < 1.0);
}

TEST_CASE("weighted L1 distance hand cases") {
    std::vector<double> a(35, 0.0), b(35, 1.0), sigma(35, 1.0);
    CHECK(weighted_l1(a, b, sigma) == 35.0);
    sigma.assign(35, 0.5);
    CHECK(weighted_l1(a, b, sigma) == 70.0);
    sigma[0] = 0;  // excluded feature
    CHECK(weighted_l1(a, b, sigma) == 68.0);

    RandomSource rng(3);
    std::vector<double> s(10);
    for (auto& v : s) v = rng.uniform(0.1, 2.0);
    for (int i = 0; i < 100; ++i) {
        const auto u = random_vector(rng, 10), v = random_vector(rng, 10);
        CHECK(weighted_l1(u, v, s) > 0);
        CHECK(weighted_l1(u, v, s) == weighted_l1(v, u, s));
        CHECK(weighted_l1(u, u, s) == 0);
    }
}

TEST_CASE("verify_claim") {
    std::vector<std::size_t> features(35);
    for (std::size_t i = 0; i < 35; ++i) features[i] = i;
    TemplateStore store(features, "v1");
    store.enroll("alice", {std::vector<double>(35, 0.0), std::vector<double>(35, 3.0)});
    store.set_sigma(std::vector<double>(35, 1.0));

    const auto exact = verify_claim(std::vector<double>(35, 3.0), "alice", store, 1e-9);
    CHECK(exact.genuine);
    CHECK(exact.distance == 0);
    // Minimum over enrolled samples: 35 from the first, 70 from the second.
    const auto off = verify_claim(std::vector<double>(35, 1.0), "alice", store, 35);
    CHECK(off.distance == 35);
    CHECK(off.genuine);
    CHECK_FALSE(verify_claim(std::vector<double>(35, 1.0), "alice", store, 34.999).genuine);
    auto near = std::vector<double>(35, 0.0);
    near[3] = 1e-6;
    CHECK_FALSE(verify_claim(near, "alice", store, 0).genuine);
    CHECK_THROWS_WITH_AS(verify_claim(near, "bob", store, 1), doctest::Contains("not enrolled"), InvalidArgument);
    CHECK_THROWS_AS(verify_claim(std::vector<double>(34, 0.0), "alice", store, 1), InvalidArgument);
}

TEST_CASE("template store sigma, JSON and rotation") {
    TemplateStore store({4, 9, 11}, "sub-1");
    store.enroll("a", {{1, 5, 2}, {3, 5, 2}});
    store.enroll("b", {{2, 5, 4}});
    store.fit_sigma();
    CHECK(store.sigma()[0] == doctest::Approx(1.0));
    CHECK(store.sigma()[1] == 0);
    CHECK(store.sigma()[2] == doctest::Approx(std::sqrt(4.0 / 3.0)));
    CHECK(store.warnings().size() == 1);
    CHECK(store.project(std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}) == std::vector<double>{4, 9, 11});
    CHECK_THROWS_AS(store.enroll("c", {{1, 2}}), InvalidArgument);
    CHECK_THROWS_AS(store.set_sigma({1, -1, 1}), InvalidArgument);

    const auto copy = TemplateStore::from_json(store.to_json());
    CHECK(copy.subjects() == store.subjects());
    CHECK(copy.samples("a") == store.samples("a"));
    CHECK(copy.sigma() == store.sigma());
    CHECK(copy.subset_version() == "sub-1");
    CHECK(copy.features() == store.features());

    synth::FeatureSamples three{{"x", {{0}, {1}, {2}}}, {"y", {{5}, {6}, {7}}}};
    const auto f1 = rotation_split(three, 1);
    CHECK(f1.probes.at("x") == std::vector<double>{1});
    CHECK(f1.enrolled.at("y") == Samples{{5}, {7}});
    three["z"] = {{1}, {2}};
    CHECK_THROWS_AS(rotation_split(three, 0), InvalidArgument);
}

TEST_CASE("random forest on separable data") {
    RandomSource rng(9);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 200; ++i) {
        auto v = random_vector(rng, 5);
        y.push_back(v[0] + v[1] > 1.0 ? 7 : 3);
        rows.push_back(v);
    }
    const auto x = Matrix::from_rows(rows);
    const auto rf = RandomForest::train(x, y, {.trees = 100, .seed = 4});
    CHECK(rf.tree_count() == 100);
    CHECK(rf.accuracy(x, y) == 1.0);

    const auto again = RandomForest::train(x, y, {.trees = 100, .seed = 4});
    for (int i = 0; i < 50; ++i) {
        const auto p = random_vector(rng, 5);
        CHECK(rf.predict(p) == again.predict(p));
        for (std::size_t t = 0; t < 100; t += 13) CHECK(rf.predict_tree(t, p) == again.predict_tree(t, p));
    }
    for (std::size_t t = 0; t < rf.tree_count(); ++t) {
        for (auto r : rf.oob_rows(t)) CHECK(r < 200);
    }
    CHECK(rf.oob_covered() == 200);
}

TEST_CASE("random forest OOB error tracks held-out error") {
    RandomSource rng(21);
    auto make = [&](int n, std::vector<std::vector<double>>& rows, std::vector<int>& y) {
        for (int i = 0; i < n; ++i) {
            auto v = random_vector(rng, 8);
            const double score = v[0] - v[1] + 0.5 * v[2] + rng.normal(0, 0.15);
            y.push_back(score > 0.25 ? 1 : (score < -0.25 ? 2 : 0));
            rows.push_back(v);
        }
    };
    std::vector<std::vector<double>> tr, te;
    std::vector<int> ytr, yte;
    make(600, tr, ytr);
    make(2000, te, yte);
    const auto rf = RandomForest::train(Matrix::from_rows(tr), ytr, {.trees = 100, .seed = 2});
    const double held_out = 1.0 - rf.accuracy(Matrix::from_rows(te), yte);
    CHECK(std::abs(rf.oob_error() - held_out) <= 0.05);
    CHECK(held_out < 0.4);
}

TEST_CASE("random forest rejects one class") {
    const auto x = Matrix::from_rows({{1}, {2}, {3}});
    CHECK_THROWS_WITH_AS(RandomForest::train(x, {1, 1, 1}), doctest::Contains("single-class"), InvalidArgument);
    CHECK_THROWS_AS(RandomForest::train(x, {1, 2}), InvalidArgument);
}

TEST_CASE("roc hand-evaluated curve") {
    const std::vector<double> gen{1, 2, 3}, imp{1.5, 4};
    const auto c = roc(gen, imp);
    REQUIRE(c.points.size() == 6);
    CHECK(c.points[0].threshold < 1);
    CHECK(c.points[0].far == 0);
    CHECK(c.points[0].frr == 1);
    CHECK(c.points[2].far == 0.5);
    CHECK(c.points[2].frr == doctest::Approx(2.0 / 3));
    CHECK(c.points.back().far == 1);
    CHECK(c.points.back().frr == 0);
    // FAR - FRR goes -1/6 at t=1.5 to +1/6 at t=2: halfway.
    CHECK(c.eer == doctest::Approx(0.5));
    CHECK(c.eer_threshold == doctest::Approx(1.75));
    check_monotone(c);

    std::ostringstream csv;
    write_roc_csv(c, csv);
    const std::string text = csv.str();
    CHECK(text.rfind("threshold,far,frr,gar\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("roc extremes and properties") {
    CHECK(roc(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5}).eer == 0);
    CHECK(roc(std::vector<double>{1, 2, 3}, std::vector<double>{3.5, 5}).eer_threshold == doctest::Approx(3));

    RandomSource rng(8);
    std::vector<double> a, b;
    for (int i = 0; i < 4000; ++i) {
        a.push_back(rng.normal());
        b.push_back(rng.normal());
    }
    const auto same = roc(a, b);
    CHECK(std::abs(same.eer - 0.5) <= 0.03);
    check_monotone(same);

    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> g, im;
        for (std::size_t i = 0, n = 1 + rng.index(40); i < n; ++i) g.push_back(std::floor(rng.uniform(0, 10)));
        for (std::size_t i = 0, n = 1 + rng.index(40); i < n; ++i) im.push_back(std::floor(rng.uniform(3, 14)));
        const auto c = roc(g, im);
        check_monotone(c);
        CHECK(c.eer >= 0);
        CHECK(c.eer <= 1);
    }

    const auto none = roc(std::vector<double>{1, 2}, std::vector<double>{});
    CHECK_FALSE(none.far_defined);
    CHECK(std::isnan(none.eer));
    CHECK_THROWS_AS(roc(std::vector<double>{}, std::vector<double>{1}), InvalidArgument);
}

TEST_CASE("EER grows with feature noise") {
    double previous = -1;
    for (double noise : {0.01, 0.03, 0.06, 0.1, 0.15}) {
        const auto c = population_roc(noise, 31);
        check_monotone(c);
        CHECK(c.eer >= previous);
        previous = c.eer;
    }
    CHECK(previous > 0);
}

TEST_CASE("disjoint protocol accounting") {
    auto run = [](std::size_t genuine, std::size_t imposters) {
        const auto pop = synth::feature_population(genuine + imposters, 3, 6, 0.05, 12);
        TemplateStore store({0, 1, 2, 3, 4, 5}, "t");
        std::map<std::string, Samples> probes, imp;
        std::size_t i = 0;
        for (const auto& [id, rows] : pop) {
            if (i++ < genuine) {
                store.enroll(id, {rows[0]});
                probes[id] = {rows[1], rows[2]};
            } else {
                imp[id] = rows;
            }
        }
        store.fit_sigma();
        return disjoint_protocol(store, probes, imp);
    };
    const auto r = run(300, 200);
    CHECK(r.accounting() == "600 x 900");
    CHECK(r.genuine_comparisons == 600);
    CHECK(r.other_genuine == 299);
    CHECK(r.imposter_vectors == 600);
    CHECK(r.imposter_comparisons == 600 * 899);
    CHECK(r.total_comparisons() == 600 * 900);
    check_monotone(r.curve);

    const auto r2 = run(300, 100);
    CHECK(r2.accounting() == "600 x 600");
    CHECK(r2.imposter_comparisons == 600 * 599);
    const auto r3 = run(400, 100);
    CHECK(r3.accounting() == "800 x 700");
    CHECK(r3.imposter_comparisons == 800 * 699);
}

TEST_CASE("disjoint protocol errors and degenerate inputs") {
    TemplateStore store({0, 1}, "t");
    store.enroll("a", {{0, 0}, {1, 1}});
    store.enroll("b", {{5, 5}, {6, 6}});
    store.fit_sigma();
    const std::map<std::string, Samples> probes{{"a", {{0.1, 0.1}}}};
    CHECK_THROWS_WITH_AS(disjoint_protocol(store, probes, {{"b", {{1, 1}}}}), doctest::Contains("overlap"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(disjoint_protocol(store, probes, {{"a", {{1, 1}}}}), doctest::Contains("overlap"),
                         InvalidArgument);
    CHECK_THROWS_WITH_AS(disjoint_protocol(store, {{"zed", {{1, 1}}}}, {}), doctest::Contains("not enrolled"),
                         InvalidArgument);

    const auto alone = disjoint_protocol(store, probes, {});
    CHECK_FALSE(alone.curve.far_defined);
    CHECK(alone.imposter_comparisons == 0);

    // Imposters carrying a's enrolled vector are accepted at threshold 0.
    const auto copied = disjoint_protocol(store, probes, {{"m1", {{0, 0}}}, {"m2", {{1, 1}, {0, 0}}}});
    CHECK(copied.curve.far_defined);
    CHECK(copied.curve.points[1].threshold == 0);
    CHECK(copied.curve.points[1].far == 1);
}
