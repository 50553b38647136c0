#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "handcap/common/error.hpp"
#include "handcap/featsel/foba.hpp"
#include "handcap/featsel/importance.hpp"
#include "handcap/imaging/random.hpp"
#include "handcap/synth/features.hpp"

using namespace handcap;
using namespace handcap::featsel;
using imaging::RandomSource;

namespace {

// Column 0 encodes the subject exactly, the rest is uniform noise.
Dataset perfect_first(std::size_t subjects, std::size_t samples, std::size_t cols, std::uint64_t seed,
                      bool duplicate = false) {
    RandomSource rng(seed);
    Dataset d;
    for (std::size_t s = 0; s < subjects; ++s) {
        d.subjects.push_back("s" + std::to_string(s));
        for (std::size_t k = 0; k < samples; ++k) {
            std::vector<double> row(cols);
            for (auto& v : row) v = rng.uniform();
            row[0] = 10.0 * static_cast<double>(s);
            if (duplicate) row[1] = row[0];
            d.x.append_row(row);
            d.y.push_back(static_cast<int>(s));
        }
    }
    return d;
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("feature index layout") {
    CHECK(FeatureIndex{0, 1}.column() == 0);
    CHECK(FeatureIndex{3, 26}.column() == 103);
    CHECK(FeatureIndex{1, 5}.column() == 30);
    for (std::size_t c = 0; c < 104; ++c) CHECK(FeatureIndex::from_column(c).column() == c);
    CHECK_THROWS_AS(FeatureIndex({4, 1}).column(), InvalidArgument);
    CHECK_THROWS_AS(FeatureIndex({0, 27}).column(), InvalidArgument);
    CHECK_THROWS_AS(FeatureIndex::from_column(104), InvalidArgument);

    const auto g = global_candidates(104);
    REQUIRE(g.size() == 26);
    CHECK(g[4].columns == std::vector<std::size_t>{4, 30, 56, 82});
    CHECK(g[0].name == "all.area");
    CHECK_THROWS_AS(global_candidates(100), InvalidArgument);
    CHECK(local_candidates(104)[27].name == "middle.perimeter");
    CHECK(local_candidates(5)[3].name == "f3");
}

TEST_CASE("pearson") {
    const std::vector<double> a{1, 2, 3}, b{1, 2, 4};
    CHECK(pearson(a, b) == doctest::Approx(3 / std::sqrt(2 * 42.0 / 9)));
    CHECK(pearson(a, a) == doctest::Approx(1));
    CHECK(pearson(a, {-1, -2, -3}) == doctest::Approx(-1));
    CHECK_THROWS_WITH_AS(pearson(a, {5, 5, 5}), "degenerate series", InvalidArgument);
    CHECK_THROWS_AS(pearson(a, {1, 2}), InvalidArgument);

    RandomSource rng(3);
    std::vector<double> x(10000), y(10000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform();
        y[i] = rng.uniform();
    }
    CHECK(std::abs(pearson(x, y)) < 0.05);
}

TEST_CASE("subset evaluator") {
    const auto d = perfect_first(20, 4, 6, 1);
    const SubsetEvaluator ev(d);
    CHECK(ev.validation_size() == 40);
    CHECK(ev.feature_count() == 6);
    CHECK(ev.baseline() == doctest::Approx(2.0 / 40));
    CHECK(ev({0}) == 1.0);
    CHECK(ev({0, 3}) == ev({3, 0}));
    const auto n = ev.evaluations();
    ev({3, 0});
    CHECK(ev.evaluations() == n);  // cached
    CHECK_THROWS_AS(ev({6}), InvalidArgument);

    const SubsetEvaluator again(d);
    CHECK(again({2, 4}) == ev({2, 4}));

    Dataset single = perfect_first(3, 1, 2, 1);
    CHECK_THROWS_AS(SubsetEvaluator{single}, InvalidArgument);

    EvalOptions rf;
    rf.classifier = EvalClassifier::Rf;
    rf.trees = 15;
    CHECK(SubsetEvaluator(d, rf)({0}) == 1.0);
}

TEST_CASE("rank_independent") {
    const auto d = perfect_first(20, 4, 6, 2);
    const SubsetEvaluator ev(d);
    std::vector<std::vector<std::size_t>> cands;
    for (std::size_t c = 0; c < 6; ++c) cands.push_back({c});
    const auto r = rank_independent(cands, ev);
    CHECK(r.front().candidate == 0);
    CHECK(r.front().accuracy == 1.0);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i - 1].accuracy >= r[i].accuracy);

    // Identical columns tie, so the order is by index.
    Dataset flat = d;
    for (std::size_t i = 0; i < flat.x.rows(); ++i) {
        for (std::size_t c = 0; c < 6; ++c) flat.x(i, c) = 1.0;
    }
    const auto t = rank_independent(cands, SubsetEvaluator(flat));
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i].candidate == i);
}

TEST_CASE("foba with one perfect feature") {
    const auto d = perfect_first(30, 4, 12, 3);
    const SubsetEvaluator ev(d);
    const auto cands = local_candidates(12);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        FobaOptions o;
        o.seed = seed;
        const auto r = foba(cands, ev, o);
        CHECK(r.members == std::vector<std::size_t>{0});
        CHECK(r.accuracy == 1.0);
        REQUIRE(r.tags.size() == 12);
        CHECK(r.tags[0] == Relevance::Relevant);
        for (std::size_t c = 1; c < 12; ++c) {
            const bool ok = r.tags[c] == Relevance::Irrelevant ||
                            (r.tags[c] == Relevance::Redundant &&
                             std::find(r.forward.begin(), r.forward.end(), c) != r.forward.end());
            CHECK(ok);
        }
        CHECK(r.sequence.size() == 12);
        CHECK(sorted(r.sequence) == sorted([] {
                  std::vector<std::size_t> v(12);
                  std::iota(v.begin(), v.end(), 0);
                  return v;
              }()));
        CHECK(r.trace.size() == r.forward.size());
        for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] - r.trace[i - 1] >= o.epsilon - 1e-12);
        CHECK(r.accuracy >= r.trace.front());
    }
    CHECK_THROWS_AS(foba({}, ev), InvalidArgument);
}

TEST_CASE("foba tags a duplicated column redundant") {
    const auto d = perfect_first(30, 4, 10, 4, true);
    const SubsetEvaluator ev(d);
    const auto r = foba(local_candidates(10), ev);
    REQUIRE(r.members.size() == 1);
    const std::size_t kept = r.members[0], copy = 1 - kept;
    CHECK(kept <= 1);
    CHECK(r.tags[kept] == Relevance::Relevant);
    CHECK(r.tags[copy] == Relevance::Redundant);
}

TEST_CASE("relevance names") {
    for (Relevance rel : {Relevance::Relevant, Relevance::ConditionallyRelevant, Relevance::Redundant,
                          Relevance::Irrelevant}) {
        CHECK(parse_relevance(relevance_name(rel)) == rel);
    }
    CHECK_THROWS_AS(parse_relevance("strong"), InvalidArgument);
}

TEST_CASE("mfoba structure on a planted population") {
    const std::vector<std::size_t> planted{3, 17, 30, 45, 58, 71, 88, 101};
    const auto d = dataset_from_samples(synth::planted_population(50, 4, 104, planted, 0.08, 5));
    const SubsetEvaluator ev(d);
    FobaOptions o;
    o.seed = 5;
    const auto r = mfoba(ev, o);

    CHECK(r.f1.size() % 4 == 0);
    std::set<std::size_t> f3(r.f3.begin(), r.f3.end());
    CHECK(f3.size() == r.f3.size());
    std::set<std::size_t> uni(r.f1.begin(), r.f1.end());
    uni.insert(r.f2.begin(), r.f2.end());
    CHECK(f3 == uni);
    for (auto c : r.f_opt) CHECK(f3.count(c) == 1);
    CHECK(r.f_opt.size() <= r.f3.size());
    CHECK(r.f3.size() <= r.f1.size() + r.f2.size());
    CHECK(r.accuracy >= r.accuracy_f3);
    CHECK(r.trace.size() == r.f_opt.size());
    CHECK(r.trace.back() == r.accuracy);
    CHECK(r.cardinality_trace().size() == 4);
    REQUIRE(r.tags.size() == 104);
    for (std::size_t c = 0; c < 104; ++c) {
        const bool in_opt = std::find(r.f_opt.begin(), r.f_opt.end(), c) != r.f_opt.end();
        CHECK((r.tags[c] == Relevance::Relevant) == in_opt);
    }
    std::size_t hits = 0;
    for (auto c : planted) hits += std::count(r.f_opt.begin(), r.f_opt.end(), c);
    CHECK(hits >= 6);

    const auto j = subset_json(r);
    CHECK(j["members"].size() == r.f_opt.size());
    CHECK(j["tags"].size() == 104);
    const auto back = FeatureSubset::from_json(j);
    CHECK(back.columns() == r.f_opt);
    CHECK(back.trace == r.trace);
}

TEST_CASE("subset file errors") {
    using nlohmann::json;
    const json ok{{"members", {{{"finger", "Index"}, {"attribute", 1}}, {{"finger", 2}, {"attribute", 26}}}}};
    CHECK(FeatureSubset::from_json(ok).columns() == std::vector<std::size_t>{0, 77});
    CHECK_THROWS_AS(FeatureSubset::from_json(json{{"members", {{{"finger", "thumb"}, {"attribute", 1}}}}}),
                    InvalidArgument);
    CHECK_THROWS_AS(FeatureSubset::from_json(json{{"members", {{{"finger", "ring"}, {"attribute", 27}}}}}),
                    InvalidArgument);
    CHECK_THROWS_WITH_AS(FeatureSubset::from_json(json{{"members",
                                                        {{{"finger", "ring"}, {"attribute", 2}},
                                                         {{"finger", "ring"}, {"attribute", 2}}}}}),
                         doctest::Contains("duplicate"), InvalidArgument);
    CHECK_THROWS_AS(FeatureSubset::from_json(json{{"members", json::array()}}), InvalidArgument);
    CHECK_THROWS_AS(FeatureSubset::from_json(json::object()), InvalidArgument);
}

TEST_CASE("permutation importance") {
    RandomSource rng(8);
    verify::Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 300; ++i) {
        const int label = i % 2;
        std::vector<double> row{rng.uniform(), label + rng.normal(0, 0.2), rng.uniform(), rng.uniform()};
        x.append_row(row);
        y.push_back(label);
    }
    verify::ForestParams p;
    p.trees = 60;
    p.seed = 4;
    const auto rf = verify::RandomForest::train(x, y, p);

    for (std::size_t t = 0; t < rf.tree_count(); t += 7) {
        std::vector<std::size_t> id(rf.oob_rows(t).size());
        std::iota(id.begin(), id.end(), 0);
        for (std::size_t j = 0; j < 4; ++j) CHECK(tree_permutation_delta(rf, t, x, y, j, id) == 0);
    }

    const auto imp = permutation_importance(rf, x, y, 2);
    REQUIRE(imp.score.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(imp.defined[j]);
        CHECK(imp.trees_used[j] == 60);
        if (j != 1) CHECK(imp.score[1] > imp.score[j]);
    }
    CHECK(imp.mean_delta[1] > 0.2);
    CHECK(imp.to_json().size() == 4);
    CHECK_THROWS_AS(permutation_importance(rf, x.select_columns({0, 1}), y), InvalidArgument);
}
