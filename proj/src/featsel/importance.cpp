#include "handcap/featsel/importance.hpp"

#include <cmath>
#include <numeric>

#include "handcap/common/error.hpp"
#include "handcap/imaging/random.hpp"

namespace handcap::featsel {

nlohmann::json Importance::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t j = 0; j < score.size(); ++j) {
        out.push_back({{"feature", j},
                       {"score", defined[j] ? nlohmann::json(score[j]) : nlohmann::json(nullptr)},
                       {"mean_delta", mean_delta[j]},
                       {"stddev", stddev[j]},
                       {"std_error", std_error[j]},
                       {"trees", trees_used[j]}});
    }
    return out;
}

double tree_permutation_delta(const verify::RandomForest& forest, std::size_t t, const verify::Matrix& x,
                              const std::vector<int>& y, std::size_t feature, const std::vector<std::size_t>& perm) {
    const auto& oob = forest.oob_rows(t);
    if (oob.empty()) return 0;
    if (perm.size() != oob.size()) throw InvalidArgument("permutation length mismatch");
    if (feature >= x.cols()) throw InvalidArgument("feature out of range");
    std::vector<double> row(x.cols());
    std::size_t before = 0, after = 0;
    for (std::size_t i = 0; i < oob.size(); ++i) {
        const auto r = oob[i];
        before += forest.predict_tree(t, x.row(r)) == y[r];
        const auto src = x.row(r);
        std::copy(src.begin(), src.end(), row.begin());
        row[feature] = x(oob.at(perm[i]), feature);
        after += forest.predict_tree(t, row) == y[r];
    }
    return (static_cast<double>(before) - static_cast<double>(after)) / static_cast<double>(oob.size());
}

Importance permutation_importance(const verify::RandomForest& forest, const verify::Matrix& x,
                                  const std::vector<int>& y, std::uint64_t seed) {
    if (x.cols() != forest.feature_count()) throw InvalidArgument("dimension mismatch");
    if (x.rows() != y.size()) throw InvalidArgument("label count mismatch");
    const std::size_t h = x.cols();
    std::vector<std::vector<double>> deltas(h);
    imaging::RandomSource rng(seed);
    for (std::size_t t = 0; t < forest.tree_count(); ++t) {
        const auto& oob = forest.oob_rows(t);
        if (oob.empty()) continue;
        for (std::size_t j = 0; j < h; ++j) {
            std::vector<std::size_t> perm(oob.size());
            std::iota(perm.begin(), perm.end(), 0);
            rng.shuffle(perm.begin(), perm.end());
            deltas[j].push_back(tree_permutation_delta(forest, t, x, y, j, perm));
        }
    }

    Importance imp;
    for (std::size_t j = 0; j < h; ++j) {
        const auto& d = deltas[j];
        const double n = static_cast<double>(d.size());
        const double mean = d.empty() ? 0 : std::accumulate(d.begin(), d.end(), 0.0) / n;
        double ss = 0;
        for (double v : d) ss += (v - mean) * (v - mean);
        const double sd = d.size() > 1 ? std::sqrt(ss / (n - 1)) : 0;
        imp.mean_delta.push_back(mean);
        imp.stddev.push_back(sd);
        imp.std_error.push_back(d.empty() ? 0 : sd / std::sqrt(n));
        imp.score.push_back(sd > 0 ? mean / sd : (mean == 0 ? 0 : std::copysign(HUGE_VAL, mean)));
        imp.trees_used.push_back(d.size());
        imp.defined.push_back(!d.empty());
    }
    return imp;
}

}  // namespace handcap::featsel
