#include "handcap/verify/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "handcap/common/error.hpp"
#include "handcap/imaging/random.hpp"

namespace handcap::verify {

int DecisionTree::predict(std::span<const double> x) const {
    int n = 0;
    while (nodes_[static_cast<std::size_t>(n)].feature >= 0) {
        const auto& node = nodes_[static_cast<std::size_t>(n)];
        n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(n)].label;
}

namespace {

// Grows one tree over class indices 0..n_classes-1.
class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const std::vector<int>& cls, int n_classes, int mtry, int min_leaf,
                imaging::RandomSource& rng)
        : x_(x), cls_(cls), n_classes_(n_classes), mtry_(mtry), min_leaf_(min_leaf), rng_(rng) {}

    std::vector<DecisionTree::Node>* nodes = nullptr;

    int grow(std::vector<std::size_t>& rows) {
        const int id = static_cast<int>(nodes->size());
        nodes->emplace_back();
        std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes_), 0);
        for (auto r : rows) ++counts[static_cast<std::size_t>(cls_[r])];
        const auto majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        (*nodes)[static_cast<std::size_t>(id)].label = majority;
        const bool pure = counts[static_cast<std::size_t>(majority)] == rows.size();
        if (pure || rows.size() < 2 * static_cast<std::size_t>(min_leaf_)) return id;

        int feature = -1;
        double threshold = 0;
        if (!best_split(rows, counts, feature, threshold)) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows) (x_(r, static_cast<std::size_t>(feature)) <= threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(left);
        const int rr = grow(right);
        auto& node = (*nodes)[static_cast<std::size_t>(id)];
        node.feature = feature;
        node.threshold = threshold;
        node.left = l;
        node.right = rr;
        return id;
    }

private:
    // Features are visited in random order; at least mtry are examined and the
    // search goes on past mtry only while no valid split has been found.
    bool best_split(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& total, int& feature,
                    double& threshold) {
        std::vector<std::size_t> order(x_.cols());
        std::iota(order.begin(), order.end(), 0);
        rng_.shuffle(order.begin(), order.end());

        const double n = static_cast<double>(rows.size());
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, int>> vals(rows.size());
        std::vector<std::size_t> left(total.size()), right(total.size());
        double total_sq = 0;
        for (auto c : total) total_sq += static_cast<double>(c) * static_cast<double>(c);

        for (std::size_t visited = 0; visited < order.size(); ++visited) {
            if (visited >= static_cast<std::size_t>(mtry_) && feature >= 0) break;
            const std::size_t f = order[visited];
            for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = {x_(rows[i], f), cls_[rows[i]]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;

            std::fill(left.begin(), left.end(), 0);
            right = total;
            double sq_l = 0, sq_r = total_sq;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                const auto c = static_cast<std::size_t>(vals[i].second);
                sq_l += 2.0 * static_cast<double>(left[c]) + 1.0;
                sq_r -= 2.0 * static_cast<double>(right[c]) - 1.0;
                ++left[c];
                --right[c];
                if (vals[i].first == vals[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                // Weighted Gini impurity of the two children, times n.
                const double impurity = (nl - sq_l / nl) + (nr - sq_r / nr);
                if (impurity < best) {
                    best = impurity;
                    feature = static_cast<int>(f);
                    threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        return feature >= 0;
    }

    const Matrix& x_;
    const std::vector<int>& cls_;
    int n_classes_;
    int mtry_;
    int min_leaf_;
    imaging::RandomSource& rng_;
};

}  // namespace

RandomForest RandomForest::train(const Matrix& x, const std::vector<int>& y, const ForestParams& params) {
    if (x.rows() != y.size()) throw InvalidArgument("label count does not match rows");
    if (x.empty() || x.cols() == 0) throw InvalidArgument("empty training set");
    if (params.trees < 1) throw InvalidArgument("forest needs at least one tree");
    if (params.min_leaf < 1) throw InvalidArgument("min_leaf must be positive");

    RandomForest rf;
    rf.classes_ = y;
    std::sort(rf.classes_.begin(), rf.classes_.end());
    rf.classes_.erase(std::unique(rf.classes_.begin(), rf.classes_.end()), rf.classes_.end());
    if (rf.classes_.size() < 2) throw InvalidArgument("single-class training set");
    rf.features_ = x.cols();

    std::vector<int> cls(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        cls[i] = static_cast<int>(std::lower_bound(rf.classes_.begin(), rf.classes_.end(), y[i]) - rf.classes_.begin());
    }
    const int mtry = params.mtry > 0 ? std::min<int>(params.mtry, static_cast<int>(x.cols()))
                                     : std::max(1, static_cast<int>(std::floor(std::sqrt(double(x.cols())))));

    const std::size_t n = x.rows();
    const auto n_classes = rf.classes_.size();
    std::vector<std::vector<std::size_t>> oob_votes(n, std::vector<std::size_t>(n_classes, 0));

    for (int t = 0; t < params.trees; ++t) {
        imaging::RandomSource rng(imaging::mix_seed(params.seed ^ imaging::mix_seed(static_cast<std::uint64_t>(t) + 1)));
        std::vector<std::size_t> rows(n);
        std::vector<char> in_bag(n, 0);
        for (auto& r : rows) {
            r = rng.index(n);
            in_bag[r] = 1;
        }
        std::sort(rows.begin(), rows.end());
        DecisionTree tree;
        TreeBuilder builder(x, cls, static_cast<int>(n_classes), mtry, params.min_leaf, rng);
        builder.nodes = &tree.nodes_;
        builder.grow(rows);

        std::vector<std::size_t> oob;
        for (std::size_t i = 0; i < n; ++i) {
            if (in_bag[i]) continue;
            oob.push_back(i);
            ++oob_votes[i][static_cast<std::size_t>(tree.predict(x.row(i)))];
        }
        rf.trees_.push_back(std::move(tree));
        rf.oob_.push_back(std::move(oob));
    }
    // Trees store class indices; map leaves back to labels.
    for (auto& tree : rf.trees_) {
        for (auto& node : tree.nodes_) node.label = rf.classes_[static_cast<std::size_t>(node.label)];
    }

    std::size_t wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = oob_votes[i];
        const auto total = std::accumulate(v.begin(), v.end(), std::size_t{0});
        if (total == 0) continue;
        ++rf.oob_covered_;
        wrong += static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()) !=
                 static_cast<std::size_t>(cls[i]);
    }
    rf.oob_error_ = rf.oob_covered_ ? static_cast<double>(wrong) / static_cast<double>(rf.oob_covered_) : 0.0;
    return rf;
}

int RandomForest::predict_first(std::size_t n, std::span<const double> x) const {
    if (n == 0 || n > trees_.size()) throw InvalidArgument("tree count out of range");
    if (x.size() != features_) throw InvalidArgument("dimension mismatch");
    std::map<int, std::size_t> votes;
    for (std::size_t t = 0; t < n; ++t) ++votes[trees_[t].predict(x)];
    int best = votes.begin()->first;
    for (const auto& [label, v] : votes) {
        if (v > votes[best]) best = label;
    }
    return best;
}

double RandomForest::accuracy(const Matrix& x, const std::vector<int>& y) const {
    if (x.rows() != y.size() || x.empty()) throw InvalidArgument("label count does not match rows");
    std::size_t hits = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) hits += predict(x.row(r)) == y[r];
    return static_cast<double>(hits) / static_cast<double>(x.rows());
}

}  // namespace handcap::verify
