#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "handcap/verify/matrix.hpp"

namespace handcap::verify {

struct ForestParams {
    int trees = 100;
    int mtry = 0;  // features tried per split; 0 means floor(sqrt(cols))
    int min_leaf = 1;
    std::uint64_t seed = 1;
};

/// Gini classification tree grown on one bootstrap sample.
class DecisionTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0;
        int left = -1;
        int right = -1;
        int label = 0;
    };

    int predict(std::span<const double> x) const;
    std::size_t node_count() const { return nodes_.size(); }

private:
    friend class RandomForest;
    std::vector<Node> nodes_;
};

/// Bagged ensemble of DecisionTrees with per-split feature sub-sampling and
/// majority voting (ties go to the smaller label). Training is deterministic
/// for fixed data and seed.
class RandomForest {
public:
    /// Throws when fewer than 2 distinct labels are present.
    static RandomForest train(const Matrix& x, const std::vector<int>& y, const ForestParams& params = {});

    int predict(std::span<const double> x) const { return predict_first(trees_.size(), x); }
    /// Majority vote of trees [0, n).
    int predict_first(std::size_t n, std::span<const double> x) const;
    int predict_tree(std::size_t t, std::span<const double> x) const { return trees_.at(t).predict(x); }
    double accuracy(const Matrix& x, const std::vector<int>& y) const;

    std::size_t tree_count() const { return trees_.size(); }
    std::size_t feature_count() const { return features_; }
    /// Training rows left out of tree t's bootstrap sample.
    const std::vector<std::size_t>& oob_rows(std::size_t t) const { return oob_.at(t); }

    /// Out-of-bag error: each training row is classified by the trees that
    /// did not see it; rows never out of bag are skipped.
    double oob_error() const { return oob_error_; }
    std::size_t oob_covered() const { return oob_covered_; }

private:
    std::vector<DecisionTree> trees_;
    std::vector<std::vector<std::size_t>> oob_;
    std::vector<int> classes_;
    std::size_t features_ = 0;
    double oob_error_ = 0;
    std::size_t oob_covered_ = 0;
};

}  // namespace handcap::verify
