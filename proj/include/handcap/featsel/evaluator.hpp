#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "handcap/verify/matrix.hpp"

namespace handcap::featsel {

using verify::Matrix;

enum class Scope { Global, Local };

/// Position of one feature in the 104-long hand vector (finger-major).
struct FeatureIndex {
    int finger = 0;     // 0 index, 1 middle, 2 ring, 3 little
    int attribute = 1;  // 1..26
    Scope scope = Scope::Local;

    std::size_t column() const;
    static FeatureIndex from_column(std::size_t column);
    bool operator==(const FeatureIndex& o) const { return finger == o.finger && attribute == o.attribute; }
};

/// Labelled observations; labels are subject numbers.
struct Dataset {
    Matrix x;
    std::vector<int> y;
    std::vector<std::string> subjects;  // y indexes this

    std::size_t features() const { return x.cols(); }
};

/// One row per sample, subjects in map order.
Dataset dataset_from_samples(const std::map<std::string, std::vector<std::vector<double>>>& samples);

enum class EvalClassifier { Knn, Rf };

struct EvalOptions {
    EvalClassifier classifier = EvalClassifier::Knn;
    std::size_t k = 1;
    int trees = 50;
    std::uint64_t seed = 1;
};

/// Accuracy of a feature subset on a seeded, per-subject 50/50 split of the
/// dataset (the larger half of an odd count goes to training). Results are
/// cached per subset, so an evaluator is not safe to share across threads.
class SubsetEvaluator {
public:
    SubsetEvaluator(const Dataset& data, EvalOptions opts = {});

    /// Column order does not matter. The empty subset scores the
    /// majority-label rate of the validation half.
    double operator()(const std::vector<std::size_t>& columns) const;
    double baseline() const { return (*this)({}); }

    std::size_t feature_count() const { return train_.cols(); }
    std::size_t validation_size() const { return val_.rows(); }
    std::size_t evaluations() const { return evaluations_; }

private:
    Matrix train_, val_;
    std::vector<int> train_y_, val_y_;
    EvalOptions opts_;
    mutable std::map<std::vector<std::size_t>, double> cache_;
    mutable std::size_t evaluations_ = 0;
};

struct Ranked {
    std::size_t candidate = 0;
    double accuracy = 0;
};

/// Scores each candidate (a column group) alone; best first, ties by lower index.
std::vector<Ranked> rank_independent(const std::vector<std::vector<std::size_t>>& candidates,
                                     const SubsetEvaluator& eval);

/// Sample Pearson correlation. Throws "degenerate series" on zero variance
/// and "length mismatch" on unequal lengths.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace handcap::featsel
