#include "handcap/featsel/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "handcap/common/error.hpp"
#include "handcap/fingergeom/features.hpp"
#include "handcap/imaging/random.hpp"
#include "handcap/verify/forest.hpp"
#include "handcap/verify/knn.hpp"

namespace handcap::featsel {

std::size_t FeatureIndex::column() const {
    if (finger < 0 || finger > 3 || attribute < 1 || attribute > fingergeom::kFeaturesPerFinger) {
        throw InvalidArgument("feature index out of range: finger " + std::to_string(finger) + ", attribute " +
                              std::to_string(attribute));
    }
    return static_cast<std::size_t>(finger * fingergeom::kFeaturesPerFinger + attribute - 1);
}

FeatureIndex FeatureIndex::from_column(std::size_t column) {
    if (column >= static_cast<std::size_t>(fingergeom::kHandFeatures)) {
        throw InvalidArgument("feature column out of range: " + std::to_string(column));
    }
    const int c = static_cast<int>(column);
    return {c / fingergeom::kFeaturesPerFinger, c % fingergeom::kFeaturesPerFinger + 1, Scope::Local};
}

Dataset dataset_from_samples(const std::map<std::string, std::vector<std::vector<double>>>& samples) {
    Dataset d;
    for (const auto& [id, rows] : samples) {
        const int label = static_cast<int>(d.subjects.size());
        d.subjects.push_back(id);
        for (const auto& r : rows) {
            if (!d.x.empty() && r.size() != d.x.cols()) throw InvalidArgument("dimension mismatch");
            d.x.append_row(r);
            d.y.push_back(label);
        }
    }
    if (d.x.empty()) throw InvalidArgument("empty dataset");
    return d;
}

SubsetEvaluator::SubsetEvaluator(const Dataset& data, EvalOptions opts) : opts_(opts) {
    if (data.x.rows() != data.y.size()) throw InvalidArgument("label count mismatch");
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < data.y.size(); ++i) by_label[data.y[i]].push_back(i);

    imaging::RandomSource rng(opts.seed);
    std::vector<std::size_t> train_rows, val_rows;
    for (auto& [label, rows] : by_label) {
        rng.shuffle(rows.begin(), rows.end());
        const std::size_t n_train = (rows.size() + 1) / 2;
        for (std::size_t i = 0; i < rows.size(); ++i) (i < n_train ? train_rows : val_rows).push_back(rows[i]);
    }
    if (val_rows.empty()) throw InvalidArgument("no validation rows: every subject needs 2 samples");
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(val_rows.begin(), val_rows.end());
    train_ = data.x.select_rows(train_rows);
    val_ = data.x.select_rows(val_rows);
    for (auto r : train_rows) train_y_.push_back(data.y[r]);
    for (auto r : val_rows) val_y_.push_back(data.y[r]);
}

double SubsetEvaluator::operator()(const std::vector<std::size_t>& columns) const {
    std::vector<std::size_t> key = columns;
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    for (auto c : key) {
        if (c >= train_.cols()) throw InvalidArgument("feature column out of range: " + std::to_string(c));
    }
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
    ++evaluations_;

    double acc = 0;
    if (key.empty()) {
        std::map<int, std::size_t> counts;
        for (int y : train_y_) ++counts[y];
        const auto best = std::max_element(counts.begin(), counts.end(),
                                           [](const auto& a, const auto& b) { return a.second < b.second; });
        acc = static_cast<double>(std::count(val_y_.begin(), val_y_.end(), best->first)) /
              static_cast<double>(val_y_.size());
    } else if (opts_.classifier == EvalClassifier::Knn) {
        verify::KnnClassifier knn(opts_.k);
        knn.fit(train_.select_columns(key), train_y_);
        acc = knn.accuracy(val_.select_columns(key), val_y_);
    } else {
        verify::ForestParams p;
        p.trees = opts_.trees;
        p.seed = opts_.seed;
        const auto rf = verify::RandomForest::train(train_.select_columns(key), train_y_, p);
        acc = rf.accuracy(val_.select_columns(key), val_y_);
    }
    cache_.emplace(std::move(key), acc);
    return acc;
}

std::vector<Ranked> rank_independent(const std::vector<std::vector<std::size_t>>& candidates,
                                     const SubsetEvaluator& eval) {
    std::vector<Ranked> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) out.push_back({i, eval(candidates[i])});
    std::stable_sort(out.begin(), out.end(), [](const Ranked& a, const Ranked& b) { return a.accuracy > b.accuracy; });
    return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InvalidArgument("length mismatch");
    if (a.size() < 2) throw InvalidArgument("degenerate series");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0 || sbb == 0) throw InvalidArgument("degenerate series");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace handcap::featsel
