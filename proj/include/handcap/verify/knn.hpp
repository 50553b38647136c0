#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "handcap/verify/matrix.hpp"
#include "handcap/verify/templates.hpp"

namespace handcap::verify {

struct Neighbor {
    std::size_t row = 0;
    double distance = 0;
};

/// The k rows of `train` nearest to `probe` (Euclidean), closest first.
/// Equal distances keep the lower row first.
std::vector<Neighbor> nearest(const Matrix& train, std::span<const double> probe, std::size_t k);

/// Majority label among the k nearest rows. A vote tie goes to the label
/// whose voters have the smaller mean distance, then to the smaller label.
/// Throws "empty store", "k too large" or "k must be positive".
int knn_predict(const Matrix& train, const std::vector<int>& labels, std::span<const double> probe, std::size_t k = 1);

class KnnClassifier {
public:
    explicit KnnClassifier(std::size_t k = 1) : k_(k) {}
    void fit(Matrix x, std::vector<int> y);
    int predict(std::span<const double> probe) const { return knn_predict(x_, y_, probe, k_); }
    /// Fraction of rows of `x` predicted as their label.
    double accuracy(const Matrix& x, const std::vector<int>& y) const;

private:
    std::size_t k_;
    Matrix x_;
    std::vector<int> y_;
};

/// knn_predict over every enrolled vector of the store.
std::string knn_identify(std::span<const double> probe, const TemplateStore& store, std::size_t k = 1);

/// Fraction of probes whose knn_identify answer is their own subject.
double identification_accuracy(const TemplateStore& store,
                               const std::map<std::string, std::vector<double>>& probes, std::size_t k = 1);

}  // namespace handcap::verify
