#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "handcap/pad/quality.hpp"
#include "handcap/verify/forest.hpp"
#include "handcap/verify/knn.hpp"
#include "handcap/verify/roc.hpp"

namespace handcap::pad {

enum class Classifier { Knn, Rf };
std::string_view classifier_name(Classifier c);
Classifier parse_classifier(std::string_view s);  // "knn" / "rf"

struct PadOptions {
    Classifier classifier = Classifier::Knn;
    std::size_t k = 1;
    int trees = 100;
    /// RF only: average the error rates of the ensembles made of the first
    /// 1, 2, ..., trees trees instead of reporting the full ensemble alone.
    bool average_tree_counts = true;
    std::uint64_t seed = 1;
};

struct PadResult {
    double fgr = 0;  // fakes accepted as real
    double ffr = 0;  // reals rejected as fake
    double aer = 0;  // 0.5 * (fgr + ffr)
    std::size_t real_tested = 0;
    std::size_t fake_tested = 0;
    std::size_t false_genuine = 0;  // counts from the full classifier, summed over folds
    std::size_t false_fake = 0;
    int folds = 1;
    Classifier classifier = Classifier::Knn;
    std::vector<Metric> metrics;

    nlohmann::json to_json() const;
};

/// Both sets are normalized with extrema fit on `train`. Throws
/// "single-class training set" and when the test set lacks a class.
PadResult evaluate_pad(const QualitySet& train, const QualitySet& test, const PadOptions& options = {});

/// Real/fake classifier fit once on a quality set and applied to single
/// images, the way the second stage uses it.
class PadModel {
public:
    /// Same checks as evaluate_pad on the training side.
    static PadModel fit(const QualitySet& train, const PadOptions& options = {});

    const std::vector<Metric>& metrics() const { return metrics_; }
    /// Raw (unnormalized) metric values in metrics() order.
    Label classify_values(std::span<const double> raw) const;
    Label classify(const Raster& img) const;

private:
    std::vector<Metric> metrics_;
    fingergeom::MinMaxNormalizer norm_;
    Classifier classifier_ = Classifier::Knn;
    verify::KnnClassifier knn_;
    std::optional<verify::RandomForest> rf_;
};

/// Three folds over "<subject>/<sample>" ids with 3 samples per subject and
/// class: fold f tests the f-th sample (by name) and trains on the other two.
/// Rates are averaged over folds.
PadResult evaluate_pad_rotation(const QualitySet& set, const PadOptions& options = {});

struct GreedyStep {
    Metric metric;
    double aer = 0;  // AER of the current subset plus this metric
    bool accepted = false;
};

struct GreedyResult {
    std::vector<std::pair<Metric, double>> solo;  // ascending AER, ties by metric order
    std::vector<Metric> subset;
    std::vector<double> trace;  // AER after the seed and after each accepted metric
    std::vector<GreedyStep> steps;

    nlohmann::json to_json() const;
};

using SubsetEvaluator = std::function<double(const std::vector<Metric>&)>;

/// Seeds with the best solo metric, then tries the others in solo-rank
/// order, keeping each one that strictly lowers the AER.
GreedyResult greedy_metric_subset(const std::vector<Metric>& candidates, const SubsetEvaluator& aer_of);
GreedyResult greedy_metric_subset(const QualitySet& set, const PadOptions& options = {});
GreedyResult greedy_metric_subset(const QualitySet& train, const QualitySet& test, const PadOptions& options = {});

enum class RadicalReading {
    SqrtSigma,  // |dq| / sqrt(sigma), the default
    Sigma,      // |dq| / sigma
};

/// sum_i |trained_i - probe_i| / sqrt(sigma_i); metrics with sigma 0 are
/// skipped and counted in `skipped`.
double pad_threshold_distance(std::span<const double> trained, std::span<const double> probe,
                              std::span<const double> sigma, RadicalReading reading = RadicalReading::SqrtSigma,
                              std::size_t* skipped = nullptr);

struct ThresholdAnalysis {
    verify::RocCurve real;  // real probes: distances to trained reals vs trained fakes
    verify::RocCurve fake;  // fake probes: distances to trained fakes vs trained reals
    std::vector<double> sigma;
    std::vector<std::string> warnings;
    std::size_t comparisons = 0;  // |train| x |test|

    nlohmann::json to_json() const;
};

/// Every test vector against every training vector (normalized with training
/// extrema, sigma from training samples).
ThresholdAnalysis threshold_analysis(const QualitySet& train, const QualitySet& test,
                                     RadicalReading reading = RadicalReading::SqrtSigma);

}  // namespace handcap::pad
