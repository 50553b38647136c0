#include "handcap/pad/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "handcap/common/error.hpp"
#include "handcap/verify/forest.hpp"
#include "handcap/verify/knn.hpp"

using nlohmann::json;

namespace handcap::pad {

namespace {

std::vector<std::string> metric_names(const std::vector<Metric>& ms) {
    std::vector<std::string> out;
    for (Metric m : ms) out.emplace_back(metric_name(m));
    return out;
}

verify::Matrix normalized(const fingergeom::MinMaxNormalizer& norm, const verify::Matrix& x) {
    verify::Matrix out;
    for (std::size_t r = 0; r < x.rows(); ++r) out.append_row(norm.apply(x.row(r)));
    return out;
}

fingergeom::MinMaxNormalizer fit_normalizer(const verify::Matrix& x) {
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < x.rows(); ++r) rows.emplace_back(x.row(r).begin(), x.row(r).end());
    fingergeom::MinMaxNormalizer n;
    n.fit(rows);
    return n;
}

}  // namespace

std::string_view classifier_name(Classifier c) { return c == Classifier::Knn ? "knn" : "rf"; }

Classifier parse_classifier(std::string_view s) {
    if (s == "knn") return Classifier::Knn;
    if (s == "rf") return Classifier::Rf;
    throw InvalidArgument("unknown classifier: '" + std::string(s) + "'");
}

json PadResult::to_json() const {
    return json{{"fgr", fgr},
                {"ffr", ffr},
                {"aer", aer},
                {"real_tested", real_tested},
                {"fake_tested", fake_tested},
                {"false_genuine", false_genuine},
                {"false_fake", false_fake},
                {"folds", folds},
                {"classifier", classifier_name(classifier)},
                {"metrics", metric_names(metrics)}};
}

PadResult evaluate_pad(const QualitySet& train, const QualitySet& test, const PadOptions& options) {
    if (train.metrics != test.metrics) throw InvalidArgument("train and test metric subsets differ");
    if (train.metrics.empty()) throw InvalidArgument("empty metric subset");
    const auto ytr = train.int_labels();
    if (std::adjacent_find(ytr.begin(), ytr.end(), std::not_equal_to<>()) == ytr.end()) {
        throw InvalidArgument("single-class training set");
    }
    PadResult r;
    r.classifier = options.classifier;
    r.metrics = train.metrics;
    for (auto l : test.labels) (l == Label::Real ? r.real_tested : r.fake_tested)++;
    if (r.real_tested == 0 || r.fake_tested == 0) throw InvalidArgument("test set lacks one of the classes");

    const auto norm = fit_normalizer(train.values);
    const auto xtr = normalized(norm, train.values);
    const auto xte = normalized(norm, test.values);
    const auto real = static_cast<int>(Label::Real);

    auto tally = [&](const std::vector<int>& predicted, std::size_t& fg, std::size_t& ff) {
        fg = ff = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            const bool is_real = test.labels[i] == Label::Real;
            if (!is_real && predicted[i] == real) ++fg;
            if (is_real && predicted[i] != real) ++ff;
        }
    };

    if (options.classifier == Classifier::Knn) {
        verify::KnnClassifier knn(options.k);
        knn.fit(xtr, ytr);
        std::vector<int> pred;
        for (std::size_t i = 0; i < xte.rows(); ++i) pred.push_back(knn.predict(xte.row(i)));
        tally(pred, r.false_genuine, r.false_fake);
        r.fgr = static_cast<double>(r.false_genuine) / static_cast<double>(r.fake_tested);
        r.ffr = static_cast<double>(r.false_fake) / static_cast<double>(r.real_tested);
    } else {
        const auto rf = verify::RandomForest::train(xtr, ytr, {.trees = options.trees, .seed = options.seed});
        const std::size_t trees = rf.tree_count();
        // votes[i] counts real votes among the first n trees as n grows.
        std::vector<std::size_t> real_votes(xte.rows(), 0);
        std::vector<int> pred(xte.rows());
        double fgr_sum = 0, ffr_sum = 0;
        for (std::size_t n = 1; n <= trees; ++n) {
            for (std::size_t i = 0; i < xte.rows(); ++i) {
                real_votes[i] += rf.predict_tree(n - 1, xte.row(i)) == real;
                // Majority, ties to the smaller label (fake), as RandomForest::predict.
                pred[i] = 2 * real_votes[i] > n ? real : static_cast<int>(Label::Fake);
            }
            if (options.average_tree_counts || n == trees) {
                std::size_t fg = 0, ff = 0;
                tally(pred, fg, ff);
                fgr_sum += static_cast<double>(fg) / static_cast<double>(r.fake_tested);
                ffr_sum += static_cast<double>(ff) / static_cast<double>(r.real_tested);
                if (n == trees) tally(pred, r.false_genuine, r.false_fake);
            }
        }
        const double counted = options.average_tree_counts ? static_cast<double>(trees) : 1.0;
        r.fgr = fgr_sum / counted;
        r.ffr = ffr_sum / counted;
    }
    r.aer = 0.5 * (r.fgr + r.ffr);
    return r;
}

PadModel PadModel::fit(const QualitySet& train, const PadOptions& options) {
    if (train.metrics.empty()) throw InvalidArgument("empty metric subset");
    const auto y = train.int_labels();
    if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) {
        throw InvalidArgument("single-class training set");
    }
    PadModel m;
    m.metrics_ = train.metrics;
    m.norm_ = fit_normalizer(train.values);
    m.classifier_ = options.classifier;
    const auto x = normalized(m.norm_, train.values);
    if (options.classifier == Classifier::Knn) {
        m.knn_ = verify::KnnClassifier(options.k);
        m.knn_.fit(x, y);
    } else {
        m.rf_ = verify::RandomForest::train(x, y, {.trees = options.trees, .seed = options.seed});
    }
    return m;
}

Label PadModel::classify_values(std::span<const double> raw) const {
    if (raw.size() != metrics_.size()) throw InvalidArgument("dimension mismatch");
    const auto v = norm_.apply(raw);
    const int label = rf_ ? rf_->predict(v) : knn_.predict(v);
    return label == static_cast<int>(Label::Real) ? Label::Real : Label::Fake;
}

Label PadModel::classify(const Raster& img) const { return classify_values(quality_vector(img, metrics_).values); }

PadResult evaluate_pad_rotation(const QualitySet& set, const PadOptions& options) {
    // (subject, label) -> row indices ordered by sample name
    std::map<std::pair<std::string, Label>, std::vector<std::pair<std::string, std::size_t>>> groups;
    for (std::size_t i = 0; i < set.size(); ++i) {
        auto [subject, sample] = split_id(set.ids[i]);
        groups[{subject, set.labels[i]}].push_back({sample, i});
    }
    for (auto& [key, rows] : groups) {
        if (rows.size() != 3) {
            throw InvalidArgument("rotation needs 3 samples per subject and class; '" + key.first + "' (" +
                                  std::string(label_name(key.second)) + ") has " + std::to_string(rows.size()));
        }
        std::sort(rows.begin(), rows.end());
    }
    PadResult total;
    total.folds = 3;
    total.classifier = options.classifier;
    total.metrics = set.metrics;
    for (int fold = 0; fold < 3; ++fold) {
        std::vector<std::size_t> tr, te;
        for (const auto& [_, rows] : groups) {
            for (int k = 0; k < 3; ++k) (k == fold ? te : tr).push_back(rows[static_cast<std::size_t>(k)].second);
        }
        const auto r = evaluate_pad(set.rows(tr), set.rows(te), options);
        total.fgr += r.fgr / 3;
        total.ffr += r.ffr / 3;
        total.real_tested += r.real_tested;
        total.fake_tested += r.fake_tested;
        total.false_genuine += r.false_genuine;
        total.false_fake += r.false_fake;
    }
    total.aer = 0.5 * (total.fgr + total.ffr);
    return total;
}

json GreedyResult::to_json() const {
    json solo_j = json::array(), steps_j = json::array();
    for (const auto& [m, aer] : solo) solo_j.push_back({{"metric", metric_name(m)}, {"aer", aer}});
    for (const auto& s : steps) {
        steps_j.push_back({{"metric", metric_name(s.metric)}, {"aer", s.aer}, {"accepted", s.accepted}});
    }
    return json{{"subset", metric_names(subset)}, {"trace", trace}, {"solo", solo_j}, {"steps", steps_j}};
}

GreedyResult greedy_metric_subset(const std::vector<Metric>& candidates, const SubsetEvaluator& aer_of) {
    if (candidates.empty()) throw InvalidArgument("no candidate metrics");
    GreedyResult g;
    for (Metric m : candidates) g.solo.push_back({m, aer_of({m})});
    std::stable_sort(g.solo.begin(), g.solo.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    g.subset.push_back(g.solo.front().first);
    g.trace.push_back(g.solo.front().second);
    for (std::size_t i = 1; i < g.solo.size(); ++i) {
        auto trial = g.subset;
        trial.push_back(g.solo[i].first);
        const double aer = aer_of(trial);
        const bool keep = aer < g.trace.back();
        g.steps.push_back({g.solo[i].first, aer, keep});
        if (keep) {
            g.subset = std::move(trial);
            g.trace.push_back(aer);
        }
    }
    return g;
}

GreedyResult greedy_metric_subset(const QualitySet& set, const PadOptions& options) {
    return greedy_metric_subset(set.metrics, [&](const std::vector<Metric>& subset) {
        return evaluate_pad_rotation(set.select(subset), options).aer;
    });
}

GreedyResult greedy_metric_subset(const QualitySet& train, const QualitySet& test, const PadOptions& options) {
    return greedy_metric_subset(train.metrics, [&](const std::vector<Metric>& subset) {
        return evaluate_pad(train.select(subset), test.select(subset), options).aer;
    });
}

double pad_threshold_distance(std::span<const double> trained, std::span<const double> probe,
                              std::span<const double> sigma, RadicalReading reading, std::size_t* skipped) {
    if (trained.size() != probe.size() || trained.size() != sigma.size()) {
        throw InvalidArgument("dimension mismatch");
    }
    double d = 0;
    std::size_t skip = 0;
    for (std::size_t i = 0; i < trained.size(); ++i) {
        if (!(sigma[i] > 0)) {
            ++skip;
            continue;
        }
        const double scale = reading == RadicalReading::SqrtSigma ? std::sqrt(sigma[i]) : sigma[i];
        d += std::abs(trained[i] - probe[i]) / scale;
    }
    if (skipped) *skipped = skip;
    return d;
}

json ThresholdAnalysis::to_json() const {
    return json{{"real_eer", real.eer},
                {"real_eer_threshold", real.eer_threshold},
                {"fake_eer", fake.eer},
                {"fake_eer_threshold", fake.eer_threshold},
                {"sigma", sigma},
                {"comparisons", comparisons},
                {"warnings", warnings}};
}

ThresholdAnalysis threshold_analysis(const QualitySet& train, const QualitySet& test, RadicalReading reading) {
    if (train.metrics != test.metrics) throw InvalidArgument("train and test metric subsets differ");
    if (train.size() < 2) throw InvalidArgument("threshold analysis needs at least 2 training vectors");
    const auto norm = fit_normalizer(train.values);
    const auto xtr = normalized(norm, train.values);
    const auto xte = normalized(norm, test.values);

    ThresholdAnalysis a;
    const std::size_t m = xtr.cols();
    a.sigma.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const auto col = xtr.column(j);
        double mean = 0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        double ss = 0;
        for (double v : col) ss += (v - mean) * (v - mean);
        a.sigma[j] = std::sqrt(ss / static_cast<double>(col.size() - 1));
        if (a.sigma[j] == 0) {
            a.warnings.push_back(std::string(metric_name(train.metrics[j])) + " is constant in training; skipped");
        }
    }
    std::vector<double> real_same, real_other, fake_same, fake_other;
    for (std::size_t i = 0; i < xte.rows(); ++i) {
        for (std::size_t t = 0; t < xtr.rows(); ++t) {
            const double d = pad_threshold_distance(xtr.row(t), xte.row(i), a.sigma, reading);
            const bool same = train.labels[t] == test.labels[i];
            if (test.labels[i] == Label::Real) {
                (same ? real_same : real_other).push_back(d);
            } else {
                (same ? fake_same : fake_other).push_back(d);
            }
            ++a.comparisons;
        }
    }
    if (real_same.empty() || fake_same.empty()) throw InvalidArgument("threshold analysis needs both classes");
    a.real = verify::roc(real_same, real_other);
    a.fake = verify::roc(fake_same, fake_other);
    return a;
}

}  // namespace handcap::pad
