#include "handcap/verify/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "handcap/common/error.hpp"

namespace handcap::verify {

std::vector<Neighbor> nearest(const Matrix& train, std::span<const double> probe, std::size_t k) {
    if (train.empty()) throw InvalidArgument("empty store");
    if (k == 0) throw InvalidArgument("k must be positive");
    if (k > train.rows()) {
        throw InvalidArgument("k too large: " + std::to_string(k) + " > " + std::to_string(train.rows()));
    }
    if (probe.size() != train.cols()) throw InvalidArgument("dimension mismatch");
    std::vector<Neighbor> all(train.rows());
    for (std::size_t r = 0; r < train.rows(); ++r) {
        const auto row = train.row(r);
        double s = 0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double d = row[c] - probe[c];
            s += d * d;
        }
        all[r] = {r, s};
    }
    auto closer = [](const Neighbor& a, const Neighbor& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.row < b.row);
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
    for (auto& n : all) n.distance = std::sqrt(n.distance);
    return all;
}

int knn_predict(const Matrix& train, const std::vector<int>& labels, std::span<const double> probe, std::size_t k) {
    if (labels.size() != train.rows()) throw InvalidArgument("label count does not match rows");
    const auto nn = nearest(train, probe, k);
    struct Tally {
        std::size_t votes = 0;
        double sum = 0;
    };
    std::map<int, Tally> tally;
    for (const auto& n : nn) {
        auto& t = tally[labels[n.row]];
        ++t.votes;
        t.sum += n.distance;
    }
    int best = tally.begin()->first;
    for (const auto& [label, t] : tally) {
        const auto& b = tally[best];
        if (t.votes > b.votes ||
            (t.votes == b.votes && t.sum / static_cast<double>(t.votes) < b.sum / static_cast<double>(b.votes))) {
            best = label;
        }
    }
    return best;
}

void KnnClassifier::fit(Matrix x, std::vector<int> y) {
    if (x.rows() != y.size()) throw InvalidArgument("label count does not match rows");
    x_ = std::move(x);
    y_ = std::move(y);
}

double KnnClassifier::accuracy(const Matrix& x, const std::vector<int>& y) const {
    if (x.rows() != y.size()) throw InvalidArgument("label count does not match rows");
    if (x.empty()) throw InvalidArgument("empty evaluation set");
    std::size_t hits = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) hits += predict(x.row(r)) == y[r];
    return static_cast<double>(hits) / static_cast<double>(x.rows());
}

namespace {

struct Flattened {
    Matrix x;
    std::vector<int> y;
    std::vector<std::string> ids;
};

Flattened flatten(const TemplateStore& store) {
    Flattened f;
    f.ids = store.subjects();
    for (std::size_t s = 0; s < f.ids.size(); ++s) {
        for (const auto& v : store.samples(f.ids[s])) {
            f.x.append_row(v);
            f.y.push_back(static_cast<int>(s));
        }
    }
    return f;
}

}  // namespace

std::string knn_identify(std::span<const double> probe, const TemplateStore& store, std::size_t k) {
    if (store.empty()) throw InvalidArgument("empty store");
    const auto f = flatten(store);
    return f.ids[static_cast<std::size_t>(knn_predict(f.x, f.y, probe, k))];
}

double identification_accuracy(const TemplateStore& store, const std::map<std::string, std::vector<double>>& probes,
                               std::size_t k) {
    if (store.empty()) throw InvalidArgument("empty store");
    if (probes.empty()) throw InvalidArgument("no probes");
    const auto f = flatten(store);
    std::size_t hits = 0;
    for (const auto& [id, v] : probes) {
        hits += f.ids[static_cast<std::size_t>(knn_predict(f.x, f.y, v, k))] == id;
    }
    return static_cast<double>(hits) / static_cast<double>(probes.size());
}

}  // namespace handcap::verify
