#include "handcap/verify/templates.hpp"

#include <cmath>

#include "handcap/common/error.hpp"

using nlohmann::json;

namespace handcap::verify {

TemplateStore::TemplateStore(std::vector<std::size_t> features, std::string subset_version)
    : features_(std::move(features)), subset_version_(std::move(subset_version)) {
    if (features_.empty()) throw InvalidArgument("empty feature subset");
}

void TemplateStore::enroll(const std::string& subject, const Samples& vectors) {
    if (subject.empty()) throw InvalidArgument("empty subject id");
    if (vectors.empty()) throw InvalidArgument("no samples for subject '" + subject + "'");
    for (const auto& v : vectors) {
        if (v.size() != dimension()) {
            throw InvalidArgument("dimension mismatch: subject '" + subject + "' sample has " +
                                  std::to_string(v.size()) + " features, store expects " +
                                  std::to_string(dimension()));
        }
    }
    auto& dst = subjects_[subject];
    dst.insert(dst.end(), vectors.begin(), vectors.end());
}

std::vector<double> TemplateStore::project(std::span<const double> full) const {
    std::vector<double> out;
    out.reserve(features_.size());
    for (auto i : features_) {
        if (i >= full.size()) throw InvalidArgument("dimension mismatch: feature index beyond vector");
        out.push_back(full[i]);
    }
    return out;
}

const Samples& TemplateStore::samples(const std::string& subject) const {
    const auto it = subjects_.find(subject);
    if (it == subjects_.end()) throw InvalidArgument("not enrolled: '" + subject + "'");
    return it->second;
}

std::vector<std::string> TemplateStore::subjects() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : subjects_) out.push_back(id);
    return out;
}

std::size_t TemplateStore::sample_count() const {
    std::size_t n = 0;
    for (const auto& [_, s] : subjects_) n += s.size();
    return n;
}

void TemplateStore::fit_sigma() {
    const std::size_t n = sample_count();
    if (n < 2) throw InvalidArgument("sigma needs at least 2 enrolled samples");
    std::vector<double> mean(dimension(), 0.0), m2(dimension(), 0.0);
    for (const auto& [_, rows] : subjects_) {
        for (const auto& v : rows) {
            for (std::size_t i = 0; i < dimension(); ++i) mean[i] += v[i];
        }
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    for (const auto& [_, rows] : subjects_) {
        for (const auto& v : rows) {
            for (std::size_t i = 0; i < dimension(); ++i) m2[i] += (v[i] - mean[i]) * (v[i] - mean[i]);
        }
    }
    std::vector<double> sigma(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) sigma[i] = std::sqrt(m2[i] / static_cast<double>(n - 1));
    set_sigma(std::move(sigma));
}

void TemplateStore::set_sigma(std::vector<double> sigma) {
    if (sigma.size() != dimension()) throw InvalidArgument("dimension mismatch: sigma length");
    warnings_.clear();
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (!std::isfinite(sigma[i]) || sigma[i] < 0) throw InvalidArgument("sigma must be finite and non-negative");
        if (sigma[i] == 0) {
            warnings_.push_back("feature " + std::to_string(features_[i]) + " has zero spread; excluded from matching");
        }
    }
    sigma_ = std::move(sigma);
}

json TemplateStore::to_json() const {
    json subjects = json::array();
    for (const auto& [id, rows] : subjects_) subjects.push_back({{"subject_id", id}, {"samples", rows}});
    return json{{"features", features_},
                {"subset_version", subset_version_},
                {"sigma", sigma_},
                {"subjects", subjects}};
}

TemplateStore TemplateStore::from_json(const json& j) {
    TemplateStore s(j.at("features").get<std::vector<std::size_t>>(), j.value("subset_version", std::string{}));
    for (const auto& e : j.at("subjects")) {
        s.enroll(e.at("subject_id").get<std::string>(), e.at("samples").get<Samples>());
    }
    const auto sigma = j.value("sigma", std::vector<double>{});
    if (!sigma.empty()) s.set_sigma(sigma);
    return s;
}

FoldSplit rotation_split(const std::map<std::string, Samples>& samples, int fold) {
    if (fold < 0 || fold > 2) throw InvalidArgument("fold must be 0, 1 or 2");
    FoldSplit out;
    for (const auto& [id, rows] : samples) {
        if (rows.size() != 3) {
            throw InvalidArgument("rotation needs 3 samples per subject; '" + id + "' has " +
                                  std::to_string(rows.size()));
        }
        for (int i = 0; i < 3; ++i) {
            if (i == fold) {
                out.probes[id] = rows[i];
            } else {
                out.enrolled[id].push_back(rows[i]);
            }
        }
    }
    return out;
}

}  // namespace handcap::verify
