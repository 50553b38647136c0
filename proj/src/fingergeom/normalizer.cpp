#include "handcap/fingergeom/normalizer.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include <json.hpp>

#include "handcap/common/error.hpp"

namespace handcap::fingergeom {

void MinMaxNormalizer::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidArgument("normalizer needs at least one training row");
    const std::size_t n = rows.front().size();
    min_.assign(n, 0.0);
    max_.assign(n, 0.0);
    constant_.clear();
    warnings_.clear();
    for (std::size_t j = 0; j < n; ++j) {
        min_[j] = max_[j] = rows.front()[j];
    }
    for (const auto& r : rows) {
        if (r.size() != n) throw InvalidArgument("normalizer rows differ in length");
        for (std::size_t j = 0; j < n; ++j) {
            min_[j] = std::min(min_[j], r[j]);
            max_[j] = std::max(max_[j], r[j]);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (max_[j] > min_[j]) continue;
        constant_.push_back(j);
        warnings_.push_back("feature " + std::to_string(j) + " is constant in training; mapped to 0");
    }
}

std::vector<double> MinMaxNormalizer::apply(std::span<const double> v) const {
    if (!fitted()) throw InvalidArgument("normalizer not fitted");
    if (v.size() != min_.size()) throw InvalidArgument("dimension mismatch");
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double range = max_[j] - min_[j];
        if (range <= 0) continue;
        out[j] = (v[j] - min_[j]) / range;
        if (clamp) out[j] = std::clamp(out[j], 0.0, 1.0);
    }
    return out;
}

std::string MinMaxNormalizer::version() const {
    // FNV-1a over the raw extrema.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](double d) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &d, sizeof d);
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    };
    for (double d : min_) feed(d);
    for (double d : max_) feed(d);
    char buf[24];
    std::snprintf(buf, sizeof buf, "mm-%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string MinMaxNormalizer::to_json() const {
    nlohmann::json j;
    j["min"] = min_;
    j["max"] = max_;
    j["clamp"] = clamp;
    j["version"] = version();
    return j.dump();
}

MinMaxNormalizer MinMaxNormalizer::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MinMaxNormalizer n;
    n.min_ = j.at("min").get<std::vector<double>>();
    n.max_ = j.at("max").get<std::vector<double>>();
    if (n.min_.size() != n.max_.size()) throw InvalidArgument("normalizer extrema differ in length");
    n.clamp = j.value("clamp", false);
    for (std::size_t i = 0; i < n.min_.size(); ++i) {
        if (!(n.max_[i] > n.min_[i])) n.constant_.push_back(i);
    }
    return n;
}

}  // namespace handcap::fingergeom
