#include "handcap/synth/features.hpp"

#include <cstdio>

#include "handcap/imaging/random.hpp"

namespace handcap::synth {

FeatureSamples feature_population(std::size_t subjects, std::size_t samples, std::size_t dim, double noise,
                                  std::uint64_t seed) {
    FeatureSamples out;
    imaging::RandomSource rng(seed);
    char id[24];
    for (std::size_t s = 0; s < subjects; ++s) {
        std::vector<double> mean(dim);
        for (auto& m : mean) m = rng.uniform();
        std::snprintf(id, sizeof id, "s%04zu", s);
        auto& rows = out[id];
        for (std::size_t k = 0; k < samples; ++k) {
            auto v = mean;
            for (auto& x : v) x += rng.normal(0.0, noise);
            rows.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace handcap::synth

namespace handcap::synth {

FeatureSamples planted_population(std::size_t subjects, std::size_t samples, std::size_t dim,
                                  const std::vector<std::size_t>& informative, double noise, std::uint64_t seed) {
    std::vector<bool> planted(dim, false);
    for (auto c : informative) planted.at(c) = true;
    FeatureSamples out;
    imaging::RandomSource rng(seed);
    char id[24];
    for (std::size_t s = 0; s < subjects; ++s) {
        std::vector<double> mean(dim);
        for (auto& m : mean) m = rng.uniform();
        std::snprintf(id, sizeof id, "s%04zu", s);
        auto& rows = out[id];
        for (std::size_t k = 0; k < samples; ++k) {
            std::vector<double> v(dim);
            for (std::size_t d = 0; d < dim; ++d) v[d] = planted[d] ? mean[d] + rng.normal(0.0, noise) : rng.uniform();
            rows.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace handcap::synth
