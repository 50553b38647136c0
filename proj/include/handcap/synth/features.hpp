#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Feature-level synthetic populations for the matchers, where rendering and
// measuring hands would only add cost.
namespace handcap::synth {

using FeatureSamples = std::map<std::string, std::vector<std::vector<double>>>;

/// Subject means uniform in [0, 1]^dim; each sample adds N(0, noise) per
/// feature. Ids are "s0000", "s0001", ...
FeatureSamples feature_population(std::size_t subjects, std::size_t samples, std::size_t dim, double noise,
                                  std::uint64_t seed);

/// Planted-feature population: the `informative` columns follow the
/// subject-mean model above, every other column is U[0, 1] per sample and
/// carries no identity.
FeatureSamples planted_population(std::size_t subjects, std::size_t samples, std::size_t dim,
                                  const std::vector<std::size_t>& informative, double noise, std::uint64_t seed);

}  // namespace handcap::synth
