#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace handcap::imaging {

// Seeded random stream. Built on std::mt19937_64, whose output sequence is
// fixed by the standard, with hand-rolled mappings to ranges so results do
// not depend on the standard library's distribution implementations.
// Not thread-safe: use one instance per task.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], unbiased.
    int uniform_int(int lo, int hi);

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (one value per call, the pair's twin is cached).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Independent stream derived from this one's seed and a stream number.
    RandomSource fork(std::uint64_t stream) const;

    template <class It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = index(i);
            using std::swap;
            swap(first[i - 1], first[j]);
        }
    }

    // UniformRandomBitGenerator interface.
    using result_type = std::uint64_t;
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer; used to derive seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace handcap::imaging
