#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "handcap/verify/forest.hpp"

namespace handcap::featsel {

struct Importance {
    std::vector<double> mean_delta;  // OOB accuracy drop averaged over trees
    std::vector<double> stddev;      // of the per-tree drops
    std::vector<double> std_error;   // stddev / sqrt(trees used)
    std::vector<double> score;       // mean_delta / stddev; 0 when both vanish, infinite when only stddev does
    std::vector<std::size_t> trees_used;
    std::vector<bool> defined;       // false when the feature's trees had no OOB rows

    nlohmann::json to_json() const;
};

/// Drop in tree t's OOB accuracy when column `feature` of its OOB rows is
/// replaced by the values at perm[i] (perm indexes oob_rows(t)). An
/// identity permutation gives exactly 0. Returns 0 for a tree without OOB rows.
double tree_permutation_delta(const verify::RandomForest& forest, std::size_t t, const verify::Matrix& x,
                              const std::vector<int>& y, std::size_t feature, const std::vector<std::size_t>& perm);

/// Permutation importance of every feature on the forest's own training
/// data `x`/`y` (the OOB rows refer to it). Permutations are seeded.
Importance permutation_importance(const verify::RandomForest& forest, const verify::Matrix& x,
                                  const std::vector<int>& y, std::uint64_t seed = 1);

}  // namespace handcap::featsel
