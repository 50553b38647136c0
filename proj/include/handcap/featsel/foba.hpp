#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "handcap/featsel/evaluator.hpp"

namespace handcap::featsel {

enum class Relevance { Relevant, ConditionallyRelevant, Redundant, Irrelevant };

std::string_view relevance_name(Relevance r);
Relevance parse_relevance(std::string_view s);

/// A unit FoBa accepts or rejects as a whole: one column, or a global group.
struct Candidate {
    std::string name;
    std::vector<std::size_t> columns;
};

/// One candidate per column, named by feature_name when the width is 104.
std::vector<Candidate> local_candidates(std::size_t columns);
/// One group per attribute holding that attribute on every finger.
std::vector<Candidate> global_candidates(std::size_t columns);

struct FobaOptions {
    double epsilon = 0.005;  // absolute accuracy margin
    std::uint64_t seed = 1;  // picks the first candidate
    bool tag = true;         // tagging costs up to two extra evaluations per candidate
};

struct FobaResult {
    std::vector<std::size_t> sequence;  // candidate order used by both passes
    std::vector<std::size_t> forward;   // accepted in the forward pass, in order
    std::vector<double> trace;          // accuracy after each forward accept
    std::vector<std::size_t> members;   // survivors of the backward pass
    std::vector<double> backward_trace; // accuracy after each backward removal
    std::vector<Relevance> tags;        // per candidate, empty unless tagged
    double accuracy = 0;

    /// Member columns in member order, without repeats.
    std::vector<std::size_t> columns(const std::vector<Candidate>& candidates) const;
};

/// Forward pass from a seeded random first candidate through the remaining
/// candidates in natural order, accepting those that raise accuracy by at
/// least epsilon; then a backward pass over the accepted set in the same
/// order, dropping members whose removal does not lower accuracy.
/// Throws on an empty candidate list.
FobaResult foba(const std::vector<Candidate>& candidates, const SubsetEvaluator& eval, const FobaOptions& opts = {});

/// Tags every candidate against a final subset:
///   relevant                in the final subset
///   redundant               accepted then dropped, or informative alone but
///                           not needed next to the final subset
///   conditionally relevant  uninformative alone, but raises the final subset's accuracy
///   irrelevant              otherwise
/// "Informative alone" means a solo accuracy at least epsilon plus two
/// binomial standard errors above the evaluator's baseline.
std::vector<Relevance> tag_candidates(const std::vector<Candidate>& candidates,
                                      const std::vector<std::size_t>& final_columns,
                                      const std::vector<std::size_t>& dropped_columns, const SubsetEvaluator& eval,
                                      double epsilon);

struct MfobaResult {
    FobaResult global, local;
    std::vector<std::size_t> f1, f2, f3, f_opt;  // columns
    std::vector<double> backward_trace;          // step-4 accuracy after each removal
    std::vector<double> trace;                   // accuracy of the first i+1 members of f_opt
    std::vector<Relevance> tags;                 // per column
    double accuracy_f3 = 0;
    double accuracy = 0;  // of f_opt
    double epsilon = 0;
    std::uint64_t seed = 0;

    /// Cardinalities |F1|, |F2|, |F3|, |F_Opt|.
    std::vector<std::size_t> cardinality_trace() const { return {f1.size(), f2.size(), f3.size(), f_opt.size()}; }
};

/// FoBa over global groups, FoBa over single columns, union (global members
/// first), then single-column backward elimination of the union. Global
/// groups are accepted or rejected atomically. The column count must be a
/// multiple of 26.
MfobaResult mfoba(const SubsetEvaluator& eval, const FobaOptions& opts = {});

/// Subset file: {members: [{finger, attribute}], trace, tags: [{finger, attribute, tag}], ...}.
/// Requires 104 columns.
nlohmann::json subset_json(const MfobaResult& r);

struct FeatureSubset {
    std::vector<FeatureIndex> members;
    std::vector<double> trace;

    std::vector<std::size_t> columns() const;
    /// Throws InvalidArgument on unknown fingers, bad attributes or duplicates.
    static FeatureSubset from_json(const nlohmann::json& j);
};

}  // namespace handcap::featsel
