#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "handcap/captcha/layout.hpp"
#include "handcap/captcha/store.hpp"

namespace handcap::captcha {

struct Challenge {
    std::string id;
    std::uint64_t seed = 0;
    Raster image;                 // RGB, spec.canvas sized
    std::array<int, 2> truth{};   // cells of genuine image 1 and 2; never sent to clients
    std::string genuine_class;
    std::string background;
    std::vector<std::string> fakes;
    std::vector<int> occupied_cells;  // sorted
    std::vector<Placement> placements;
    std::string created_at;  // ISO 8601 UTC
    ChallengeSpec spec;

    int n_fake() const { return static_cast<int>(fakes.size()); }
};

/// Full generation pipeline; the seed determines everything except
/// created_at. Throws InvalidArgument for an empty store and propagates
/// Error("layout failure").
Challenge generate_challenge(const StoreSet& stores, const ChallengeSpec& spec, std::uint64_t seed);

/// Like generate_challenge, but on layout failure retries with derived seeds
/// (up to `tries` times). The returned challenge carries the seed that worked.
Challenge generate_challenge_retrying(const StoreSet& stores, const ChallengeSpec& spec, std::uint64_t seed,
                                      int tries = 8);

std::string challenge_id(std::uint64_t seed);
std::string utc_timestamp();

nlohmann::json spec_to_json(const ChallengeSpec& spec);
ChallengeSpec spec_from_json(const nlohmann::json& j);

/// {id, seed, occupied_cells, created_at, spec}; the truth is not included.
nlohmann::json sidecar_json(const Challenge& ch);

/// Writes `<dir>/<id>.png` and `<dir>/<id>.json`. When `truth_dir` is not
/// empty the truth goes to `<truth_dir>/<id>.truth.json`.
void write_challenge(const Challenge& ch, const std::filesystem::path& dir,
                     const std::filesystem::path& truth_dir = {});

struct EntropyGapReport {
    double genuine_difference = 0;           // |H(G1) - H(G2)| of the placed class
    std::vector<double> fake_differences;    // |H(F_i) - H(F_{i+1 mod n})| in placement order
    double fake_difference_mean = 0;
    std::vector<double> conditional;         // H(challenge region | placed hand) per placement
    double conditional_mean = 0;

    nlohmann::json to_json() const;
};

EntropyGapReport entropy_gap_report(const Challenge& ch, const StoreSet& stores);

}  // namespace handcap::captcha
