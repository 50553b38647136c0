#pragma once

#include <array>
#include <string>

#include "handcap/captcha/generator.hpp"

namespace handcap::captcha {

inline constexpr double kSolveTimeLimit = 30.0;  // seconds

enum class Outcome { Accept, Reject, Timeout };

std::string_view outcome_name(Outcome o);

// Unordered is the human-facing rule. Ordered additionally requires the
// answer to list genuine image 1 before image 2.
enum class MatchMode { Unordered, Ordered };

struct Verdict {
    Outcome outcome = Outcome::Reject;
    std::string reason;  // "malformed", "incorrect", "time limit exceeded" or empty on accept
};

/// Accept iff the answer matches the truth and elapsed <= 30 s. Labels
/// outside 1..9 or a non-finite/negative elapsed time are "malformed"; a late
/// answer is a timeout whether or not it is correct.
Verdict verify_solution(const std::array<int, 2>& truth, const std::array<int, 2>& answer, double elapsed_s,
                        MatchMode mode = MatchMode::Unordered);

inline Verdict verify_solution(const Challenge& ch, const std::array<int, 2>& answer, double elapsed_s,
                               MatchMode mode = MatchMode::Unordered) {
    return verify_solution(ch.truth, answer, elapsed_s, mode);
}

}  // namespace handcap::captcha
