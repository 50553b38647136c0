#include "handcap/captcha/solution.hpp"

#include <cmath>

namespace handcap::captcha {

std::string_view outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Accept: return "accept";
        case Outcome::Reject: return "reject";
        case Outcome::Timeout: return "timeout";
    }
    return "?";
}

Verdict verify_solution(const std::array<int, 2>& truth, const std::array<int, 2>& answer, double elapsed_s,
                        MatchMode mode) {
    for (int a : answer) {
        if (a < 1 || a > 9) return {Outcome::Reject, "malformed"};
    }
    if (!std::isfinite(elapsed_s) || elapsed_s < 0) return {Outcome::Reject, "malformed"};
    if (elapsed_s > kSolveTimeLimit) return {Outcome::Timeout, "time limit exceeded"};
    const bool same = answer[0] == truth[0] && answer[1] == truth[1];
    const bool swapped = answer[0] == truth[1] && answer[1] == truth[0];
    if (same || (mode == MatchMode::Unordered && swapped)) return {Outcome::Accept, ""};
    return {Outcome::Reject, "incorrect"};
}

}  // namespace handcap::captcha
