#pragma once

#include <array>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "handcap/captcha/generator.hpp"
#include "handcap/captcha/solution.hpp"
#include "handcap/common/error.hpp"
#include "handcap/gateway/stage2.hpp"

namespace handcap::gateway {

enum class SessionState { Issued, Solved, PadPassed, Verified, Rejected, Expired };

std::string_view state_name(SessionState s);
bool is_terminal(SessionState s);
/// Forward steps along issued -> solved -> pad_passed -> verified, plus
/// rejected/expired from any non-terminal state.
bool legal_transition(SessionState from, SessionState to);

struct Transition {
    SessionState from;
    SessionState to;
    double at = 0;  // seconds since issue
    std::string note;
};

/// Server-side session; the challenge keeps its truth here only.
struct Session {
    std::string id;
    std::string client;
    SessionState state = SessionState::Issued;
    captcha::Challenge challenge;
    double issued_at = 0;  // manager clock
    std::string deadline;  // UTC, issue time + time limit
    std::string claimed_subject;
    bool responded = false;  // a solution response has been counted
    std::vector<Transition> audit;

    nlohmann::json audit_json() const;
};

/// What a client receives when a session opens. No truth.
struct ChallengePayload {
    std::string id;
    std::string image_url;
    std::vector<int> cells;
    std::string deadline;
    double time_limit_s = 30;

    nlohmann::json to_json() const;
};

struct SessionStats {
    std::size_t submitted = 0;  // solution responses to live sessions
    std::size_t invalid = 0;    // malformed responses, discarded
    std::size_t correct = 0;
    std::size_t skipped = 0;    // skips are not responses
    std::size_t timeouts = 0;   // counted as valid, incorrect

    std::size_t valid() const { return submitted - invalid; }
    /// correct / valid, nullopt without valid responses.
    std::optional<double> accuracy() const;
    nlohmann::json to_json() const;
};

struct SolutionReply {
    std::string result;  // "accept", "reject", "timeout"
    std::string reason;
    bool known = true;   // false: unknown session id
    nlohmann::json to_json() const;
};

struct BiometricReply {
    std::string result;  // "verified", "rejected"
    std::string reason;
    bool known = true;
    bool order_violation = false;
    nlohmann::json to_json() const;
};

class RateLimited : public Error {
public:
    using Error::Error;
};

struct SessionOptions {
    double time_limit_s = captcha::kSolveTimeLimit;
    int rate_limit = 5;         // session opens per client per window; 0 disables
    double rate_window_s = 60;
    double biometric_window_s = 300;  // after a solved challenge, before the scan must arrive
    std::optional<std::uint64_t> seed;  // seeds come from std::random_device when unset
};

using ChallengeSource = std::function<captcha::Challenge(std::uint64_t seed)>;
using Clock = std::function<double()>;  // monotonic seconds

/// Session table and state machines. Operations on different sessions run
/// concurrently; each session is guarded by its own lock.
class SessionManager {
public:
    SessionManager(ChallengeSource source, const BiometricChecker* checker, SessionOptions options = {},
                   Clock clock = {});

    /// Throws RateLimited when the client opened too many sessions recently;
    /// challenge generation errors propagate.
    ChallengePayload open(const std::string& client = "local");

    SolutionReply submit_solution(const std::string& id, const std::array<int, 2>& answer);
    /// Abandons an issued session; not counted as a response.
    SolutionReply skip(const std::string& id);
    BiometricReply submit_biometric(const std::string& id, const imaging::Raster& scan, const std::string& subject);

    /// Copy of a session, expiring it first when its deadline has passed.
    std::optional<Session> find(const std::string& id);
    /// Challenge image of an issued session; nullopt otherwise.
    std::optional<imaging::Raster> image(const std::string& id);

    SessionStats stats() const;
    std::size_t size() const;
    /// Expires overdue issued sessions and drops terminal ones older than `keep_s`.
    std::size_t sweep(double keep_s = 600);

    /// Appends one JSON line per counted event; existing lines are replayed
    /// into the statistics first.
    void set_journal(const std::filesystem::path& path);

private:
    struct Entry {
        std::mutex mu;
        Session s;
    };

    std::shared_ptr<Entry> lookup(const std::string& id) const;
    void move(Session& s, SessionState to, const std::string& note);
    void expire_if_due(Session& s);
    void record(const nlohmann::json& event);
    std::string new_token();

    ChallengeSource source_;
    const BiometricChecker* checker_;
    SessionOptions opts_;
    Clock clock_;

    mutable std::mutex mu_;  // guards the fields below
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::map<std::string, std::deque<double>> opens_;
    SessionStats stats_;
    std::uint64_t counter_ = 0;
    std::uint64_t base_seed_ = 0;
    std::filesystem::path journal_;
};

}  // namespace handcap::gateway
