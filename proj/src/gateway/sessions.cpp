#include "handcap/gateway/sessions.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>

#include "handcap/captcha/solution.hpp"
#include "handcap/common/error.hpp"

using nlohmann::json;

namespace handcap::gateway {

namespace {

std::string utc_in(double seconds) {
    const auto t = std::chrono::system_clock::now() +
                   std::chrono::duration_cast<std::chrono::system_clock::duration>(std::chrono::duration<double>(seconds));
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

std::string_view state_name(SessionState s) {
    switch (s) {
        case SessionState::Issued: return "issued";
        case SessionState::Solved: return "solved";
        case SessionState::PadPassed: return "pad_passed";
        case SessionState::Verified: return "verified";
        case SessionState::Rejected: return "rejected";
        case SessionState::Expired: return "expired";
    }
    return "?";
}

bool is_terminal(SessionState s) {
    return s == SessionState::Verified || s == SessionState::Rejected || s == SessionState::Expired;
}

bool legal_transition(SessionState from, SessionState to) {
    if (is_terminal(from)) return false;
    if (to == SessionState::Rejected || to == SessionState::Expired) return true;
    return (from == SessionState::Issued && to == SessionState::Solved) ||
           (from == SessionState::Solved && to == SessionState::PadPassed) ||
           (from == SessionState::PadPassed && to == SessionState::Verified);
}

json Session::audit_json() const {
    json out = json::array();
    for (const auto& t : audit) {
        out.push_back({{"from", state_name(t.from)}, {"to", state_name(t.to)}, {"at", t.at}, {"note", t.note}});
    }
    return out;
}

json ChallengePayload::to_json() const {
    return json{{"id", id}, {"image_url", image_url}, {"cells", cells}, {"deadline", deadline}, {"time_limit_s", time_limit_s}};
}

std::optional<double> SessionStats::accuracy() const {
    if (valid() == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(valid());
}

json SessionStats::to_json() const {
    const auto a = accuracy();
    return json{{"submitted", submitted},
                {"invalid", invalid},
                {"valid", valid()},
                {"correct", correct},
                {"timeouts", timeouts},
                {"skipped", skipped},
                {"accuracy", a ? json(*a) : json(nullptr)}};
}

json SolutionReply::to_json() const { return json{{"result", result}, {"reason", reason}}; }
json BiometricReply::to_json() const { return json{{"result", result}, {"reason", reason}}; }

SessionManager::SessionManager(ChallengeSource source, const BiometricChecker* checker, SessionOptions options,
                               Clock clock)
    : source_(std::move(source)), checker_(checker), opts_(options), clock_(clock ? std::move(clock) : steady_seconds) {
    if (!source_) throw InvalidArgument("no challenge source");
    if (!(opts_.time_limit_s > 0)) throw InvalidArgument("time limit must be positive");
    if (opts_.seed) {
        base_seed_ = *opts_.seed;
    } else {
        std::random_device rd;
        base_seed_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
}

std::string SessionManager::new_token() {
    std::random_device rd;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", rd(), rd(), rd(), rd());
    return buf;
}

std::shared_ptr<SessionManager::Entry> SessionManager::lookup(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void SessionManager::move(Session& s, SessionState to, const std::string& note) {
    if (!legal_transition(s.state, to)) {
        throw std::logic_error("illegal session transition " + std::string(state_name(s.state)) + " -> " +
                               std::string(state_name(to)));
    }
    s.audit.push_back({s.state, to, clock_() - s.issued_at, note});
    s.state = to;
}

void SessionManager::expire_if_due(Session& s) {
    if (s.state == SessionState::Issued && clock_() - s.issued_at > opts_.time_limit_s) {
        move(s, SessionState::Expired, "unanswered");
    } else if ((s.state == SessionState::Solved || s.state == SessionState::PadPassed) &&
               clock_() - s.issued_at > opts_.time_limit_s + opts_.biometric_window_s) {
        move(s, SessionState::Expired, "no biometric submitted");
    }
}

void SessionManager::record(const json& event) {
    // Caller holds mu_.
    if (journal_.empty()) return;
    std::ofstream out(journal_, std::ios::app);
    if (!out) throw IoError("cannot append to journal " + journal_.string());
    out << event.dump() << '\n';
}

ChallengePayload SessionManager::open(const std::string& client) {
    std::uint64_t seed = 0;
    {
        std::lock_guard lock(mu_);
        const double now = clock_();
        if (opts_.rate_limit > 0) {
            auto& q = opens_[client];
            while (!q.empty() && now - q.front() >= opts_.rate_window_s) q.pop_front();
            if (q.size() >= static_cast<std::size_t>(opts_.rate_limit)) {
                throw RateLimited("rate limited: " + std::to_string(opts_.rate_limit) + " sessions per " +
                                  std::to_string(static_cast<int>(opts_.rate_window_s)) + " s");
            }
            q.push_back(now);
        }
        seed = imaging::mix_seed(base_seed_ + counter_++);
    }

    auto entry = std::make_shared<Entry>();
    Session& s = entry->s;
    s.challenge = source_(seed);
    s.id = new_token();
    s.client = client;
    s.issued_at = clock_();
    s.deadline = utc_in(opts_.time_limit_s);

    ChallengePayload p;
    p.id = s.id;
    p.image_url = "/sessions/" + s.id + "/image";
    p.cells = s.challenge.occupied_cells;
    p.deadline = s.deadline;
    p.time_limit_s = opts_.time_limit_s;

    std::lock_guard lock(mu_);
    sessions_.emplace(s.id, std::move(entry));
    return p;
}

SolutionReply SessionManager::submit_solution(const std::string& id, const std::array<int, 2>& answer) {
    const auto e = lookup(id);
    if (!e) return {"reject", "invalid session", false};
    std::lock_guard lock(e->mu);
    Session& s = e->s;
    const double elapsed = clock_() - s.issued_at;
    if (s.state == SessionState::Expired && !s.responded) {
        // Expired by a sweep while the answer was on its way: still a late response.
        s.responded = true;
        std::lock_guard g(mu_);
        ++stats_.submitted;
        ++stats_.timeouts;
        record({{"event", "solution"}, {"outcome", "timeout"}, {"valid", true}});
        return {"timeout", "time limit exceeded"};
    }
    if (s.state != SessionState::Issued) return {"reject", "replay"};

    const auto v = captcha::verify_solution(s.challenge, answer, elapsed);
    const bool malformed = v.outcome == captcha::Outcome::Reject && v.reason == "malformed";
    s.responded = true;
    {
        std::lock_guard g(mu_);
        ++stats_.submitted;
        if (malformed) ++stats_.invalid;
        if (v.outcome == captcha::Outcome::Accept) ++stats_.correct;
        if (v.outcome == captcha::Outcome::Timeout) ++stats_.timeouts;
        record({{"event", "solution"}, {"outcome", captcha::outcome_name(v.outcome)}, {"valid", !malformed}});
    }
    switch (v.outcome) {
        case captcha::Outcome::Accept: move(s, SessionState::Solved, "solution accepted"); break;
        case captcha::Outcome::Reject: move(s, SessionState::Rejected, v.reason); break;
        case captcha::Outcome::Timeout: move(s, SessionState::Expired, v.reason); break;
    }
    return {std::string(captcha::outcome_name(v.outcome)), v.reason};
}

SolutionReply SessionManager::skip(const std::string& id) {
    const auto e = lookup(id);
    if (!e) return {"reject", "invalid session", false};
    std::lock_guard lock(e->mu);
    Session& s = e->s;
    expire_if_due(s);
    if (s.state != SessionState::Issued) return {"reject", "replay"};
    move(s, SessionState::Rejected, "skipped");
    std::lock_guard g(mu_);
    ++stats_.skipped;
    record({{"event", "skip"}});
    return {"reject", "skipped"};
}

BiometricReply SessionManager::submit_biometric(const std::string& id, const imaging::Raster& scan,
                                                const std::string& subject) {
    const auto e = lookup(id);
    if (!e) return {"rejected", "invalid session", false};
    std::lock_guard lock(e->mu);
    Session& s = e->s;
    expire_if_due(s);
    if (s.state == SessionState::Issued) {
        move(s, SessionState::Rejected, "stage order violation");
        return {"rejected", "stage order violation", true, true};
    }
    if (s.state == SessionState::Verified) return {"rejected", "replay"};
    if (s.state != SessionState::Solved) return {"rejected", "invalid session"};
    if (!checker_) return {"rejected", "stage 2 unavailable"};

    s.claimed_subject = subject;
    const auto out = checker_->check(scan, subject);
    if (out.pad_passed) move(s, SessionState::PadPassed, "pad real");
    const std::string reason(biometric_reason(out.result));
    if (out.result == BiometricResult::Verified) {
        move(s, SessionState::Verified, "claim accepted");
    } else {
        move(s, SessionState::Rejected, reason);
    }
    {
        std::lock_guard g(mu_);
        record({{"event", "biometric"}, {"result", out.result == BiometricResult::Verified ? "verified" : "rejected"},
                {"reason", reason}});
    }
    return {out.result == BiometricResult::Verified ? "verified" : "rejected", reason};
}

std::optional<Session> SessionManager::find(const std::string& id) {
    const auto e = lookup(id);
    if (!e) return std::nullopt;
    std::lock_guard lock(e->mu);
    expire_if_due(e->s);
    return e->s;
}

std::optional<imaging::Raster> SessionManager::image(const std::string& id) {
    const auto e = lookup(id);
    if (!e) return std::nullopt;
    std::lock_guard lock(e->mu);
    expire_if_due(e->s);
    if (e->s.state != SessionState::Issued) return std::nullopt;
    return e->s.challenge.image;
}

SessionStats SessionManager::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

std::size_t SessionManager::size() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
}

std::size_t SessionManager::sweep(double keep_s) {
    std::vector<std::pair<std::string, std::shared_ptr<Entry>>> all;
    {
        std::lock_guard lock(mu_);
        all.assign(sessions_.begin(), sessions_.end());
    }
    std::vector<std::string> drop;
    for (auto& [id, e] : all) {
        std::lock_guard lock(e->mu);
        expire_if_due(e->s);
        if (is_terminal(e->s.state) && clock_() - e->s.issued_at > keep_s) drop.push_back(id);
    }
    std::lock_guard lock(mu_);
    for (const auto& id : drop) sessions_.erase(id);
    return drop.size();
}

void SessionManager::set_journal(const std::filesystem::path& path) {
    std::lock_guard lock(mu_);
    if (std::ifstream in(path); in) {
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (line.empty()) continue;
            json ev;
            try {
                ev = json::parse(line);
            } catch (const json::exception&) {
                throw InvalidArgument("malformed journal line " + std::to_string(n) + " in " + path.string());
            }
            const auto kind = ev.value("event", "");
            if (kind == "solution") {
                ++stats_.submitted;
                if (!ev.value("valid", true)) ++stats_.invalid;
                const auto outcome = ev.value("outcome", "");
                if (outcome == "accept") ++stats_.correct;
                if (outcome == "timeout") ++stats_.timeouts;
            } else if (kind == "skip") {
                ++stats_.skipped;
            }
        }
    }
    journal_ = path;
}

}  // namespace handcap::gateway
