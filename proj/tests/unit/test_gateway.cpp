#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>

#include "handcap/fingergeom/features.hpp"
#include "handcap/gateway/config.hpp"
#include "handcap/gateway/http.hpp"
#include "handcap/imaging/png_io.hpp"
#include "handcap/pad/spoof.hpp"
#include "handcap/synth/hand_model.hpp"

using namespace handcap;
using namespace handcap::gateway;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Challenges without pixels: enough for the state machine.
captcha::Challenge bare_challenge(std::uint64_t seed) {
    imaging::RandomSource rng(seed);
    captcha::Challenge ch;
    ch.seed = seed;
    ch.id = captcha::challenge_id(seed);
    std::array<int, 9> cells{1, 2, 3, 4, 5, 6, 7, 8, 9};
    rng.shuffle(cells.begin(), cells.end());
    ch.truth = {cells[0], cells[1]};
    ch.occupied_cells.assign(cells.begin(), cells.begin() + 7);
    std::sort(ch.occupied_cells.begin(), ch.occupied_cells.end());
    ch.image = imaging::Raster(9, 9, 3, 7);
    return ch;
}

struct ManualClock {
    std::shared_ptr<double> t = std::make_shared<double>(1000.0);
    Clock clock() const {
        auto p = t;
        return [p] { return *p; };
    }
    void advance(double s) const { *t += s; }
};

// Verifies subject "alice" unless the scan is all zero (a "spoof").
class StubChecker : public BiometricChecker {
public:
    mutable std::atomic<int> calls{0};
    BiometricOutcome check(const imaging::Raster& scan, const std::string& claimed) const override {
        ++calls;
        BiometricOutcome o;
        if (scan.empty()) return o;
        if (std::all_of(scan.data().begin(), scan.data().end(), [](auto v) { return v == 0; })) {
            o.result = BiometricResult::Spoof;
            return o;
        }
        o.pad_passed = true;
        o.result = claimed == "alice" ? BiometricResult::Verified : BiometricResult::Imposter;
        return o;
    }
};

std::array<int, 2> wrong_answer(const std::array<int, 2>& truth) {
    for (int a = 1; a <= 9; ++a) {
        for (int b = 1; b <= 9; ++b) {
            if (a != b && !((a == truth[0] && b == truth[1]) || (a == truth[1] && b == truth[0]))) return {a, b};
        }
    }
    return {0, 0};
}

bool audit_has(const Session& s, SessionState to) {
    return std::any_of(s.audit.begin(), s.audit.end(), [&](const Transition& t) { return t.to == to; });
}

}  // namespace

TEST_CASE("transition table") {
    using S = SessionState;
    const std::vector<S> all{S::Issued, S::Solved, S::PadPassed, S::Verified, S::Rejected, S::Expired};
    const std::set<std::pair<S, S>> legal{{S::Issued, S::Solved},      {S::Solved, S::PadPassed},
                                          {S::PadPassed, S::Verified}, {S::Issued, S::Rejected},
                                          {S::Issued, S::Expired},     {S::Solved, S::Rejected},
                                          {S::Solved, S::Expired},     {S::PadPassed, S::Rejected},
                                          {S::PadPassed, S::Expired}};
    for (S a : all) {
        for (S b : all) CHECK(legal_transition(a, b) == (legal.count({a, b}) == 1));
    }
    CHECK(state_name(S::PadPassed) == "pad_passed");
}

TEST_CASE("open sessions") {
    ManualClock clk;
    std::set<std::uint64_t> seeds;
    auto source = [&](std::uint64_t seed) {
        seeds.insert(seed);
        return bare_challenge(seed);
    };
    SessionManager m(source, nullptr, {.rate_limit = 0}, clk.clock());
    const auto a = m.open(), b = m.open();
    CHECK(a.id != b.id);
    CHECK(a.id.size() == 32);
    CHECK(seeds.size() == 2);
    CHECK(a.image_url == "/sessions/" + a.id + "/image");
    CHECK(a.cells.size() == 7);
    const auto j = a.to_json();
    CHECK_FALSE(j.contains("truth"));
    CHECK_FALSE(j.dump().find("truth") != std::string::npos);
    CHECK(j["time_limit_s"] == 30.0);
    CHECK(a.deadline.size() == 20);
    CHECK(m.image(a.id).has_value());
    CHECK(m.size() == 2);
}

TEST_CASE("solution flow and timing") {
    ManualClock clk;
    SessionManager m(bare_challenge, nullptr, {.rate_limit = 0}, clk.clock());

    const auto ok = m.open();
    const auto truth = m.find(ok.id)->challenge.truth;
    clk.advance(30.0);  // exactly at the limit still counts
    auto r = m.submit_solution(ok.id, {truth[1], truth[0]});
    CHECK(r.result == "accept");
    CHECK(m.find(ok.id)->state == SessionState::Solved);
    CHECK(m.submit_solution(ok.id, truth).reason == "replay");
    CHECK_FALSE(m.image(ok.id).has_value());

    const auto bad = m.open();
    r = m.submit_solution(bad.id, wrong_answer(m.find(bad.id)->challenge.truth));
    CHECK(r.result == "reject");
    CHECK(r.reason == "incorrect");
    CHECK(m.find(bad.id)->state == SessionState::Rejected);
    CHECK(m.submit_solution(bad.id, {1, 2}).reason == "replay");

    const auto late = m.open();
    clk.advance(30.5);
    r = m.submit_solution(late.id, m.find(late.id)->challenge.truth);
    CHECK(r.result == "timeout");
    CHECK(m.find(late.id)->state == SessionState::Expired);

    const auto idle = m.open();
    clk.advance(31);
    CHECK(m.find(idle.id)->state == SessionState::Expired);
    CHECK_FALSE(m.image(idle.id).has_value());
    // The late answer still counts as a response.
    CHECK(m.submit_solution(idle.id, {1, 2}).result == "timeout");
    CHECK(m.submit_solution(idle.id, {1, 2}).reason == "replay");

    const auto junk = m.open();
    r = m.submit_solution(junk.id, {0, 12});
    CHECK(r.reason == "malformed");

    const auto skipped = m.open();
    CHECK(m.skip(skipped.id).reason == "skipped");
    CHECK(m.skip(skipped.id).reason == "replay");

    r = m.submit_solution("nope", {1, 2});
    CHECK(r.reason == "invalid session");
    CHECK_FALSE(r.known);

    const auto st = m.stats();
    CHECK(st.submitted == 5);
    CHECK(st.invalid == 1);
    CHECK(st.valid() == 4);
    CHECK(st.correct == 1);
    CHECK(st.timeouts == 2);
    CHECK(st.skipped == 1);
    CHECK(*st.accuracy() == doctest::Approx(0.25));

    clk.advance(1000);
    CHECK(m.sweep(600) == 6);
    CHECK(m.size() == 0);
}

TEST_CASE("stats accounting") {
    SessionStats s;
    CHECK_FALSE(s.accuracy().has_value());
    CHECK(s.to_json()["accuracy"].is_null());
    s.submitted = 1000;
    s.correct = 985;
    CHECK(*s.accuracy() == doctest::Approx(0.985));
    s = SessionStats{};
    s.submitted = 3192;
    s.invalid = 15;
    CHECK(s.valid() == 3177);
    CHECK(s.to_json()["valid"] == 3177);
}

TEST_CASE("biometric stage ordering") {
    ManualClock clk;
    StubChecker stub;
    SessionManager m(bare_challenge, &stub, {.rate_limit = 0}, clk.clock());
    const imaging::Raster scan(8, 8, 1, 90), spoof(8, 8, 1, 0);

    const auto early = m.open();
    auto r = m.submit_biometric(early.id, scan, "alice");
    CHECK(r.reason == "stage order violation");
    CHECK(r.order_violation);
    CHECK(stub.calls == 0);
    CHECK(m.find(early.id)->state == SessionState::Rejected);
    CHECK(m.submit_solution(early.id, m.find(early.id)->challenge.truth).reason == "replay");

    auto solved = [&] {
        const auto p = m.open();
        REQUIRE(m.submit_solution(p.id, m.find(p.id)->challenge.truth).result == "accept");
        return p.id;
    };

    auto id = solved();
    r = m.submit_biometric(id, scan, "alice");
    CHECK(r.result == "verified");
    auto s = *m.find(id);
    CHECK(s.state == SessionState::Verified);
    CHECK(audit_has(s, SessionState::PadPassed));
    CHECK(s.claimed_subject == "alice");
    CHECK(m.submit_biometric(id, scan, "alice").reason == "replay");

    id = solved();
    r = m.submit_biometric(id, spoof, "alice");
    CHECK(r.reason == "spoof");
    s = *m.find(id);
    CHECK(s.state == SessionState::Rejected);
    CHECK_FALSE(audit_has(s, SessionState::PadPassed));

    id = solved();
    CHECK(m.submit_biometric(id, scan, "mallory").reason == "imposter");
    CHECK(audit_has(*m.find(id), SessionState::PadPassed));

    id = solved();
    CHECK(m.submit_biometric(id, imaging::Raster{}, "alice").reason == "unprocessable image");

    CHECK(m.submit_biometric("nope", scan, "alice").reason == "invalid session");
    CHECK(stub.calls == 4);

    SessionManager no_stage2(bare_challenge, nullptr, {.rate_limit = 0}, clk.clock());
    const auto p = no_stage2.open();
    no_stage2.submit_solution(p.id, no_stage2.find(p.id)->challenge.truth);
    CHECK(no_stage2.submit_biometric(p.id, scan, "alice").reason == "stage 2 unavailable");
}

TEST_CASE("rate limit per client") {
    ManualClock clk;
    SessionManager m(bare_challenge, nullptr, {}, clk.clock());
    for (int i = 0; i < 5; ++i) m.open("a");
    CHECK_THROWS_AS(m.open("a"), RateLimited);
    m.open("b");
    clk.advance(59.9);
    CHECK_THROWS_AS(m.open("a"), RateLimited);
    clk.advance(0.2);
    m.open("a");
}

TEST_CASE("no stage 2 without a stage-1 accept under fuzzing") {
    ManualClock clk;
    StubChecker stub;
    SessionManager m(bare_challenge, &stub, {.rate_limit = 0, .seed = 3}, clk.clock());
    imaging::RandomSource rng(99);
    std::vector<std::string> ids;
    const imaging::Raster scan(4, 4, 1, 50);
    for (int step = 0; step < 3000; ++step) {
        const int op = rng.uniform_int(0, 5);
        if (op == 0 || ids.empty()) {
            ids.push_back(m.open().id);
            continue;
        }
        const auto& id = rng.bernoulli(0.05) ? std::string("bogus") : ids[rng.index(ids.size())];
        switch (op) {
            case 1: {
                const auto s = m.find(id);
                m.submit_solution(id, s && rng.bernoulli(0.5) ? s->challenge.truth
                                                              : std::array<int, 2>{rng.uniform_int(0, 10),
                                                                                   rng.uniform_int(0, 10)});
                break;
            }
            case 2: m.submit_biometric(id, scan, rng.bernoulli(0.5) ? "alice" : "bob"); break;
            case 3: m.skip(id); break;
            case 4: clk.advance(rng.uniform(0, 12)); break;
            default: m.find(id); break;
        }
    }
    int reached_stage2 = 0;
    for (const auto& id : ids) {
        const auto s = *m.find(id);
        bool solved = false;
        for (const auto& t : s.audit) {
            CHECK(legal_transition(t.from, t.to));
            if (t.to == SessionState::Solved) solved = true;
            if (t.to == SessionState::PadPassed || t.to == SessionState::Verified) CHECK(solved);
        }
        const bool checked = audit_has(s, SessionState::PadPassed) ||
                             (solved && s.state == SessionState::Rejected && !s.claimed_subject.empty());
        reached_stage2 += checked;
        if (!s.claimed_subject.empty()) CHECK(solved);
    }
    CHECK(reached_stage2 == stub.calls);
    CHECK(stub.calls > 0);
}

TEST_CASE("journal replays statistics") {
    const fs::path dir = fs::temp_directory_path() / "handcap_gateway_journal";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto path = dir / "events.jsonl";
    {
        SessionManager m(bare_challenge, nullptr, {.rate_limit = 0});
        m.set_journal(path);
        for (int i = 0; i < 3; ++i) {
            const auto p = m.open();
            m.submit_solution(p.id, i == 0 ? m.find(p.id)->challenge.truth : std::array<int, 2>{0, 0});
        }
        m.skip(m.open().id);
    }
    SessionManager again(bare_challenge, nullptr, {.rate_limit = 0});
    again.set_journal(path);
    const auto st = again.stats();
    CHECK(st.submitted == 3);
    CHECK(st.invalid == 2);
    CHECK(st.correct == 1);
    CHECK(st.skipped == 1);

    std::ofstream(dir / "bad.jsonl") << "{not json\n";
    CHECK_THROWS_AS(again.set_journal(dir / "bad.jsonl"), InvalidArgument);
    fs::remove_all(dir);
}

TEST_CASE("config parsing") {
    const auto d = GatewayConfig::from_json(json::object());
    CHECK(d.pad_metrics.size() == 5);
    CHECK(d.sessions.rate_limit == 5);
    CHECK(d.sessions.time_limit_s == 30);
    CHECK_FALSE(d.threshold.has_value());
    CHECK_FALSE(d.stage2_configured());

    const json j{{"stores", "stores"},
                 {"challenge", {{"n_fake_range", {6, 6}}}},
                 {"pad", {{"metrics", {"SSIM", "AD"}}, {"classifier", "rf"}, {"training", "/abs/q.csv"}}},
                 {"biometric", {{"templates", "t.json"}, {"threshold", 2.5}}},
                 {"sessions", {{"rate_limit", 9}}},
                 {"server", {{"port", 9000}}}};
    const auto c = GatewayConfig::from_json(j, "/etc/hc");
    CHECK(c.stores == fs::path("/etc/hc/stores"));
    CHECK(c.pad_training == fs::path("/abs/q.csv"));
    CHECK(c.templates == fs::path("/etc/hc/t.json"));
    CHECK(c.challenge.n_fake_min == 6);
    CHECK(c.pad_metrics == std::vector<pad::Metric>{pad::Metric::SSIM, pad::Metric::AD});
    CHECK(c.pad_options.classifier == pad::Classifier::Rf);
    CHECK(*c.threshold == 2.5);
    CHECK(c.sessions.rate_limit == 9);
    CHECK(c.port == 9000);
    CHECK(c.stage2_configured());
    CHECK(GatewayConfig::from_json(c.to_json()).pad_metrics == c.pad_metrics);

    CHECK_THROWS_AS(GatewayConfig::from_json(json{{"pad", {{"metrics", "SSIM,FOO"}}}}), InvalidArgument);
    CHECK_THROWS_AS(GatewayConfig::from_json(json{{"biometric", {{"threshold", "high"}}}}), InvalidArgument);
    CHECK_THROWS_AS(GatewayConfig::from_json(json{{"challenge", {{"n_fake_range", {2, 3}}}}}), InvalidArgument);
    CHECK_THROWS_AS(GatewayConfig::from_json(json{{"server", {{"port", "x"}}}}), InvalidArgument);
    CHECK_THROWS_AS(GatewayConfig::load("/nonexistent/handcap.json"), IoError);
}

TEST_CASE("HTTP API") {
    StubChecker stub;
    SessionManager m(bare_challenge, &stub, {.rate_limit = 0});
    HttpServer server(m);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread t([&] { server.serve(); });
    server.wait_until_ready();
    httplib::Client cli("127.0.0.1", port);

    auto res = cli.Post("/sessions");
    REQUIRE(res);
    CHECK(res->status == 201);
    const auto payload = json::parse(res->body);
    const std::string id = payload["id"];
    CHECK_FALSE(payload.contains("truth"));
    CHECK(payload["cells"].size() == 7);

    res = cli.Get(payload["image_url"].get<std::string>());
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "image/png");
    CHECK(imaging::decode_png({reinterpret_cast<const std::uint8_t*>(res->body.data()), res->body.size()}).width() == 9);

    res = cli.Post("/sessions/" + id + "/biometric?subject=alice", "xx", "image/png");
    REQUIRE(res);
    CHECK(res->status == 409);
    CHECK(json::parse(res->body)["reason"] == "stage order violation");

    const auto p2 = json::parse(cli.Post("/sessions")->body);
    const std::string id2 = p2["id"];
    CHECK(cli.Post("/sessions/" + id2 + "/solution", "{\"cells\": 3}", "application/json")->status == 400);
    const auto truth = m.find(id2)->challenge.truth;
    res = cli.Post("/sessions/" + id2 + "/solution", json{{"cells", truth}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["result"] == "accept");
    CHECK(cli.Post("/sessions/" + id2 + "/solution", json{{"cells", truth}}.dump(), "application/json")->status ==
          409);
    CHECK(cli.Get("/sessions/" + id2 + "/image")->status == 410);

    const auto png = imaging::encode_png(imaging::Raster(6, 6, 1, 120));
    httplib::MultipartFormDataItems items{{"image", std::string(png.begin(), png.end()), "scan.png", "image/png"},
                                          {"subject", "alice", "", ""}};
    res = cli.Post("/sessions/" + id2 + "/biometric", items);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["result"] == "verified");

    const auto state = json::parse(cli.Get("/sessions/" + id2)->body);
    CHECK(state["state"] == "verified");
    CHECK_FALSE(state.dump().find("truth") != std::string::npos);

    CHECK(cli.Get("/sessions/unknown/image")->status == 404);
    CHECK(cli.Post("/sessions/unknown/solution", "{\"cells\":[1,2]}", "application/json")->status == 404);

    const auto stats = json::parse(cli.Get("/stats")->body);
    CHECK(stats["correct"] == 1);
    CHECK(stats["accuracy"] == 1.0);

    server.stop();
    t.join();
}

TEST_CASE("stage 2 on a synthetic enrolled population") {
    const std::vector<pad::Metric> metrics{pad::Metric::SSIM, pad::Metric::ESSIM, pad::Metric::AD, pad::Metric::WASH,
                                           pad::Metric::NAE};
    const std::size_t subjects = 6;
    const auto quality = pad::synthetic_pad_set(subjects, metrics, 21);
    const auto model = pad::PadModel::fit(quality);
    const auto pop = synth::Population::make(subjects, 21);

    fingergeom::RawSamples raw;
    for (std::size_t s = 0; s < subjects; ++s) {
        for (std::size_t k = 0; k < 3; ++k) raw["s" + std::to_string(s)].push_back(fingergeom::hand_vector(pop.sample(s, k)));
    }
    const auto file = fingergeom::build_templates(raw);
    const auto reloaded = fingergeom::TemplateFile::from_json(file.to_json());
    CHECK(reloaded.subjects.size() == subjects);
    CHECK(reloaded.subjects[0].extrema_version == file.extrema.version());

    std::vector<std::size_t> all(104);
    std::iota(all.begin(), all.end(), 0);
    auto store = enroll_templates(file, all, "all");
    const double threshold = calibrate_threshold(store);
    CHECK(threshold > 0);
    const Stage2 stage2(model, file.extrema, store, threshold);

    const auto genuine = stage2.check(pop.sample(2, 1), "s2");
    CHECK(genuine.result == BiometricResult::Verified);
    CHECK(genuine.distance == doctest::Approx(0).epsilon(1e-9));

    imaging::RandomSource rng(5);
    const auto spoof = stage2.check(pad::synth_spoof(pop.sample(2, 1), rng), "s2");
    CHECK(spoof.result == BiometricResult::Spoof);
    CHECK_FALSE(spoof.pad_passed);

    CHECK(stage2.check(pop.sample(2, 1), "nobody").result == BiometricResult::UnknownSubject);
    CHECK(stage2.check(imaging::Raster(64, 64, 1, 0), "s2").result != BiometricResult::Verified);

    // A zero threshold turns every fresh capture into an imposter claim.
    const Stage2 strict(model, file.extrema, store, 0.0);
    const auto fresh = strict.check(pop.sample(3, 5), "s3");
    if (fresh.pad_passed) CHECK(fresh.result == BiometricResult::Imposter);
}
