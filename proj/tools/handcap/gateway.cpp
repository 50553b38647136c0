#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "common.hpp"
#include "handcap/common/error.hpp"
#include "handcap/gateway/config.hpp"
#include "handcap/gateway/http.hpp"
#include "handcap/imaging/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace handcap::cli {

namespace {

gateway::GatewayConfig load_config(const fs::path& p) {
    return p.empty() ? gateway::GatewayConfig{} : gateway::GatewayConfig::load(p);
}

void serve(const gateway::GatewayConfig& config) {
    auto g = gateway::build_gateway(config);
    gateway::HttpServer server(*g->sessions);
    const int port = server.bind(config.host, config.port);
    if (port < 0) throw IoError("cannot bind " + config.host + ":" + std::to_string(config.port));

    // Signals go to a dedicated thread so stop() never runs inside a handler.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    std::mutex mu;
    std::condition_variable cv;
    bool done = false;
    std::thread sweeper([&] {
        std::unique_lock lock(mu);
        while (!cv.wait_for(lock, std::chrono::seconds(30), [&] { return done; })) g->sessions->sweep(600);
    });
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });

    std::cerr << "handcap gateway on http://" << config.host << ":" << port
              << (g->stage2 ? " (stage 2 enabled, threshold " + std::to_string(g->stage2->threshold()) + ")"
                            : " (stage 2 disabled)")
              << '\n';
    server.serve();
    {
        std::lock_guard lock(mu);
        done = true;
    }
    cv.notify_all();
    sweeper.join();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
}

json parse_reply(const httplib::Result& res) {
    if (!res) throw IoError("request failed: " + httplib::to_string(res.error()));
    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::parse_error&) {
        body = res->body;
    }
    return {{"status", res->status}, {"body", body}};
}

struct Remote {
    std::string url = "http://127.0.0.1:8080";
    httplib::Client client() const {
        httplib::Client c(url);
        c.set_connection_timeout(5);
        c.set_read_timeout(60);
        return c;
    }
};

void add_remote(CLI::App* session_cmd) {
    auto remote = std::make_shared<Remote>();
    session_cmd->add_option("--url", remote->url, "Gateway base URL")->capture_default_str();

    auto* open = session_cmd->add_subcommand("open", "POST /sessions");
    open->callback([=] { emit_json(parse_reply(remote->client().Post("/sessions"))); });

    auto id = std::make_shared<std::string>();
    auto* status = session_cmd->add_subcommand("status", "GET /sessions/{id}");
    status->add_option("--id", *id)->required();
    status->callback([=] { emit_json(parse_reply(remote->client().Get("/sessions/" + *id))); });

    auto image_out = std::make_shared<fs::path>();
    auto* image = session_cmd->add_subcommand("image", "GET /sessions/{id}/image");
    image->add_option("--id", *id)->required();
    image->add_option("--out", *image_out, "PNG path")->required();
    image->callback([=] {
        auto res = remote->client().Get("/sessions/" + *id + "/image");
        if (!res) throw IoError("request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) {
            emit_json(parse_reply(res));
            return;
        }
        std::ofstream(*image_out, std::ios::binary) << res->body;
        emit_json({{"status", 200}, {"written", image_out->string()}});
    });

    auto cells = std::make_shared<std::vector<int>>();
    auto* solve = session_cmd->add_subcommand("solve", "POST /sessions/{id}/solution");
    solve->add_option("--id", *id)->required();
    solve->add_option("--cells", *cells)->required()->expected(2);
    solve->callback([=] {
        emit_json(parse_reply(
            remote->client().Post("/sessions/" + *id + "/solution", json{{"cells", *cells}}.dump(), "application/json")));
    });

    auto* skip = session_cmd->add_subcommand("skip", "POST /sessions/{id}/skip");
    skip->add_option("--id", *id)->required();
    skip->callback([=] { emit_json(parse_reply(remote->client().Post("/sessions/" + *id + "/skip"))); });

    auto scan = std::make_shared<fs::path>();
    auto subject = std::make_shared<std::string>();
    auto* bio = session_cmd->add_subcommand("biometric", "POST /sessions/{id}/biometric");
    bio->add_option("--id", *id)->required();
    bio->add_option("--scan", *scan, "Hand scan PNG")->required()->check(CLI::ExistingFile);
    bio->add_option("--subject", *subject, "Claimed subject id")->required();
    bio->callback([=] {
        std::ifstream in(*scan, std::ios::binary);
        const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        httplib::MultipartFormDataItems items{{"image", bytes, scan->filename().string(), "image/png"},
                                              {"subject", *subject, "", ""}};
        emit_json(parse_reply(remote->client().Post("/sessions/" + *id + "/biometric", items)));
    });

    auto* stats = session_cmd->add_subcommand("stats", "GET /stats");
    stats->callback([=] { emit_json(parse_reply(remote->client().Get("/stats"))); });

    // --url may follow the endpoint name.
    for (auto* sub : {open, status, image, solve, skip, bio, stats}) sub->fallthrough();
}

/// Offline replay of a JSON-lines request script against an in-process
/// gateway with a virtual clock. Requests:
///   {"op": "open", "client": "..."}
///   {"op": "solution", "session": n, "cells": [a, b]}   n = index of an earlier open, or "id"
///                                                       cells may be "truth" under --reveal-truth
///   {"op": "skip", "session": n}
///   {"op": "biometric", "session": n, "scan": "file.png", "subject": "..."}
///   {"op": "image", "session": n, "out": "file.png"}
///   {"op": "status", "session": n}
///   {"op": "wait", "seconds": s}
///   {"op": "stats"}
void run_batch(const gateway::GatewayConfig& config, std::istream& in, std::ostream& out, bool reveal) {
    auto now = std::make_shared<double>(0);
    auto g = gateway::build_gateway(config, [now] { return *now; });
    auto& m = *g->sessions;
    std::vector<std::string> opened;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json reply;
        try {
            const auto req = json::parse(line);
            const std::string op = req.at("op");
            auto id = [&] {
                if (req.contains("id")) return req.at("id").get<std::string>();
                const auto n = req.at("session").get<std::size_t>();
                if (n >= opened.size()) throw InvalidArgument("session index " + std::to_string(n) + " not opened");
                return opened[n];
            };
            if (op == "open") {
                const auto p = m.open(req.value("client", "batch"));
                opened.push_back(p.id);
                reply = p.to_json();
                reply["session"] = opened.size() - 1;
                if (reveal) reply["truth"] = m.find(p.id)->challenge.truth;
            } else if (op == "solution") {
                const auto sid = id();
                std::array<int, 2> cells{};
                if (reveal && req.at("cells") == "truth") {
                    const auto s = m.find(sid);
                    if (s) cells = s->challenge.truth;
                } else {
                    cells = req.at("cells").get<std::array<int, 2>>();
                }
                const auto r = m.submit_solution(sid, cells);
                reply = {{"result", r.result}, {"reason", r.reason}};
            } else if (op == "skip") {
                const auto r = m.skip(id());
                reply = {{"result", r.result}, {"reason", r.reason}};
            } else if (op == "biometric") {
                const auto r = m.submit_biometric(id(), imaging::read_png(req.at("scan").get<std::string>()),
                                                  req.at("subject").get<std::string>());
                reply = {{"result", r.result}, {"reason", r.reason}};
            } else if (op == "image") {
                const auto img = m.image(id());
                if (!img) throw InvalidArgument("challenge image not available");
                imaging::write_png(req.at("out").get<std::string>(), *img);
                reply = {{"written", req.at("out")}};
            } else if (op == "status") {
                const auto s = m.find(id());
                if (!s) throw InvalidArgument("invalid session");
                reply = {{"id", s->id}, {"state", gateway::state_name(s->state)}, {"audit", s->audit_json()}};
            } else if (op == "wait") {
                const double dt = req.at("seconds").get<double>();
                if (!(dt >= 0)) throw InvalidArgument("wait needs non-negative seconds");
                *now += dt;
                reply = {{"clock", *now}};
            } else if (op == "stats") {
                reply = m.stats().to_json();
            } else {
                throw InvalidArgument("unknown op '" + op + "'");
            }
            reply["op"] = op;
        } catch (const std::exception& e) {
            reply = {{"error", e.what()}};
        }
        reply["line"] = lineno;
        out << reply.dump() << '\n';
    }
}

}  // namespace

void register_gateway(CLI::App& app) {
    {
        auto* cmd = app.add_subcommand("serve", "Run the two-stage gateway over HTTP");
        auto config = std::make_shared<fs::path>();
        auto host = std::make_shared<std::string>();
        auto port = std::make_shared<int>(-1);
        auto print = std::make_shared<bool>(false);
        cmd->add_option("--config", *config, "Gateway JSON config")->check(CLI::ExistingFile);
        cmd->add_option("--host", *host, "Overrides server.host");
        cmd->add_option("--port", *port, "Overrides server.port (0 picks a free port)");
        cmd->add_flag("--print-config", *print, "Print the effective config and exit");
        cmd->callback([=] {
            auto c = load_config(*config);
            if (!host->empty()) c.host = *host;
            if (*port >= 0) c.port = *port;
            if (*print) {
                emit_json(c.to_json());
                return;
            }
            serve(c);
        });
    }
    {
        auto* cmd = app.add_subcommand("session", "Gateway endpoints from the command line");
        cmd->require_subcommand(1);
        add_remote(cmd);

        auto* batch = cmd->add_subcommand("batch", "Replay a JSON-lines request script offline (virtual clock)");
        auto config = std::make_shared<fs::path>();
        auto in = std::make_shared<fs::path>();
        auto out = std::make_shared<fs::path>();
        auto reveal = std::make_shared<bool>(false);
        batch->add_option("--config", *config)->check(CLI::ExistingFile);
        batch->add_option("--in", *in, "Request script (default: stdin)");
        batch->add_option("--out", *out, "Reply lines (default: stdout)");
        batch->add_flag("--reveal-truth", *reveal, "Include each challenge's truth in open replies and accept \"cells\": \"truth\" (testing only)");
        batch->callback([=] {
            const auto c = load_config(*config);
            std::ifstream fin;
            if (!in->empty()) {
                fin.open(*in);
                if (!fin) throw IoError("cannot read " + in->string());
            }
            std::ofstream fout;
            if (!out->empty()) {
                fout.open(*out);
                if (!fout) throw IoError("cannot write " + out->string());
            }
            run_batch(c, in->empty() ? std::cin : fin, out->empty() ? std::cout : fout, *reveal);
        });
    }
}

}  // namespace handcap::cli
