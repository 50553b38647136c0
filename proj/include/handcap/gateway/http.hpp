#pragma once

#include <memory>
#include <string>

#include "handcap/gateway/sessions.hpp"

namespace handcap::gateway {

/// HTTP+JSON front of a SessionManager:
///   POST /sessions                  -> 201 {id, image_url, cells, deadline, time_limit_s}
///   GET  /sessions/{id}             -> {id, state, audit}
///   GET  /sessions/{id}/image       -> image/png
///   POST /sessions/{id}/solution    {cells: [a, b]} -> {result, reason}
///   POST /sessions/{id}/skip        -> {result, reason}
///   POST /sessions/{id}/biometric   multipart "image" (PNG) + "subject", or a
///                                   raw PNG body with ?subject= -> {result, reason}
///   GET  /stats                     -> SessionStats
/// Unknown sessions answer 404; replays, stage-order violations and scans for
/// sessions that are no longer waiting for one answer 409;
/// rate-limited opens 429 and generation failures 503.
class HttpServer {
public:
    explicit HttpServer(SessionManager& sessions);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool serve();
    void stop();
    /// Blocks until the server accepts connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace handcap::gateway
