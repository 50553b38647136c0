#include "handcap/gateway/http.hpp"

#include <httplib.h>

#include "handcap/common/error.hpp"
#include "handcap/imaging/png_io.hpp"

using nlohmann::json;

namespace handcap::gateway {

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

imaging::Raster decode_or_empty(const std::string& bytes) {
    try {
        return imaging::decode_png({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
    } catch (const Error&) {
        return {};
    }
}

}  // namespace

struct HttpServer::Impl {
    httplib::Server server;
    SessionManager& sessions;

    explicit Impl(SessionManager& s) : sessions(s) { routes(); }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });

        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                send_json(res, 201, sessions.open(req.remote_addr).to_json());
            } catch (const RateLimited& e) {
                send_json(res, 429, {{"error", e.what()}});
            } catch (const Error& e) {
                send_json(res, 503, {{"error", std::string("challenge unavailable: ") + e.what()}});
            }
        });

        server.Get("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
            const auto s = sessions.find(req.path_params.at("id"));
            if (!s) return send_json(res, 404, {{"error", "invalid session"}});
            send_json(res, 200, {{"id", s->id}, {"state", state_name(s->state)}, {"audit", s->audit_json()}});
        });

        server.Get("/sessions/:id/image", [this](const httplib::Request& req, httplib::Response& res) {
            const auto& id = req.path_params.at("id");
            if (!sessions.find(id)) return send_json(res, 404, {{"error", "invalid session"}});
            const auto img = sessions.image(id);
            if (!img) return send_json(res, 410, {{"error", "challenge no longer open"}});
            const auto png = imaging::encode_png(*img);
            res.set_content(std::string(png.begin(), png.end()), "image/png");
        });

        server.Post("/sessions/:id/solution", [this](const httplib::Request& req, httplib::Response& res) {
            std::array<int, 2> cells{};
            try {
                const auto body = json::parse(req.body);
                const auto& c = body.at("cells");
                if (!c.is_array() || c.size() != 2) throw std::invalid_argument("cells");
                cells = {c.at(0).get<int>(), c.at(1).get<int>()};
            } catch (const std::exception&) {
                return send_json(res, 400, {{"result", "reject"}, {"reason", "malformed request"}});
            }
            const auto r = sessions.submit_solution(req.path_params.at("id"), cells);
            send_json(res, !r.known ? 404 : r.reason == "replay" ? 409 : 200, r.to_json());
        });

        server.Post("/sessions/:id/skip", [this](const httplib::Request& req, httplib::Response& res) {
            const auto r = sessions.skip(req.path_params.at("id"));
            send_json(res, !r.known ? 404 : r.reason == "replay" ? 409 : 200, r.to_json());
        });

        server.Post("/sessions/:id/biometric", [this](const httplib::Request& req, httplib::Response& res) {
            std::string subject, bytes;
            if (req.is_multipart_form_data()) {
                if (req.has_file("image")) bytes = req.get_file_value("image").content;
                if (req.has_file("subject")) subject = req.get_file_value("subject").content;
            } else {
                bytes = req.body;
                subject = req.get_param_value("subject");
            }
            if (subject.empty()) return send_json(res, 400, {{"result", "rejected"}, {"reason", "missing subject"}});
            const auto r = sessions.submit_biometric(req.path_params.at("id"), decode_or_empty(bytes), subject);
            const bool conflict = r.order_violation || r.reason == "replay" || r.reason == "invalid session";
            send_json(res, !r.known ? 404 : conflict ? 409 : 200, r.to_json());
        });

        server.Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, sessions.stats().to_json());
        });
    }
};

HttpServer::HttpServer(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace handcap::gateway
