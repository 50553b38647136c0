#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "handcap/captcha/layout.hpp"
#include "handcap/captcha/store.hpp"
#include "handcap/gateway/sessions.hpp"
#include "handcap/gateway/stage2.hpp"
#include "handcap/pad/evaluate.hpp"

namespace handcap::gateway {

/// Gateway settings, read from a JSON file. Relative paths resolve against
/// the file's directory. Every key is optional:
///   stores            captcha store root; unset = synthetic stores
///   synthetic_stores  {backgrounds, genuine, fakes, seed}
///   challenge         ChallengeSpec fields (captcha sidecar spelling)
///   pad               {metrics, classifier, k, trees, training}   training = quality CSV
///   biometric         {templates, subset, threshold}             threshold = number or "eer"
///   sessions          {time_limit_s, rate_limit, rate_window_s, biometric_window_s, journal, seed}
///   server            {host, port}
struct GatewayConfig {
    std::filesystem::path stores;
    std::size_t synthetic_backgrounds = 4;
    std::size_t synthetic_genuine = 8;
    std::size_t synthetic_fakes = 10;
    std::uint64_t synthetic_seed = 1;

    captcha::ChallengeSpec challenge;

    std::vector<pad::Metric> pad_metrics{pad::Metric::SSIM, pad::Metric::ESSIM, pad::Metric::AD, pad::Metric::WASH,
                                         pad::Metric::NAE};
    pad::PadOptions pad_options;
    std::filesystem::path pad_training;

    std::filesystem::path templates;
    std::filesystem::path subset;            // unset = all 104 features
    std::optional<double> threshold;         // unset = calibrated equal-error threshold

    SessionOptions sessions;
    std::filesystem::path journal;

    std::string host = "127.0.0.1";
    int port = 8080;

    /// Stage 2 needs both the PAD training set and the templates.
    bool stage2_configured() const { return !pad_training.empty() && !templates.empty(); }

    static GatewayConfig from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
    static GatewayConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

/// Everything a running gateway holds: stores, stage 2 and the session table.
struct Gateway {
    GatewayConfig config;
    captcha::StoreSet stores;
    std::unique_ptr<Stage2> stage2;
    std::unique_ptr<SessionManager> sessions;
};

/// Loads stores and models named by the config. Throws on missing files.
std::unique_ptr<Gateway> build_gateway(const GatewayConfig& config, Clock clock = {});

}  // namespace handcap::gateway
