#include "handcap/gateway/config.hpp"

#include <fstream>

#include "handcap/captcha/generator.hpp"
#include "handcap/common/error.hpp"
#include "handcap/featsel/foba.hpp"
#include "handcap/fingergeom/features.hpp"
#include "handcap/fingergeom/templates.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace handcap::gateway {

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

GatewayConfig GatewayConfig::from_json(const json& j, const fs::path& base) {
    GatewayConfig c;
    try {
        if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
        c.stores = resolve(base, j.value("stores", ""));
        if (j.contains("synthetic_stores")) {
            const auto& s = j.at("synthetic_stores");
            c.synthetic_backgrounds = s.value("backgrounds", c.synthetic_backgrounds);
            c.synthetic_genuine = s.value("genuine", c.synthetic_genuine);
            c.synthetic_fakes = s.value("fakes", c.synthetic_fakes);
            c.synthetic_seed = s.value("seed", c.synthetic_seed);
        }
        if (j.contains("challenge")) c.challenge = captcha::spec_from_json(j.at("challenge"));
        if (j.contains("pad")) {
            const auto& p = j.at("pad");
            if (p.contains("metrics")) {
                // Either "SSIM,AD" or ["SSIM", "AD"].
                const auto& m = p.at("metrics");
                std::string joined;
                if (m.is_string()) {
                    joined = m.get<std::string>();
                } else {
                    for (const auto& name : m) joined += (joined.empty() ? "" : ",") + name.get<std::string>();
                }
                c.pad_metrics = pad::parse_metric_list(joined);
            }
            c.pad_options.classifier = pad::parse_classifier(p.value("classifier", "knn"));
            c.pad_options.k = p.value("k", c.pad_options.k);
            c.pad_options.trees = p.value("trees", c.pad_options.trees);
            c.pad_options.seed = p.value("seed", c.pad_options.seed);
            c.pad_training = resolve(base, p.value("training", ""));
        }
        if (j.contains("biometric")) {
            const auto& b = j.at("biometric");
            c.templates = resolve(base, b.value("templates", ""));
            c.subset = resolve(base, b.value("subset", ""));
            if (b.contains("threshold")) {
                const auto& t = b.at("threshold");
                if (t.is_number()) {
                    c.threshold = t.get<double>();
                } else if (!(t.is_string() && t.get<std::string>() == "eer")) {
                    throw InvalidArgument("biometric.threshold must be a number or \"eer\"");
                }
            }
        }
        if (j.contains("sessions")) {
            const auto& s = j.at("sessions");
            c.sessions.time_limit_s = s.value("time_limit_s", c.sessions.time_limit_s);
            c.sessions.rate_limit = s.value("rate_limit", c.sessions.rate_limit);
            c.sessions.rate_window_s = s.value("rate_window_s", c.sessions.rate_window_s);
            c.sessions.biometric_window_s = s.value("biometric_window_s", c.sessions.biometric_window_s);
            c.journal = resolve(base, s.value("journal", ""));
            if (s.contains("seed") && !s.at("seed").is_null()) c.sessions.seed = s.at("seed").get<std::uint64_t>();  // reproducible runs only
        }
        if (j.contains("server")) {
            c.host = j.at("server").value("host", c.host);
            c.port = j.at("server").value("port", c.port);
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed config: ") + e.what());
    }
    if (c.sessions.rate_limit < 0) throw InvalidArgument("malformed config: rate_limit must be non-negative");
    if (c.port < 0 || c.port > 65535) throw InvalidArgument("malformed config: port out of range");
    if (c.threshold && !(*c.threshold >= 0)) throw InvalidArgument("malformed config: threshold must be non-negative");
    return c;
}

GatewayConfig GatewayConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("malformed config: " + std::string(e.what()));
    }
    return from_json(j, path.parent_path());
}

json GatewayConfig::to_json() const {
    std::vector<std::string> metrics;
    for (auto m : pad_metrics) metrics.emplace_back(pad::metric_name(m));
    json bio{{"templates", templates.string()}, {"subset", subset.string()}};
    bio["threshold"] = threshold ? json(*threshold) : json("eer");
    return json{{"stores", stores.string()},
                {"synthetic_stores",
                 {{"backgrounds", synthetic_backgrounds},
                  {"genuine", synthetic_genuine},
                  {"fakes", synthetic_fakes},
                  {"seed", synthetic_seed}}},
                {"challenge", captcha::spec_to_json(challenge)},
                {"pad",
                 {{"metrics", metrics},
                  {"classifier", pad::classifier_name(pad_options.classifier)},
                  {"k", pad_options.k},
                  {"trees", pad_options.trees},
                  {"seed", pad_options.seed},
                  {"training", pad_training.string()}}},
                {"biometric", bio},
                {"sessions",
                 {{"time_limit_s", sessions.time_limit_s},
                  {"rate_limit", sessions.rate_limit},
                  {"rate_window_s", sessions.rate_window_s},
                  {"biometric_window_s", sessions.biometric_window_s},
                  {"journal", journal.string()},
                  {"seed", sessions.seed ? json(*sessions.seed) : json(nullptr)}}},
                {"server", {{"host", host}, {"port", port}}}};
}

std::unique_ptr<Gateway> build_gateway(const GatewayConfig& config, Clock clock) {
    auto g = std::make_unique<Gateway>();
    g->config = config;
    g->stores = config.stores.empty()
                    ? captcha::synthetic_stores(config.synthetic_backgrounds, config.synthetic_genuine,
                                                config.synthetic_fakes, config.synthetic_seed)
                    : captcha::StoreSet::load(config.stores);

    if (config.stage2_configured()) {
        const auto quality = pad::QualitySet::load_csv(config.pad_training).select(config.pad_metrics);
        auto model = pad::PadModel::fit(quality, config.pad_options);
        const auto file = fingergeom::TemplateFile::load(config.templates);
        std::vector<std::size_t> columns;
        std::string version = "all";
        if (config.subset.empty()) {
            for (std::size_t c = 0; c < static_cast<std::size_t>(fingergeom::kHandFeatures); ++c) columns.push_back(c);
        } else {
            std::ifstream in(config.subset);
            if (!in) throw IoError("cannot read subset " + config.subset.string());
            columns = featsel::FeatureSubset::from_json(json::parse(in)).columns();
            version = config.subset.filename().string();
        }
        auto store = enroll_templates(file, columns, version);
        const double threshold = config.threshold ? *config.threshold : calibrate_threshold(store);
        g->stage2 = std::make_unique<Stage2>(std::move(model), file.extrema, std::move(store), threshold);
    }

    const captcha::StoreSet* stores = &g->stores;
    const captcha::ChallengeSpec spec = config.challenge;
    auto source = [stores, spec](std::uint64_t seed) {
        return captcha::generate_challenge_retrying(*stores, spec, seed);
    };
    g->sessions = std::make_unique<SessionManager>(source, g->stage2.get(), config.sessions, std::move(clock));
    if (!config.journal.empty()) g->sessions->set_journal(config.journal);
    return g;
}

}  // namespace handcap::gateway
