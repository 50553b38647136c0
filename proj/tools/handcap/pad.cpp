#include <algorithm>

#include "common.hpp"
#include "handcap/common/error.hpp"
#include "handcap/imaging/png_io.hpp"
#include "handcap/pad/evaluate.hpp"
#include "handcap/pad/spoof.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace handcap::cli {

namespace {

const char* kDefaultMetrics = "SSIM,ESSIM,AD,WASH,NAE";
std::string all_metrics() {
    std::string s;
    for (auto m : pad::kAllMetrics) s += (s.empty() ? "" : ",") + std::string(pad::metric_name(m));
    return s;
}

/// A directory with real/ and fake/ subdirectories, or a quality CSV.
pad::QualitySet load_quality(const fs::path& p, const std::vector<pad::Metric>& metrics) {
    if (fs::is_directory(p)) return pad::quality_set_from_dir(p, metrics);
    if (!fs::exists(p)) throw IoError("not found: " + p.string());
    return pad::QualitySet::load_csv(p).select(metrics);
}

struct PadArgs {
    std::string metrics = kDefaultMetrics;
    std::string classifier = "knn";
    std::size_t k = 1;
    int trees = 100;
    bool full_forest = false;
    std::uint64_t seed = 1;

    void add(CLI::App* cmd, const std::string& metric_default) {
        metrics = metric_default;
        cmd->add_option("--metrics", metrics, "Comma-separated metric names")->capture_default_str();
        cmd->add_option("--classifier", classifier)->capture_default_str()->check(CLI::IsMember({"knn", "rf"}));
        cmd->add_option("-k", k, "Neighbours for knn")->capture_default_str();
        cmd->add_option("--trees", trees)->capture_default_str();
        cmd->add_flag("--full-forest", full_forest, "Report the full forest only, not the 1..T average");
        cmd->add_option("--seed", seed)->capture_default_str();
    }
    pad::PadOptions options() const {
        pad::PadOptions o;
        o.classifier = pad::parse_classifier(classifier);
        o.k = k;
        o.trees = trees;
        o.average_tree_counts = !full_forest;
        o.seed = seed;
        return o;
    }
    std::vector<pad::Metric> list() const { return pad::parse_metric_list(metrics); }
};

std::vector<fs::path> pngs_under(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

void register_pad(CLI::App& app) {
    auto* pad_cmd = app.add_subcommand("pad", "Presentation attack detection from image-quality metrics");
    pad_cmd->require_subcommand(1);

    {
        auto* cmd = pad_cmd->add_subcommand("quality", "Quality-vector CSV of <in>/real and <in>/fake");
        auto args = std::make_shared<PadArgs>();
        auto in = std::make_shared<fs::path>();
        auto out = std::make_shared<fs::path>();
        args->add(cmd, all_metrics());
        cmd->add_option("--in", *in)->required()->check(CLI::ExistingDirectory);
        cmd->add_option("--out", *out, "CSV path")->required();
        cmd->callback([=] { pad::quality_set_from_dir(*in, args->list()).save_csv(*out); });
    }
    {
        auto* cmd = pad_cmd->add_subcommand("eval", "Train on one set, test on another; PadResult JSON");
        auto args = std::make_shared<PadArgs>();
        auto train = std::make_shared<fs::path>();
        auto test = std::make_shared<fs::path>();
        auto out = std::make_shared<fs::path>();
        args->add(cmd, kDefaultMetrics);
        cmd->add_option("--train", *train, "real/fake directory or quality CSV")->required();
        cmd->add_option("--test", *test, "real/fake directory or quality CSV; omit for 3-fold rotation on --train");
        cmd->add_option("--out", *out);
        cmd->callback([=] {
            const auto metrics = args->list();
            const auto tr = load_quality(*train, metrics);
            const auto r = test->empty() ? pad::evaluate_pad_rotation(tr, args->options())
                                         : pad::evaluate_pad(tr, load_quality(*test, metrics), args->options());
            emit_json(r.to_json(), *out);
        });
    }
    {
        auto* cmd = pad_cmd->add_subcommand("subset-search", "Greedy metric-subset search by AER");
        auto args = std::make_shared<PadArgs>();
        auto train = std::make_shared<fs::path>();
        auto test = std::make_shared<fs::path>();
        auto out = std::make_shared<fs::path>();
        args->add(cmd, all_metrics());
        cmd->add_option("--train", *train, "real/fake directory or quality CSV")->required();
        cmd->add_option("--test", *test, "Omit to score subsets by 3-fold rotation on --train");
        cmd->add_option("--out", *out);
        cmd->callback([=] {
            const auto metrics = args->list();
            const auto tr = load_quality(*train, metrics);
            const auto r = test->empty() ? pad::greedy_metric_subset(tr, args->options())
                                         : pad::greedy_metric_subset(tr, load_quality(*test, metrics), args->options());
            emit_json(r.to_json(), *out);
        });
    }
    {
        auto* cmd = pad_cmd->add_subcommand("threshold", "Distance-threshold analysis (real and fake ROC)");
        auto args = std::make_shared<PadArgs>();
        auto train = std::make_shared<fs::path>();
        auto test = std::make_shared<fs::path>();
        auto reading = std::make_shared<std::string>("sqrt-sigma");
        auto out = std::make_shared<fs::path>();
        args->add(cmd, kDefaultMetrics);
        cmd->add_option("--train", *train)->required();
        cmd->add_option("--test", *test)->required();
        cmd->add_option("--reading", *reading, "Divisor of each metric difference")
            ->capture_default_str()
            ->check(CLI::IsMember({"sqrt-sigma", "sigma"}));
        cmd->add_option("--out", *out);
        cmd->callback([=] {
            const auto metrics = args->list();
            const auto r = pad::threshold_analysis(
                load_quality(*train, metrics), load_quality(*test, metrics),
                *reading == "sigma" ? pad::RadicalReading::Sigma : pad::RadicalReading::SqrtSigma);
            emit_json(r.to_json(), *out);
        });
    }
    {
        auto* cmd = pad_cmd->add_subcommand("synth-spoof", "Simulated screen recaptures of every PNG under --in");
        auto in = std::make_shared<fs::path>();
        auto out = std::make_shared<fs::path>();
        auto seed = std::make_shared<std::uint64_t>(1);
        cmd->add_option("--in", *in)->required()->check(CLI::ExistingDirectory);
        cmd->add_option("--out", *out)->required();
        cmd->add_option("--seed", *seed)->capture_default_str();
        cmd->callback([=] {
            imaging::RandomSource rng(*seed);
            json params = json::object();
            for (const auto& p : pngs_under(*in)) {
                const auto rel = fs::relative(p, *in);
                pad::SpoofParams sp;
                const auto spoof = pad::synth_spoof(imaging::read_png(p), rng, &sp);
                fs::create_directories((*out / rel).parent_path());
                imaging::write_png(*out / rel, spoof);
                params[rel.generic_string()] = sp.to_json();
            }
            emit_json(params, *out / "spoof_params.json");
        });
    }
}

}  // namespace handcap::cli
