#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "handcap/captcha/generator.hpp"
#include "handcap/captcha/solution.hpp"
#include "handcap/common/error.hpp"
#include "handcap/fingergeom/templates.hpp"
#include "handcap/imaging/png_io.hpp"
#include "handcap/pad/spoof.hpp"
#include "handcap/synth/features.hpp"
#include "handcap/synth/hand_model.hpp"
#include "handcap/threatmodel/threatmodel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace handcap::cli {

namespace {

struct StoreArgs {
    fs::path root;
    std::size_t backgrounds = 4, genuine = 8, fakes = 10;
    std::uint64_t seed = 1;

    void add(CLI::App* cmd) {
        cmd->add_option("--stores", root, "Store root with backgrounds/, genuine/, fakes/ (default: synthetic)");
        cmd->add_option("--synthetic-backgrounds", backgrounds)->capture_default_str();
        cmd->add_option("--synthetic-genuine", genuine)->capture_default_str();
        cmd->add_option("--synthetic-fakes", fakes)->capture_default_str();
        cmd->add_option("--store-seed", seed, "Seed of the synthetic stores")->capture_default_str();
    }
    captcha::StoreSet load() const {
        return root.empty() ? captcha::synthetic_stores(backgrounds, genuine, fakes, seed) : captcha::StoreSet::load(root);
    }
};

captcha::ChallengeSpec load_spec(const fs::path& p) {
    return p.empty() ? captcha::ChallengeSpec{} : captcha::spec_from_json(read_json(p));
}

void add_threat_report(CLI::App& app) {
    auto* cmd = app.add_subcommand("threat-report", "Attack probabilities and search-effort estimates as JSON");
    auto p = std::make_shared<threatmodel::ReportParams>();
    auto hand_max = std::make_shared<double>(150);
    auto p_human = std::make_shared<double>(-1);
    auto out = std::make_shared<fs::path>();
    cmd->add_option("--canvas-width", p->canvas_width)->capture_default_str();
    cmd->add_option("--canvas-height", p->canvas_height)->capture_default_str();
    cmd->add_option("--hand-width", p->hand_width)->capture_default_str();
    cmd->add_option("--hand-height", p->hand_height)->capture_default_str();
    cmd->add_option("--hand-max", *hand_max, "Side of the largest hand in the size range")->capture_default_str();
    cmd->add_option("--click-radius", p->click_radius)->capture_default_str();
    cmd->add_option("--answers", p->n_answers, "Possible answers per challenge")->capture_default_str();
    cmd->add_option("--challenges", p->challenges, "Consecutive challenges a bot must pass")->capture_default_str();
    cmd->add_option("--genuine-classes", p->genuine_classes)->capture_default_str();
    cmd->add_option("--dim-gap", p->dim_gap, "Range of hand dimensions in pixels")->capture_default_str();
    cmd->add_option("--pixel-fraction", p->pixel_fraction)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--grid-slots", p->grid_slots)->capture_default_str();
    cmd->add_option("--picks", p->picks)->capture_default_str();
    cmd->add_option("--objects", p->objects)->capture_default_str();
    cmd->add_option("--baseline-objects", p->baseline_objects)->capture_default_str();
    cmd->add_option("--beta", p->beta, "Per-object segmentation cost factor")->capture_default_str();
    cmd->add_option("--pixel-cost", p->per_pixel_cost_s, "Seconds per pixel test")->capture_default_str();
    cmd->add_option("--p-human", *p_human, "Measured human accuracy in [0, 1]")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--out", *out);
    cmd->callback([=] {
        if (*p_human >= 0) p->p_human = *p_human;
        emit_json(json::parse(threatmodel::to_json(threatmodel::security_report(*p, *hand_max))), *out);
    });
}

void add_captcha(CLI::App& app) {
    auto* captcha_cmd = app.add_subcommand("captcha", "Challenge generation and offline grading");
    captcha_cmd->require_subcommand(1);

    {
        auto* cmd = captcha_cmd->add_subcommand("generate", "Write challenges as PNG + JSON sidecar");
        auto stores = std::make_shared<StoreArgs>();
        auto spec_path = std::make_shared<fs::path>();
        auto out = std::make_shared<fs::path>();
        auto truth_dir = std::make_shared<fs::path>();
        auto count = std::make_shared<int>(1);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto entropy = std::make_shared<bool>(false);
        stores->add(cmd);
        cmd->add_option("--spec", *spec_path, "ChallengeSpec JSON (sidecar spelling)");
        cmd->add_option("--out", *out, "Output directory")->required();
        cmd->add_option("--truth-dir", *truth_dir, "Where the server-side truth files go");
        cmd->add_option("--count", *count)->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--seed", *seed, "Seed of the first challenge; later ones use seed + i")->capture_default_str();
        cmd->add_flag("--entropy-report", *entropy, "Print the entropy-gap report of each challenge");
        cmd->callback([=] {
            const auto set = stores->load();
            const auto spec = load_spec(*spec_path);
            json summary = json::array();
            for (int i = 0; i < *count; ++i) {
                const auto ch = captcha::generate_challenge_retrying(set, spec, *seed + static_cast<std::uint64_t>(i));
                captcha::write_challenge(ch, *out, *truth_dir);
                json row{{"id", ch.id}, {"seed", ch.seed}, {"occupied_cells", ch.occupied_cells}};
                if (*entropy) row["entropy"] = captcha::entropy_gap_report(ch, set).to_json();
                summary.push_back(row);
            }
            emit_json(summary);
        });
    }
    {
        auto* cmd = captcha_cmd->add_subcommand("check", "Grade an answer against a truth file");
        auto truth = std::make_shared<fs::path>();
        auto cells = std::make_shared<std::vector<int>>();
        auto elapsed = std::make_shared<double>(0);
        auto ordered = std::make_shared<bool>(false);
        cmd->add_option("--truth", *truth, "<id>.truth.json")->required()->check(CLI::ExistingFile);
        cmd->add_option("--cells", *cells, "Two cell labels")->required()->expected(2);
        cmd->add_option("--elapsed", *elapsed, "Seconds taken")->capture_default_str();
        cmd->add_flag("--ordered", *ordered, "Require genuine image 1 before image 2");
        cmd->callback([=] {
            const auto t = read_json(*truth).at("truth").get<std::array<int, 2>>();
            const auto v = captcha::verify_solution(t, {(*cells)[0], (*cells)[1]}, *elapsed,
                                                    *ordered ? captcha::MatchMode::Ordered : captcha::MatchMode::Unordered);
            emit_json({{"result", captcha::outcome_name(v.outcome)}, {"reason", v.reason}});
        });
    }
}

void write_hands(const synth::Population& pop, std::size_t subjects, std::size_t samples, std::size_t first,
                 const fs::path& dir) {
    char name[32];
    for (std::size_t s = 0; s < subjects; ++s) {
        std::snprintf(name, sizeof name, "s%04zu", s);
        fs::create_directories(dir / name);
        for (std::size_t k = 0; k < samples; ++k) {
            imaging::write_png(dir / name / (std::to_string(k) + ".png"), pop.sample(s, first + k));
        }
    }
}

void add_synth(CLI::App& app) {
    auto* synth_cmd = app.add_subcommand("synth", "Synthetic stand-in data sets");
    synth_cmd->require_subcommand(1);
    {
        auto* cmd = synth_cmd->add_subcommand("stores", "CAPTCHA stores in the on-disk layout");
        auto stores = std::make_shared<StoreArgs>();
        auto out = std::make_shared<fs::path>();
        stores->add(cmd);
        cmd->add_option("--out", *out)->required();
        cmd->callback([=] {
            StoreArgs a = *stores;
            a.root.clear();
            a.load().save(*out);
        });
    }
    {
        auto* cmd = synth_cmd->add_subcommand("hands", "Hand scans as <out>/<subject>/<k>.png");
        auto subjects = std::make_shared<std::size_t>(20);
        auto samples = std::make_shared<std::size_t>(3);
        auto first = std::make_shared<std::size_t>(0);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto out = std::make_shared<fs::path>();
        cmd->add_option("--subjects", *subjects)->capture_default_str();
        cmd->add_option("--samples", *samples)->capture_default_str();
        cmd->add_option("--first-sample", *first, "Index of the first capture (fresh captures for probes)")
            ->capture_default_str();
        cmd->add_option("--seed", *seed)->capture_default_str();
        cmd->add_option("--out", *out)->required();
        cmd->callback([=] { write_hands(synth::Population::make(*subjects, *seed), *subjects, *samples, *first, *out); });
    }
    {
        auto* cmd = synth_cmd->add_subcommand("pad-set", "Real captures and recapture spoofs as <out>/{real,fake}/<subject>/<k>.png");
        auto subjects = std::make_shared<std::size_t>(20);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto out = std::make_shared<fs::path>();
        cmd->add_option("--subjects", *subjects)->capture_default_str();
        cmd->add_option("--seed", *seed)->capture_default_str();
        cmd->add_option("--out", *out)->required();
        cmd->callback([=] {
            const auto pop = synth::Population::make(*subjects, *seed);
            imaging::RandomSource rng(imaging::mix_seed(*seed));
            char name[32];
            for (std::size_t s = 0; s < *subjects; ++s) {
                std::snprintf(name, sizeof name, "s%04zu", s);
                fs::create_directories(*out / "real" / name);
                fs::create_directories(*out / "fake" / name);
                for (std::size_t k = 0; k < 3; ++k) {
                    imaging::write_png(*out / "real" / name / (std::to_string(k) + ".png"), pop.sample(s, k));
                    imaging::write_png(*out / "fake" / name / (std::to_string(k) + ".png"),
                                       pad::synth_spoof(pop.sample(s, k + 3), rng));
                }
            }
        });
    }
    {
        auto* cmd = synth_cmd->add_subcommand("planted", "Feature-level template file with planted informative columns");
        auto subjects = std::make_shared<std::size_t>(100);
        auto samples = std::make_shared<std::size_t>(4);
        auto noise = std::make_shared<double>(0.08);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto informative = std::make_shared<std::vector<std::size_t>>(
            std::vector<std::size_t>{3, 17, 30, 45, 58, 71, 88, 101});
        auto out = std::make_shared<fs::path>();
        cmd->add_option("--subjects", *subjects)->capture_default_str();
        cmd->add_option("--samples", *samples)->capture_default_str();
        cmd->add_option("--noise", *noise)->capture_default_str();
        cmd->add_option("--informative", *informative, "Informative columns (0..103)")->capture_default_str();
        cmd->add_option("--seed", *seed)->capture_default_str();
        cmd->add_option("--out", *out)->required();
        cmd->callback([=] {
            const auto pop = synth::planted_population(*subjects, *samples, 104, *informative, *noise, *seed);
            emit_json(fingergeom::build_templates(pop).to_json(), *out);
        });
    }
}

}  // namespace

void register_analysis(CLI::App& app) {
    add_threat_report(app);
    add_captcha(app);
    add_synth(app);
}

}  // namespace handcap::cli
