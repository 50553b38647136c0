#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include "common.hpp"
#include "handcap/common/error.hpp"
#include "handcap/featsel/foba.hpp"
#include "handcap/featsel/importance.hpp"
#include "handcap/fingergeom/features.hpp"
#include "handcap/fingergeom/templates.hpp"
#include "handcap/gateway/stage2.hpp"
#include "handcap/imaging/png_io.hpp"
#include "handcap/verify/knn.hpp"
#include "handcap/verify/matching.hpp"
#include "handcap/verify/roc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace handcap::cli {

namespace {

std::vector<std::size_t> subset_columns(const fs::path& subset, std::string* version = nullptr) {
    if (subset.empty()) {
        std::vector<std::size_t> all(fingergeom::kHandFeatures);
        std::iota(all.begin(), all.end(), 0);
        if (version) *version = "all";
        return all;
    }
    if (version) *version = subset.filename().string();
    return featsel::FeatureSubset::from_json(read_json(subset)).columns();
}

/// Normalized vectors of `<dir>/<subject>/*.png`, using frozen extrema.
std::map<std::string, verify::Samples> scans_under(const fs::path& dir, const fingergeom::MinMaxNormalizer& extrema,
                                                   json& failures) {
    std::map<std::string, verify::Samples> out;
    std::vector<fs::path> subjects;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_directory()) subjects.push_back(e.path());
    }
    std::sort(subjects.begin(), subjects.end());
    for (const auto& s : subjects) {
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(s)) {
            if (f.path().extension() == ".png") files.push_back(f.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                out[s.filename().string()].push_back(extrema.apply(fingergeom::hand_vector(imaging::read_png(f))));
            } catch (const Error& e) {
                failures.push_back(f.string() + ": " + e.what());
            }
        }
    }
    return out;
}

struct EnrolledStore {
    fingergeom::MinMaxNormalizer extrema;
    verify::TemplateStore store;
    double threshold = 0;
};

EnrolledStore load_store(const fs::path& p) {
    const auto j = read_json(p);
    EnrolledStore s;
    s.extrema = fingergeom::MinMaxNormalizer::from_json(j.at("extrema").dump());
    s.store = verify::TemplateStore::from_json(j.at("store"));
    s.threshold = j.at("threshold").get<double>();
    return s;
}

void add_finger(CLI::App& app) {
    auto* finger_cmd = app.add_subcommand("finger", "Finger-geometry feature extraction");
    finger_cmd->require_subcommand(1);
    auto* cmd = finger_cmd->add_subcommand("extract", "Templates from <in>/<subject>/*.png");
    auto in = std::make_shared<fs::path>();
    auto out = std::make_shared<fs::path>();
    cmd->add_option("--in", *in)->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--out", *out, "templates.json")->required();
    cmd->callback([=] {
        const auto file = fingergeom::extract_templates(*in);
        file.save(*out);
        emit_json({{"subjects", file.subjects.size()}, {"failures", file.failures}});
    });
}

void add_select(CLI::App& app) {
    auto* select_cmd = app.add_subcommand("select", "Feature subset selection");
    select_cmd->require_subcommand(1);
    {
        auto* cmd = select_cmd->add_subcommand("mfoba", "Modified forward-backward selection over global and local features");
        auto templates = std::make_shared<fs::path>();
        auto epsilon = std::make_shared<double>(0.005);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto classifier = std::make_shared<std::string>("knn");
        auto trees = std::make_shared<int>(50);
        auto out = std::make_shared<fs::path>();
        cmd->add_option("--templates", *templates)->required()->check(CLI::ExistingFile);
        cmd->add_option("--epsilon", *epsilon, "Minimum absolute accuracy gain")->capture_default_str();
        cmd->add_option("--seed", *seed)->capture_default_str();
        cmd->add_option("--classifier", *classifier)->capture_default_str()->check(CLI::IsMember({"knn", "rf"}));
        cmd->add_option("--trees", *trees)->capture_default_str();
        cmd->add_option("--out", *out, "Subset file (default: stdout)");
        cmd->callback([=] {
            const auto data = featsel::dataset_from_samples(fingergeom::TemplateFile::load(*templates).samples());
            featsel::EvalOptions eo;
            eo.classifier = *classifier == "rf" ? featsel::EvalClassifier::Rf : featsel::EvalClassifier::Knn;
            eo.trees = *trees;
            eo.seed = *seed;
            const featsel::SubsetEvaluator eval(data, eo);
            featsel::FobaOptions fo;
            fo.epsilon = *epsilon;
            fo.seed = *seed;
            emit_json(featsel::subset_json(featsel::mfoba(eval, fo)), *out);
        });
    }
    {
        auto* cmd = select_cmd->add_subcommand("importance", "Random-forest permutation importance per feature");
        auto templates = std::make_shared<fs::path>();
        auto trees = std::make_shared<int>(100);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto out = std::make_shared<fs::path>();
        cmd->add_option("--templates", *templates)->required()->check(CLI::ExistingFile);
        cmd->add_option("--trees", *trees)->capture_default_str();
        cmd->add_option("--seed", *seed)->capture_default_str();
        cmd->add_option("--out", *out);
        cmd->callback([=] {
            const auto data = featsel::dataset_from_samples(fingergeom::TemplateFile::load(*templates).samples());
            verify::ForestParams fp;
            fp.trees = *trees;
            fp.seed = *seed;
            const auto forest = verify::RandomForest::train(data.x, data.y, fp);
            auto j = featsel::permutation_importance(forest, data.x, data.y, *seed).to_json();
            if (data.features() == static_cast<std::size_t>(fingergeom::kHandFeatures)) {
                for (auto& row : j) row["name"] = fingergeom::feature_name(row["feature"].get<int>());
            }
            emit_json(j, *out);
        });
    }
}

/// Genuine and imposter claim distances over the 3-fold rotation.
void rotation_distances(const fingergeom::TemplateFile& file, const std::vector<std::size_t>& columns,
                        std::vector<double>& genuine, std::vector<double>& imposter, double* accuracy) {
    const auto raw = file.samples();
    double acc = 0;
    for (int fold = 0; fold < 3; ++fold) {
        const auto split = verify::rotation_split(raw, fold);
        verify::TemplateStore store(columns, "rotation");
        for (const auto& [s, vs] : split.enrolled) {
            verify::Samples projected;
            for (const auto& v : vs) projected.push_back(store.project(v));
            store.enroll(s, projected);
        }
        store.fit_sigma();
        std::map<std::string, std::vector<double>> probes;
        for (const auto& [s, p] : split.probes) {
            const auto q = store.project(p);
            probes[s] = q;
            for (const auto& other : store.subjects()) {
                (other == s ? genuine : imposter).push_back(verify::claim_distance(q, other, store));
            }
        }
        acc += verify::identification_accuracy(store, probes);
    }
    if (accuracy) *accuracy = acc / 3;
}

void add_verify(CLI::App& app) {
    auto* verify_cmd = app.add_subcommand("verify", "Enrollment, identification and verification");
    verify_cmd->require_subcommand(1);
    {
        auto* cmd = verify_cmd->add_subcommand("enroll", "Template store from a template file");
        auto templates = std::make_shared<fs::path>();
        auto subset = std::make_shared<fs::path>();
        auto threshold = std::make_shared<double>(-1);
        auto out = std::make_shared<fs::path>();
        cmd->add_option("--templates", *templates)->required()->check(CLI::ExistingFile);
        cmd->add_option("--subset", *subset, "Subset file from select mfoba (default: all 104 features)");
        cmd->add_option("--threshold", *threshold, "Accept threshold (default: calibrated equal-error threshold)");
        cmd->add_option("--out", *out, "store.json")->required();
        cmd->callback([=] {
            const auto file = fingergeom::TemplateFile::load(*templates);
            std::string version;
            const auto columns = subset_columns(*subset, &version);
            const auto store = gateway::enroll_templates(file, columns, version);
            const double t = *threshold >= 0 ? *threshold : gateway::calibrate_threshold(store);
            emit_json({{"extrema", json::parse(file.extrema.to_json())}, {"store", store.to_json()}, {"threshold", t}},
                      *out);
            emit_json({{"subjects", store.subject_count()},
                       {"samples", store.sample_count()},
                       {"features", store.dimension()},
                       {"threshold", t},
                       {"warnings", store.warnings()}});
        });
    }
    {
        auto* cmd = verify_cmd->add_subcommand("identify", "k-NN identification of scans, or 3-fold rotation accuracy");
        auto store_path = std::make_shared<fs::path>();
        auto scan = std::make_shared<fs::path>();
        auto probes = std::make_shared<fs::path>();
        auto templates = std::make_shared<fs::path>();
        auto subset = std::make_shared<fs::path>();
        auto k = std::make_shared<std::size_t>(1);
        cmd->add_option("--store", *store_path, "store.json from verify enroll");
        cmd->add_option("--scan", *scan, "One hand scan")->check(CLI::ExistingFile);
        cmd->add_option("--probes", *probes, "Labelled scans <dir>/<subject>/*.png")->check(CLI::ExistingDirectory);
        cmd->add_option("--templates", *templates, "Rotation protocol on a template file instead of a store")
            ->check(CLI::ExistingFile);
        cmd->add_option("--subset", *subset, "Subset file for the rotation protocol");
        cmd->add_option("-k", *k)->capture_default_str();
        cmd->callback([=] {
            if (!templates->empty()) {
                std::vector<double> g, i;
                double acc = 0;
                rotation_distances(fingergeom::TemplateFile::load(*templates), subset_columns(*subset), g, i, &acc);
                emit_json({{"protocol", "3-fold rotation"}, {"accuracy", acc}});
                return;
            }
            if (store_path->empty()) throw InvalidArgument("--store or --templates is required");
            const auto s = load_store(*store_path);
            if (!scan->empty()) {
                const auto v = s.store.project(s.extrema.apply(fingergeom::hand_vector(imaging::read_png(*scan))));
                emit_json({{"subject", verify::knn_identify(v, s.store, *k)}});
                return;
            }
            if (probes->empty()) throw InvalidArgument("--scan or --probes is required");
            json failures = json::array(), rows = json::array();
            std::size_t total = 0, correct = 0;
            for (const auto& [subject, vs] : scans_under(*probes, s.extrema, failures)) {
                for (const auto& v : vs) {
                    const auto got = verify::knn_identify(s.store.project(v), s.store, *k);
                    rows.push_back({{"subject", subject}, {"identified", got}});
                    ++total;
                    correct += got == subject;
                }
            }
            emit_json({{"probes", rows},
                       {"accuracy", total ? json(static_cast<double>(correct) / total) : json(nullptr)},
                       {"failures", failures}});
        });
    }
    {
        auto* cmd = verify_cmd->add_subcommand("claim", "Verify one scan against a claimed subject");
        auto store_path = std::make_shared<fs::path>();
        auto scan = std::make_shared<fs::path>();
        auto subject = std::make_shared<std::string>();
        auto threshold = std::make_shared<double>(-1);
        cmd->add_option("--store", *store_path)->required()->check(CLI::ExistingFile);
        cmd->add_option("--scan", *scan)->required()->check(CLI::ExistingFile);
        cmd->add_option("--subject", *subject)->required();
        cmd->add_option("--threshold", *threshold, "Override the stored threshold");
        cmd->callback([=] {
            const auto s = load_store(*store_path);
            const auto v = s.store.project(s.extrema.apply(fingergeom::hand_vector(imaging::read_png(*scan))));
            const auto r = verify::verify_claim(v, *subject, s.store, *threshold >= 0 ? *threshold : s.threshold);
            emit_json({{"result", r.genuine ? "genuine" : "imposter"}, {"distance", r.distance}});
        });
    }
    {
        auto* cmd = verify_cmd->add_subcommand("roc", "ROC of 3-fold rotation claims");
        auto templates = std::make_shared<fs::path>();
        auto subset = std::make_shared<fs::path>();
        auto out = std::make_shared<fs::path>();
        cmd->add_option("--templates", *templates)->required()->check(CLI::ExistingFile);
        cmd->add_option("--subset", *subset);
        cmd->add_option("--out", *out, "roc.csv (threshold,far,frr,gar)")->required();
        cmd->callback([=] {
            std::vector<double> g, i;
            double acc = 0;
            rotation_distances(fingergeom::TemplateFile::load(*templates), subset_columns(*subset), g, i, &acc);
            const auto curve = verify::roc(g, i);
            std::ofstream f(*out);
            if (!f) throw IoError("cannot write " + out->string());
            verify::write_roc_csv(curve, f);
            emit_json({{"eer", curve.eer},
                       {"eer_threshold", curve.eer_threshold},
                       {"genuine", g.size()},
                       {"imposter", i.size()},
                       {"identification_accuracy", acc}});
        });
    }
    {
        auto* cmd = verify_cmd->add_subcommand("disjoint", "Verification with imposters unknown to the system");
        auto templates = std::make_shared<fs::path>();
        auto imposters = std::make_shared<fs::path>();
        auto subset = std::make_shared<fs::path>();
        auto enroll = std::make_shared<std::size_t>(1);
        auto out = std::make_shared<fs::path>();
        cmd->add_option("--templates", *templates, "Genuine subjects")->required()->check(CLI::ExistingFile);
        cmd->add_option("--imposters", *imposters, "Scans <dir>/<subject>/*.png, or a template file with the same extrema")
            ->required();
        cmd->add_option("--subset", *subset);
        cmd->add_option("--enroll", *enroll, "Samples enrolled per genuine subject; the rest are probes")
            ->capture_default_str();
        cmd->add_option("--out", *out, "roc.csv");
        cmd->callback([=] {
            const auto file = fingergeom::TemplateFile::load(*templates);
            std::string version;
            verify::TemplateStore store(subset_columns(*subset, &version), version);
            std::map<std::string, verify::Samples> probes;
            for (const auto& [s, v] : file.samples()) {
                if (v.size() <= *enroll) throw InvalidArgument("subject '" + s + "' has no probe samples left");
                verify::Samples enrolled;
                for (std::size_t i = 0; i < v.size(); ++i) (i < *enroll ? enrolled : probes[s]).push_back(store.project(v[i]));
                store.enroll(s, enrolled);
            }
            store.fit_sigma();

            json failures = json::array();
            std::map<std::string, verify::Samples> imp;
            if (fs::is_directory(*imposters)) {
                imp = scans_under(*imposters, file.extrema, failures);
            } else {
                const auto other = fingergeom::TemplateFile::load(*imposters);
                if (other.extrema.version() != file.extrema.version()) {
                    throw InvalidArgument("imposter templates were normalized with different extrema");
                }
                imp = other.samples();
            }
            // Imposter ids live in their own namespace: they are not enrolled people.
            std::map<std::string, verify::Samples> imposter_samples;
            for (auto& [s, vs] : imp) {
                auto& dst = imposter_samples["imposter:" + s];
                for (auto& v : vs) dst.push_back(store.project(v));
            }
            const auto r = verify::disjoint_protocol(store, probes, imposter_samples);
            if (!out->empty()) {
                std::ofstream f(*out);
                verify::write_roc_csv(r.curve, f);
            }
            emit_json({{"accounting", r.accounting()},
                       {"genuine_comparisons", r.genuine_comparisons},
                       {"imposter_comparisons", r.imposter_comparisons},
                       {"eer", r.curve.far_defined ? json(r.curve.eer) : json(nullptr)},
                       {"eer_threshold", r.curve.eer_threshold},
                       {"failures", failures}});
        });
    }
}

}  // namespace

void register_biometric(CLI::App& app) {
    add_finger(app);
    add_select(app);
    add_verify(app);
}

}  // namespace handcap::cli
