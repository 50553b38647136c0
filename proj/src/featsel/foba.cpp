#include "handcap/featsel/foba.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "handcap/common/error.hpp"
#include "handcap/fingergeom/features.hpp"
#include "handcap/imaging/random.hpp"

using nlohmann::json;

namespace handcap::featsel {

namespace {

constexpr int kAttrs = fingergeom::kFeaturesPerFinger;

std::vector<std::size_t> without(const std::vector<std::size_t>& v, const std::vector<std::size_t>& drop) {
    std::vector<std::size_t> out;
    for (auto c : v) {
        if (std::find(drop.begin(), drop.end(), c) == drop.end()) out.push_back(c);
    }
    return out;
}

std::vector<std::size_t> with(std::vector<std::size_t> v, const std::vector<std::size_t>& add) {
    for (auto c : add) {
        if (std::find(v.begin(), v.end(), c) == v.end()) v.push_back(c);
    }
    return v;
}

bool contains_all(const std::vector<std::size_t>& set, const std::vector<std::size_t>& items) {
    return std::all_of(items.begin(), items.end(),
                       [&](std::size_t c) { return std::find(set.begin(), set.end(), c) != set.end(); });
}

bool intersects(const std::vector<std::size_t>& set, const std::vector<std::size_t>& items) {
    return std::any_of(items.begin(), items.end(),
                       [&](std::size_t c) { return std::find(set.begin(), set.end(), c) != set.end(); });
}

// Forward-accept threshold comparison with a little slack for accuracies that
// are ratios of the same small integers.
bool gains(double after, double before, double epsilon) { return after - before >= epsilon - 1e-12; }

std::string finger_label(int finger) {
    return std::string(fingergeom::finger_name(static_cast<fingergeom::FingerKind>(finger)));
}

json index_json(std::size_t column) {
    const auto f = FeatureIndex::from_column(column);
    return json{{"finger", finger_label(f.finger)}, {"attribute", f.attribute}};
}

}  // namespace

std::string_view relevance_name(Relevance r) {
    switch (r) {
        case Relevance::Relevant: return "relevant";
        case Relevance::ConditionallyRelevant: return "conditionally relevant";
        case Relevance::Redundant: return "redundant";
        case Relevance::Irrelevant: return "irrelevant";
    }
    return "?";
}

Relevance parse_relevance(std::string_view s) {
    for (Relevance r : {Relevance::Relevant, Relevance::ConditionallyRelevant, Relevance::Redundant,
                        Relevance::Irrelevant}) {
        if (relevance_name(r) == s) return r;
    }
    throw InvalidArgument("unknown relevance tag: '" + std::string(s) + "'");
}

std::vector<Candidate> local_candidates(std::size_t columns) {
    std::vector<Candidate> out;
    for (std::size_t c = 0; c < columns; ++c) {
        out.push_back({columns == static_cast<std::size_t>(fingergeom::kHandFeatures)
                           ? fingergeom::feature_name(static_cast<int>(c))
                           : "f" + std::to_string(c),
                       {c}});
    }
    return out;
}

std::vector<Candidate> global_candidates(std::size_t columns) {
    if (columns == 0 || columns % kAttrs != 0) {
        throw InvalidArgument("global features need a multiple of " + std::to_string(kAttrs) + " columns");
    }
    const std::size_t fingers = columns / kAttrs;
    std::vector<Candidate> out;
    for (int a = 0; a < kAttrs; ++a) {
        Candidate g;
        const std::string local = fingergeom::feature_name(a);
        g.name = "all." + local.substr(local.find('.') + 1);
        for (std::size_t f = 0; f < fingers; ++f) g.columns.push_back(f * kAttrs + static_cast<std::size_t>(a));
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<std::size_t> FobaResult::columns(const std::vector<Candidate>& candidates) const {
    std::vector<std::size_t> out;
    for (auto m : members) out = with(std::move(out), candidates.at(m).columns);
    return out;
}

FobaResult foba(const std::vector<Candidate>& candidates, const SubsetEvaluator& eval, const FobaOptions& opts) {
    if (candidates.empty()) throw InvalidArgument("empty candidate list");
    if (!(opts.epsilon >= 0)) throw InvalidArgument("epsilon must be non-negative");
    FobaResult r;
    imaging::RandomSource rng(opts.seed);
    const std::size_t first = rng.index(candidates.size());
    r.sequence.push_back(first);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i != first) r.sequence.push_back(i);
    }

    std::vector<std::size_t> cols = candidates[first].columns;
    double acc = eval(cols);
    r.forward.push_back(first);
    r.trace.push_back(acc);
    for (std::size_t s = 1; s < r.sequence.size(); ++s) {
        const std::size_t c = r.sequence[s];
        auto trial = with(cols, candidates[c].columns);
        if (trial.size() == cols.size()) continue;  // group already covered
        const double a = eval(trial);
        if (gains(a, acc, opts.epsilon)) {
            cols = std::move(trial);
            acc = a;
            r.forward.push_back(c);
            r.trace.push_back(acc);
        }
    }

    r.members = r.forward;
    for (const std::size_t c : r.forward) {
        if (r.members.size() == 1) break;
        std::vector<std::size_t> rest;
        std::copy_if(r.members.begin(), r.members.end(), std::back_inserter(rest), [&](auto m) { return m != c; });
        std::vector<std::size_t> rest_cols;
        for (auto m : rest) rest_cols = with(std::move(rest_cols), candidates[m].columns);
        const double a = eval(rest_cols);
        if (a >= acc) {
            r.members = std::move(rest);
            acc = a;
            r.backward_trace.push_back(a);
        }
    }
    r.accuracy = acc;

    if (opts.tag) {
        const auto final_cols = r.columns(candidates);
        std::vector<std::size_t> dropped;
        for (auto c : r.forward) {
            if (std::find(r.members.begin(), r.members.end(), c) == r.members.end()) {
                dropped = with(std::move(dropped), without(candidates[c].columns, final_cols));
            }
        }
        r.tags = tag_candidates(candidates, final_cols, dropped, eval, opts.epsilon);
    }
    return r;
}

std::vector<Relevance> tag_candidates(const std::vector<Candidate>& candidates,
                                      const std::vector<std::size_t>& final_columns,
                                      const std::vector<std::size_t>& dropped_columns, const SubsetEvaluator& eval,
                                      double epsilon) {
    const double base = eval.baseline();
    const double n = static_cast<double>(eval.validation_size());
    const double informative = base + epsilon + 2 * std::sqrt(base * (1 - base) / n);
    const double final_acc = eval(final_columns);

    std::vector<Relevance> tags;
    for (const auto& c : candidates) {
        if (contains_all(final_columns, c.columns)) {
            tags.push_back(Relevance::Relevant);
        } else if (intersects(dropped_columns, c.columns) || eval(c.columns) >= informative) {
            tags.push_back(Relevance::Redundant);
        } else if (gains(eval(with(final_columns, c.columns)), final_acc, epsilon)) {
            tags.push_back(Relevance::ConditionallyRelevant);
        } else {
            tags.push_back(Relevance::Irrelevant);
        }
    }
    return tags;
}

MfobaResult mfoba(const SubsetEvaluator& eval, const FobaOptions& opts) {
    const std::size_t width = eval.feature_count();
    const auto globals = global_candidates(width);
    const auto locals = local_candidates(width);

    MfobaResult r;
    r.epsilon = opts.epsilon;
    r.seed = opts.seed;
    FobaOptions inner = opts;
    inner.tag = false;
    inner.seed = imaging::mix_seed(opts.seed ^ 0x676c6f62ULL);
    r.global = foba(globals, eval, inner);
    inner.seed = imaging::mix_seed(opts.seed ^ 0x6c6f6361ULL);
    r.local = foba(locals, eval, inner);

    r.f1 = r.global.columns(globals);
    r.f2 = r.local.columns(locals);
    r.f3 = with(r.f1, r.f2);

    std::vector<std::size_t> cur = r.f3;
    double acc = eval(cur);
    r.accuracy_f3 = acc;
    // Passes in F3 order until one removes nothing: a single pass strands
    // noise columns that only become removable once their neighbours are gone.
    for (bool removed = true; removed;) {
        removed = false;
        for (const std::size_t c : r.f3) {
            if (cur.size() == 1) break;
            if (std::find(cur.begin(), cur.end(), c) == cur.end()) continue;
            auto trial = without(cur, {c});
            const double a = eval(trial);
            if (a >= acc) {
                cur = std::move(trial);
                acc = a;
                r.backward_trace.push_back(a);
                removed = true;
            }
        }
    }
    r.f_opt = cur;
    r.accuracy = acc;

    std::vector<std::size_t> prefix;
    for (auto c : r.f_opt) {
        prefix.push_back(c);
        r.trace.push_back(eval(prefix));
    }
    if (opts.tag) r.tags = tag_candidates(locals, r.f_opt, without(r.f3, r.f_opt), eval, opts.epsilon);
    return r;
}

json subset_json(const MfobaResult& r) {
    json members = json::array(), tags = json::array();
    for (auto c : r.f_opt) members.push_back(index_json(c));
    for (std::size_t c = 0; c < r.tags.size(); ++c) {
        auto t = index_json(c);
        t["tag"] = relevance_name(r.tags[c]);
        tags.push_back(std::move(t));
    }
    return json{{"members", members},
                {"trace", r.trace},
                {"tags", tags},
                {"cardinality", r.cardinality_trace()},
                {"accuracy", r.accuracy},
                {"accuracy_f3", r.accuracy_f3},
                {"epsilon", r.epsilon},
                {"seed", r.seed}};
}

std::vector<std::size_t> FeatureSubset::columns() const {
    std::vector<std::size_t> out;
    for (const auto& m : members) out.push_back(m.column());
    return out;
}

FeatureSubset FeatureSubset::from_json(const json& j) {
    if (!j.is_object() || !j.contains("members") || !j.at("members").is_array()) {
        throw InvalidArgument("malformed subset file: missing members");
    }
    FeatureSubset s;
    std::set<std::size_t> seen;
    for (const auto& m : j.at("members")) {
        FeatureIndex f;
        const auto& finger = m.at("finger");
        if (finger.is_number_integer()) {
            f.finger = finger.get<int>();
        } else {
            std::string name = finger.get<std::string>();
            std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
            f.finger = -1;
            for (int k = 0; k < 4; ++k) {
                if (finger_label(k) == name) f.finger = k;
            }
            if (f.finger < 0) throw InvalidArgument("unknown finger: '" + name + "'");
        }
        f.attribute = m.at("attribute").get<int>();
        if (!seen.insert(f.column()).second) {
            throw InvalidArgument("duplicate feature in subset: " + fingergeom::feature_name(static_cast<int>(f.column())));
        }
        s.members.push_back(f);
    }
    if (s.members.empty()) throw InvalidArgument("empty feature subset");
    if (j.contains("trace")) s.trace = j.at("trace").get<std::vector<double>>();
    return s;
}

}  // namespace handcap::featsel
