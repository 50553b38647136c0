#include "handcap/fingergeom/templates.hpp"

#include <algorithm>
#include <fstream>

#include "handcap/common/error.hpp"
#include "handcap/fingergeom/features.hpp"
#include "handcap/imaging/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace handcap::fingergeom {

RawSamples TemplateFile::samples() const {
    RawSamples out;
    for (const auto& s : subjects) out[s.subject_id] = s.samples;
    return out;
}

json TemplateFile::to_json() const {
    json subs = json::array();
    for (const auto& s : subjects) {
        subs.push_back({{"subject_id", s.subject_id}, {"samples", s.samples}, {"extrema_version", s.extrema_version}});
    }
    return json{{"extrema", json::parse(extrema.to_json())}, {"subjects", subs}, {"failures", failures}};
}

TemplateFile TemplateFile::from_json(const json& j) {
    TemplateFile t;
    try {
        t.extrema = MinMaxNormalizer::from_json(j.at("extrema").dump());
        const std::string version = t.extrema.version();
        for (const auto& s : j.at("subjects")) {
            SubjectTemplates st;
            st.subject_id = s.at("subject_id").get<std::string>();
            st.samples = s.at("samples").get<std::vector<std::vector<double>>>();
            st.extrema_version = s.value("extrema_version", version);
            if (st.extrema_version != version) {
                throw InvalidArgument("extrema version mismatch for subject '" + st.subject_id + "'");
            }
            t.subjects.push_back(std::move(st));
        }
        if (j.contains("failures")) t.failures = j.at("failures").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed template file: ") + e.what());
    }
    return t;
}

void TemplateFile::save(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json().dump() << '\n';
}

TemplateFile TemplateFile::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("malformed template file: " + std::string(e.what()));
    }
    return from_json(j);
}

TemplateFile build_templates(const RawSamples& raw) {
    std::vector<std::vector<double>> rows;
    for (const auto& [id, samples] : raw) rows.insert(rows.end(), samples.begin(), samples.end());
    if (rows.empty()) throw InvalidArgument("no hand vectors to build templates from");
    TemplateFile t;
    t.extrema.fit(rows);
    const std::string version = t.extrema.version();
    for (const auto& [id, samples] : raw) {
        SubjectTemplates st{id, {}, version};
        for (const auto& s : samples) st.samples.push_back(t.extrema.apply(s));
        t.subjects.push_back(std::move(st));
    }
    return t;
}

TemplateFile extract_templates(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("directory not found: " + dir.string());
    std::vector<fs::path> subjects;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_directory()) subjects.push_back(e.path());
    }
    std::sort(subjects.begin(), subjects.end());

    RawSamples raw;
    std::vector<std::string> failures;
    for (const auto& sdir : subjects) {
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(sdir)) {
            if (f.path().extension() == ".png") files.push_back(f.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                raw[sdir.filename().string()].push_back(hand_vector(imaging::read_png(f)));
            } catch (const Error& e) {
                failures.push_back(f.string() + ": " + e.what());
            }
        }
    }
    auto t = build_templates(raw);
    t.failures = std::move(failures);
    return t;
}

}  // namespace handcap::fingergeom
