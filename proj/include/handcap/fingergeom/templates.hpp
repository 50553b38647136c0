#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "handcap/fingergeom/normalizer.hpp"

namespace handcap::fingergeom {

using RawSamples = std::map<std::string, std::vector<std::vector<double>>>;

struct SubjectTemplates {
    std::string subject_id;
    std::vector<std::vector<double>> samples;  // normalized 104-vectors
    std::string extrema_version;
};

/// Normalized hand vectors per subject together with the extrema that
/// produced them. Layout:
///   {"extrema": {min, max, clamp, version},
///    "subjects": [{subject_id, samples, extrema_version}], "failures": [...]}
struct TemplateFile {
    MinMaxNormalizer extrema;
    std::vector<SubjectTemplates> subjects;
    std::vector<std::string> failures;  // "<file>: <reason>" for skipped scans

    RawSamples samples() const;

    nlohmann::json to_json() const;
    /// Throws InvalidArgument when a subject's extrema_version differs from the file's extrema.
    static TemplateFile from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static TemplateFile load(const std::filesystem::path& path);
};

/// Fits the extrema on every raw vector and normalizes them.
TemplateFile build_templates(const RawSamples& raw);

/// Scans `<dir>/<subject>/*.png` (sorted), extracts hand vectors, then
/// build_templates. Unreadable or unsegmentable scans are listed in failures.
TemplateFile extract_templates(const std::filesystem::path& dir);

}  // namespace handcap::fingergeom
