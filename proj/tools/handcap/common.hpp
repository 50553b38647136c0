#pragma once

#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

namespace handcap::cli {

nlohmann::json read_json(const std::filesystem::path& path);

/// Pretty JSON to `out`, or to stdout when `out` is empty.
void emit_json(const nlohmann::json& j, const std::filesystem::path& out = {});

void register_analysis(CLI::App& app);   // threat-report, captcha, synth
void register_pad(CLI::App& app);        // pad
void register_biometric(CLI::App& app);  // finger, select, verify
void register_gateway(CLI::App& app);    // serve, session

}  // namespace handcap::cli
