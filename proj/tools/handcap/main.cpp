#include <fstream>
#include <iostream>

#include "common.hpp"
#include "handcap/common/error.hpp"

namespace handcap::cli {

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

void emit_json(const nlohmann::json& j, const std::filesystem::path& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream f(out);
    if (!f) throw IoError("cannot write " + out.string());
    f << j.dump(2) << '\n';
}

}  // namespace handcap::cli

int main(int argc, char** argv) {
    CLI::App app{"handcap: hand-image CAPTCHA and finger-geometry verification"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    handcap::cli::register_analysis(app);
    handcap::cli::register_pad(app);
    handcap::cli::register_biometric(app);
    handcap::cli::register_gateway(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const handcap::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
