// magsim: command-line driver for the postselected Faraday magnetometer model.
//
//   magsim <command> --config <path> [--out <dir>] [--seed <u64>] [--validate]
//
// Errors go to stderr as "error[<category>]: <message>".

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "magsim/config.hpp"
#include "magsim/error.hpp"
#include "magsim/experiments.hpp"
#include "magsim/table.hpp"

namespace {

int exit_code_for(const std::string& category) {
    static const std::map<std::string, int> codes{
        {"usage", 2},      {"config_parse", 3}, {"config_validation", 4}, {"io", 5},
        {"domain", 6},     {"dark_port", 6},    {"no_signal", 6},         {"configuration", 6},
    };
    const auto it = codes.find(category);
    return it == codes.end() ? 7 : it->second;
}

int report(const std::string& category, const std::string& message) {
    std::cerr << "error[" << category << "]: " << message << '\n';
    return exit_code_for(category);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Postselected-amplification Faraday magnetometer simulator"};
    app.set_version_flag("--version", std::string(MAGSIM_VERSION));

    std::string command;
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool validate_only = false;

    app.add_option("command", command, "fig2a | fig2b | fig3 | fig6 | snr | saturation")
        ->required()
        ->check(CLI::IsMember(magsim::command_names()));
    app.add_option("--config", config_path, "Run configuration (.toml or .json)")->required();
    app.add_option("--out", out_dir, "Output directory (overrides output_dir in the config)");
    app.add_option("--seed", seed, "RNG seed (overrides seed in the config)");
    app.add_flag("--validate", validate_only, "Parse and check the config without running");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report("usage", e.what());
    }

    try {
        magsim::RunConfig cfg = magsim::load_config(config_path);
        if (seed) {
            cfg.seed = *seed;
            if (cfg.detector) cfg.detector->seed = *seed;
        }
        magsim::require_sections(command, cfg);
        if (validate_only) {
            std::cout << "ok: " << config_path << " is valid for " << command << '\n';
            return 0;
        }

        const auto start = std::chrono::steady_clock::now();
        auto result = magsim::run_command(command, cfg);
        const auto stop = std::chrono::steady_clock::now();
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

        magsim::RunMetadata meta;
        meta.command = command;
        meta.config_hash = magsim::config_hash(cfg.source_text);
        meta.timestamp = magsim::utc_timestamp();
        meta.seed = cfg.seed;
        meta.wall_time_s = std::chrono::duration<double>(stop - start).count();
        meta.summary = std::move(result.summary);

        const auto dir = out_dir.value_or(cfg.output_dir);
        for (const auto& path : magsim::write_outputs(result.tables, meta, dir))
            std::cout << path.string() << '\n';
        return 0;
    } catch (const magsim::Error& e) {
        return report(e.category(), e.what());
    } catch (const std::exception& e) {
        return report("internal", e.what());
    }
}
