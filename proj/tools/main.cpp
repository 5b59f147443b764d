#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cvcm/cli/presets.hpp"

using namespace cvcm;
using namespace cvcm::cli;

namespace {

RunConfig load(const std::string& path, const std::string& sweep) {
    RunConfig cfg = load_config(path);
    if (!sweep.empty()) cfg.sweep = parse_sweep(sweep);
    return cfg;
}

template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ModelError& e) {
        spdlog::error("{}", e.what());
        return exit_config;
    } catch (const NumericalError& e) {
        spdlog::error("numerical failure: {}", e.what());
        return exit_numerical;
    } catch (const std::filesystem::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_numerical;
    }
}

} // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("cvcm"));
    spdlog::set_pattern("[%l] %v");
    spdlog::cfg::load_env_levels();

    CLI::App app{"Collision models of a harmonic oscillator with structured ring environments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string sweep;
    auto* run = app.add_subcommand("run", "Run a scenario and write CSV/summary outputs");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--sweep", sweep, "<param>=<start>:<stop>:<n>");

    auto* validate = app.add_subcommand("validate", "Check a config without propagating");
    validate->add_option("config", config_path, "JSON config file")->required();
    validate->add_option("--sweep", sweep, "<param>=<start>:<stop>:<n>");

    std::string preset;
    std::string out_dir = ".";
    auto* pre = app.add_subcommand("preset", "Write the data series of a figure preset");
    pre->add_option("name", preset, "fig2 | fig3 | fig4 | fig5 | fig6")
        ->required()
        ->check(CLI::IsMember(preset_names()));
    pre->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    if (*run) return guarded([&] { return execute(load(config_path, sweep)); });
    if (*validate)
        return guarded([&] {
            const auto report = validation_report(load(config_path, sweep));
            for (const auto& line : report) std::cout << "violation: " << line << '\n';
            if (report.empty()) std::cout << "ok\n";
            return report.empty() ? exit_ok : exit_config;
        });
    return guarded([&] { return run_preset(preset, out_dir); });
}
