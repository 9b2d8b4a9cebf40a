// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands: layout, diagnose, run, sweep,
// presets. Scenarios come from a JSON file (--config) or a shipped preset
// (--preset); --out, --seed and --distance-mode override the file.
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "qfuca/presets.hpp"
#include "qfuca/scenario.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string preset_id;
    std::string out_dir;
    std::string distance_mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

qfuca::Scenario resolve_scenario(const Options& o) {
    qfuca::Scenario s;
    if (!o.config_path.empty()) {
        s = qfuca::load_scenario(o.config_path);
        if (!o.preset_id.empty())
            throw qfuca::config_error("preset", "give either --config or --preset, not both");
    } else if (!o.preset_id.empty()) {
        const qfuca::Preset& p = qfuca::preset(o.preset_id);
        s.config = p.config;
        s.config_id = p.id;
        s.snr_db = 10.0 * std::log10(p.config.total_power_w / p.config.noise_variance_w);
    } else {
        throw qfuca::config_error("config", "a scenario file (--config) or --preset is required");
    }
    if (!o.out_dir.empty()) s.out_dir = o.out_dir;
    if (o.seed_set) s.seed = o.seed;
    if (!o.distance_mode.empty()) {
        if (o.distance_mode == "exact") s.distance_mode = qfuca::DistanceMode::exact;
        else if (o.distance_mode == "approx") s.distance_mode = qfuca::DistanceMode::approx;
        else throw qfuca::config_error("distance-mode", "must be 'exact' or 'approx'");
    }
    return s;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path, "scenario JSON file");
    cmd->add_option("--preset", o.preset_id, "shipped preset id (see 'presets')");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "seed for noise trials and symbol frames")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--distance-mode", o.distance_mode, "exact|approx");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"N-dimensional OAM multiplexing link simulator over quasi-fractal circular arrays"};
    app.require_subcommand(1);

    Options opts;
    CLI::App* cmd_layout = app.add_subcommand("layout", "emit element layout CSVs");
    CLI::App* cmd_diagnose = app.add_subcommand("diagnose", "residuals and conditioning, no transmission");
    CLI::App* cmd_run = app.add_subcommand("run", "full chain on one scenario point");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "SE over a preset/distance/SNR grid");
    CLI::App* cmd_presets = app.add_subcommand("presets", "list shipped presets");
    for (CLI::App* c : {cmd_layout, cmd_diagnose, cmd_run, cmd_sweep}) add_common(c, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_presets->parsed()) {
            qfuca::print_presets(std::cout);
            return 0;
        }
        const qfuca::Scenario scenario = resolve_scenario(opts);
        if (cmd_layout->parsed()) qfuca::run_layout(scenario);
        else if (cmd_diagnose->parsed()) qfuca::run_diagnose(scenario);
        else if (cmd_run->parsed()) qfuca::run_scenario(scenario);
        else if (cmd_sweep->parsed()) qfuca::run_sweep(scenario);
        return 0;
    } catch (const qfuca::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
