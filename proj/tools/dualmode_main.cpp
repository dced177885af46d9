#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualmode/cli/commands.hpp"
#include "dualmode/cli/scenario.hpp"
#include "dualmode/cli/table.hpp"
#include "dualmode/dualmode.hpp"

namespace {

using namespace dualmode;
using namespace dualmode::cli;

// Exit codes: 0 success, 2 invalid scenario/request, 3 infeasible request,
// 4 validation failure.
int exit_code_for(errc code) {
    switch (code) {
        case errc::unstable:
        case errc::infeasible_fraction:
        case errc::infeasible_assignment:
        case errc::unstable_simulation:
        case errc::degenerate_config:
        case errc::non_monotone_breakaway:
        case errc::not_applicable: return 3;
        default: return 2;
    }
}

struct Args {
    std::string scenario_path;
    std::vector<std::string> presets;
    std::optional<std::string> loads_text;
    std::optional<std::string> grid_text;
    bool absolute = false;
    std::optional<std::string> format;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> jobs;
    std::optional<std::uint64_t> warmup;
    std::optional<int> batches;
    std::optional<int> p_points;
    std::optional<double> pass_fraction;
};

void add_source_options(CLI::App* cmd, Args& args) {
    auto* scenario =
        cmd->add_option("--scenario", args.scenario_path, "Scenario file (key = value sections)");
    auto* preset = cmd->add_option("--preset", args.presets,
                                   "Built-in system: systemA, systemB or systemC (repeatable)")
                       ->delimiter(',');
    scenario->excludes(preset);
}

void add_axis_options(CLI::App* cmd, Args& args) {
    cmd->add_option_function<std::string>(
        "--loads", [&args](const std::string& v) { args.loads_text = v; },
        "Load list: comma-separated or lo:hi:step (rho unless --absolute)");
    cmd->add_option_function<std::string>(
        "--grid", [&args](const std::string& v) { args.grid_text = v; },
        "Alias of --loads");
    cmd->add_flag("--absolute", args.absolute, "Loads are absolute arrival rates, not rho");
}

void add_output_options(CLI::App* cmd, Args& args) {
    cmd->add_option_function<std::string>(
           "--format", [&args](const std::string& v) { args.format = v; },
           "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", args.out_path, "Write output to this file instead of stdout");
}

void add_sim_options(CLI::App* cmd, Args& args) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t v) { args.seed = v; }, "Base RNG seed");
    cmd->add_option_function<std::uint64_t>(
        "--jobs", [&args](std::uint64_t v) { args.jobs = v; },
        "Measured departures per simulated point");
    cmd->add_option_function<std::uint64_t>(
        "--warmup", [&args](std::uint64_t v) { args.warmup = v; },
        "Discarded departures before measurement (default jobs/10)");
    cmd->add_option_function<int>(
        "--batches", [&args](int v) { args.batches = v; }, "Batch count for the CI");
    cmd->add_option_function<double>(
        "--pass-fraction", [&args](double v) { args.pass_fraction = v; },
        "Minimum passing fraction of points (default 8/9)");
}

Scenario resolve_scenario(const Args& args) {
    Scenario scenario;
    if (!args.scenario_path.empty()) {
        scenario = load_scenario_file(args.scenario_path);
    } else if (!args.presets.empty()) {
        for (const std::string& name : args.presets) {
            scenario.systems.push_back(preset_system(name));
        }
    } else {
        fail(errc::invalid_config, "one of --scenario or --preset is required");
    }
    if (args.loads_text && args.grid_text) {
        fail(errc::invalid_config, "--loads and --grid are aliases; pass only one");
    }
    if (args.loads_text) scenario.options.loads = parse_load_axis(*args.loads_text);
    if (args.grid_text) scenario.options.loads = parse_load_axis(*args.grid_text);
    if (args.absolute) scenario.options.absolute = true;
    if (args.format) scenario.options.format = *args.format;
    if (args.seed) scenario.options.seed = *args.seed;
    if (args.jobs) scenario.options.jobs = *args.jobs;
    if (args.warmup) scenario.options.warmup = *args.warmup;
    if (args.batches) scenario.options.batches = *args.batches;
    if (args.p_points) scenario.options.p_points = *args.p_points;
    if (args.pass_fraction) scenario.options.pass_fraction = *args.pass_fraction;
    return scenario;
}

const SystemSpec& single_system(const Scenario& scenario, const char* command) {
    if (scenario.systems.size() != 1) {
        fail(errc::invalid_config,
             std::string(command) + " accepts exactly one system; got " +
                 std::to_string(scenario.systems.size()));
    }
    return scenario.systems.front();
}

void emit(const Table& table, const Scenario& scenario, const std::string& out_path) {
    const std::string body = serialize(table, scenario.options.format);
    if (out_path.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) fail(errc::invalid_config, "cannot open output file '" + out_path + "'");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-mode offloading delay analysis"};
    app.require_subcommand(1);

    Args args;
    CLI::App* info = app.add_subcommand("info", "System parameters, stability region and thresholds");
    add_source_options(info, args);
    add_output_options(info, args);

    CLI::App* delay_vs_p =
        app.add_subcommand("delay-vs-p", "Delay curves over the feasible assignment range");
    add_source_options(delay_vs_p, args);
    add_axis_options(delay_vs_p, args);
    add_output_options(delay_vs_p, args);
    delay_vs_p->add_option_function<int>(
        "--p-points", [&args](int v) { args.p_points = v; },
        "Points across the assignment range (default 401)");

    CLI::App* pstar =
        app.add_subcommand("pstar-vs-load", "Optimal assignment parameter over a load grid");
    add_source_options(pstar, args);
    add_axis_options(pstar, args);
    add_output_options(pstar, args);

    CLI::App* delay_vs_load = app.add_subcommand(
        "delay-vs-load", "Optimal delay and the tunable-mode lower bound over a load grid");
    add_source_options(delay_vs_load, args);
    add_axis_options(delay_vs_load, args);
    add_output_options(delay_vs_load, args);

    CLI::App* validate =
        app.add_subcommand("validate", "Simulate the optimal operating points and compare");
    add_source_options(validate, args);
    add_axis_options(validate, args);
    add_output_options(validate, args);
    add_sim_options(validate, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const Scenario scenario = resolve_scenario(args);
        const ScenarioOptions& opt = scenario.options;
        if (info->parsed()) {
            emit(cmd_info(single_system(scenario, "info")), scenario, args.out_path);
        } else if (delay_vs_p->parsed()) {
            emit(cmd_delay_vs_p(single_system(scenario, "delay-vs-p"), opt.loads, opt.absolute,
                                opt.p_points),
                 scenario, args.out_path);
        } else if (pstar->parsed()) {
            emit(cmd_pstar_vs_load(single_system(scenario, "pstar-vs-load"), opt.loads,
                                   opt.absolute),
                 scenario, args.out_path);
        } else if (delay_vs_load->parsed()) {
            emit(cmd_delay_vs_load(scenario.systems, opt.loads, opt.absolute), scenario,
                 args.out_path);
        } else if (validate->parsed()) {
            ValidationSummary summary;
            const Table table =
                cmd_validate(single_system(scenario, "validate"), opt.loads, opt, summary);
            emit(table, scenario, args.out_path);
            std::fprintf(stderr, "validate: %zu/%zu points passed (required %zu)\n",
                         summary.passed, summary.points, summary.required);
            if (!summary.ok) return 4;
        }
        return 0;
    } catch (const dualmode::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
