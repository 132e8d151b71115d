// migmodel -- compute, simulate and calibrate inter-regional migration
// flows with a signed-charge attraction model and classical baselines.
#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <optional>

#include "mig/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Inter-regional migration flows: signed-charge attraction model, NPV and "
        "gravity baselines, population dynamics, and calibration"};
    app.require_subcommand(1);

    using mig::cli::CalibrateArgs;
    using mig::cli::OutputArgs;
    using mig::cli::ScenarioArgs;

    std::function<int()> action;

    auto add_scenario_options = [](CLI::App* cmd, ScenarioArgs& args) {
        cmd->add_option("--regions", args.regions_path, "Region table CSV")->required();
        cmd->add_option("--distances", args.distances_path,
                        "Distance matrix CSV (default: great-circle distances from "
                        "region coordinates)");
        cmd->add_option("--config", args.config_path, "Scenario config JSON")->required();
    };

    ScenarioArgs validate_args;
    auto* validate =
        app.add_subcommand("validate", "Check a scenario and report every violation");
    add_scenario_options(validate, validate_args);
    validate->callback([&] {
        action = [&] { return mig::cli::cmd_validate(validate_args, std::cout, std::cerr); };
    });

    ScenarioArgs flows_args;
    OutputArgs flows_out;
    auto* flows = app.add_subcommand("flows", "Compute a one-shot flow matrix");
    add_scenario_options(flows, flows_args);
    flows->add_option("--out", flows_out.out_dir, "Output directory")->required();
    flows->callback([&] {
        action = [&] {
            return mig::cli::cmd_flows(flows_args, flows_out, std::cout, std::cerr);
        };
    });

    ScenarioArgs simulate_args;
    OutputArgs simulate_out;
    auto* simulate =
        app.add_subcommand("simulate", "Run the time-stepped population dynamics");
    add_scenario_options(simulate, simulate_args);
    simulate->add_option("--out", simulate_out.out_dir, "Output directory")->required();
    simulate->callback([&] {
        action = [&] {
            return mig::cli::cmd_simulate(simulate_args, simulate_out, std::cout, std::cerr);
        };
    });

    CalibrateArgs calibrate_args;
    auto* calibrate =
        app.add_subcommand("calibrate", "Fit model parameters to observed flows");
    calibrate->add_option("--regions", calibrate_args.regions_path, "Region table CSV")
        ->required();
    calibrate->add_option("--distances", calibrate_args.distances_path,
                          "Distance matrix CSV (default: great-circle distances)");
    calibrate->add_option("--observed", calibrate_args.observed_path,
                          "Observed flow matrix CSV")
        ->required();
    calibrate->add_option("--model", calibrate_args.model, "coulomb or gravity")->required();
    calibrate->add_option("--out", calibrate_args.out_dir, "Output directory")->required();
    calibrate->add_option("--config", calibrate_args.config_path,
                          "Optional scenario config (charge rules, epsilon, distance costs)");
    calibrate->callback([&] {
        action = [&] { return mig::cli::cmd_calibrate(calibrate_args, std::cout, std::cerr); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? mig::cli::kExitOk : mig::cli::kExitInputError;
    }
    return action ? action() : mig::cli::kExitInputError;
}
