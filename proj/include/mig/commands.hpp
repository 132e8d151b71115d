// commands.hpp -- the CLI subcommands as plain functions so tests can drive
// them without a subprocess. Exit codes: 0 success, 1 validation or input
// error, 2 degenerate computation.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace mig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitDegenerate = 2;

struct ScenarioArgs {
    std::string regions_path;
    std::optional<std::string> distances_path; // absent: compute from coordinates
    std::string config_path;
};

struct OutputArgs {
    std::string out_dir;
};

struct CalibrateArgs {
    std::string regions_path;
    std::optional<std::string> distances_path;
    std::string observed_path;
    std::string model; // "coulomb" or "gravity"
    std::string out_dir;
    std::optional<std::string> config_path; // optional charge/epsilon/distance settings
};

// Checks the scenario and prints every violation; writes nothing.
int cmd_validate(const ScenarioArgs& args, std::ostream& out, std::ostream& err);

// One-shot flow matrix; writes flows.csv and summary.txt under out_dir.
int cmd_flows(const ScenarioArgs& args, const OutputArgs& output, std::ostream& out,
              std::ostream& err);

// Multi-step simulation; writes timeseries.csv, final_state.csv and
// flows_cumulative.csv, and prints the conservation check.
int cmd_simulate(const ScenarioArgs& args, const OutputArgs& output, std::ostream& out,
                 std::ostream& err);

// Fits the chosen model to an observed flow matrix; writes fit.txt and
// residuals.csv.
int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err);

} // namespace mig::cli
