#include "mig/commands.hpp"

#include "mig/calibration.hpp"
#include "mig/dynamics.hpp"
#include "mig/io.hpp"
#include "mig/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>

namespace mig::cli {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const DegenerateFit& e) {
        err << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

struct ScenarioLoad {
    std::vector<std::string> issues; // non-empty means the scenario is unusable
    Scenario scenario;
    bool has_charge_column = false;
};

ScenarioLoad load_and_validate(const ScenarioArgs& args) {
    ScenarioLoad load;
    const ScenarioConfig config = load_scenario_config(args.config_path);
    RegionTable table = load_regions(args.regions_path);
    const DistanceMatrix raw = args.distances_path
                                   ? load_distance_matrix(*args.distances_path)
                                   : distances_from_positions(table.regions);

    load.issues = validate_scenario(config, table.regions, raw).issues;
    load.has_charge_column = table.has_charge_column;
    if (!load.issues.empty()) return load;

    Scenario scenario;
    scenario.regions = std::move(table.regions);
    scenario.config = config;
    scenario.charge_overrides = std::move(table.charge_overrides);
    scenario.distances = align_distances(raw, scenario.region_ids());
    const bool gated = config.model == ModelKind::NpvGatedCoulomb ||
                       config.model == ModelKind::NpvGatedGravity;
    if (gated)
        scenario.npv = load_npv_table(config.npv->table, config.npv->benefits_column,
                                      config.npv->costs_column, scenario.region_ids());
    load.scenario = std::move(scenario);
    return load;
}

// Output files are written next to their final names and renamed together
// once every write has succeeded; a failed command leaves no outputs.
class StagedDir {
public:
    explicit StagedDir(const std::string& out_dir) : dir_(out_dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError(out_dir + ": cannot create directory: " + ec.message());
    }

    ~StagedDir() {
        for (const auto& [tmp, target] : staged_) {
            (void)target;
            std::error_code ec;
            fs::remove(tmp, ec);
        }
    }

    void stage(const std::string& name, const std::function<void(std::ostream&)>& writer) {
        const fs::path tmp = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp);
            if (!out) throw IoError(tmp.string() + ": cannot open for writing");
            writer(out);
            out.flush();
            if (!out) throw IoError(tmp.string() + ": write failed");
        }
        staged_.emplace_back(tmp, dir_ / name);
    }

    void commit() {
        for (const auto& [tmp, target] : staged_) {
            std::error_code ec;
            fs::rename(tmp, target, ec);
            if (ec)
                throw IoError(target.string() + ": cannot move output into place: " +
                              ec.message());
        }
        staged_.clear();
    }

private:
    fs::path dir_;
    std::vector<std::pair<fs::path, fs::path>> staged_;
};

void print_issues(const std::vector<std::string>& issues, std::ostream& to) {
    for (const auto& issue : issues) to << "invalid: " << issue << '\n';
}

void write_flow_summary(const FlowMatrix& flows, const ScenarioConfig& config,
                        std::ostream& out) {
    out << "model: " << to_string(config.model) << '\n';
    out << "regions: " << flows.size() << '\n';
    out << "total_flow: " << format_number(flows.total()) << '\n';

    struct Corridor {
        double flow;
        std::string origin;
        std::string dest;
    };
    std::vector<Corridor> corridors;
    for (Eigen::Index i = 0; i < flows.size(); ++i)
        for (Eigen::Index j = 0; j < flows.size(); ++j)
            if (flows.people(i, j) > 0.0)
                corridors.push_back({flows.people(i, j),
                                     flows.ids[static_cast<std::size_t>(i)],
                                     flows.ids[static_cast<std::size_t>(j)]});
    std::sort(corridors.begin(), corridors.end(), [](const Corridor& a, const Corridor& b) {
        if (a.flow != b.flow) return a.flow > b.flow;
        if (a.origin != b.origin) return a.origin < b.origin;
        return a.dest < b.dest;
    });
    if (corridors.size() > 5) corridors.resize(5);

    out << "top_corridors:" << (corridors.empty() ? " none" : "") << '\n';
    for (const auto& c : corridors)
        out << c.origin << " -> " << c.dest << ": " << format_number(c.flow) << '\n';
}

// Aligns a loaded flow matrix to the region order; id sets must match.
FlowMatrix align_flows(const FlowMatrix& flows, const std::vector<std::string>& ids) {
    std::set<std::string> have(flows.ids.begin(), flows.ids.end());
    std::set<std::string> want(ids.begin(), ids.end());
    std::vector<std::string> missing;
    std::vector<std::string> unknown;
    for (const auto& id : want)
        if (!have.count(id)) missing.push_back(id);
    for (const auto& id : have)
        if (!want.count(id)) unknown.push_back(id);
    if (!missing.empty() || !unknown.empty()) {
        std::string msg = "observed flow matrix does not match the region table;";
        for (const auto& id : missing) msg += " missing '" + id + "'";
        for (const auto& id : unknown) msg += " unknown '" + id + "'";
        throw InvalidInput(msg);
    }

    FlowMatrix aligned = FlowMatrix::zero(ids);
    for (Eigen::Index i = 0; i < aligned.size(); ++i)
        for (Eigen::Index j = 0; j < aligned.size(); ++j)
            aligned.people(i, j) = flows.people(
                flows.index_of(ids[static_cast<std::size_t>(i)]),
                flows.index_of(ids[static_cast<std::size_t>(j)]));
    return aligned;
}

void write_coulomb_fit(const CalibrationResult& fit, std::optional<double> epsilon,
                       std::ostream& out) {
    out << "model: coulomb\n";
    out << "lambda: " << format_number(*fit.lambda) << '\n';
    if (fit.k_for_epsilon)
        out << "k: " << format_number(*fit.k_for_epsilon)
            << " (epsilon = " << format_number(*epsilon) << ")\n";
    out << "rss: " << format_number(fit.rss) << '\n';
    out << "pairs_used: " << fit.pairs_used << '\n';
    out << "pairs_excluded: " << fit.pairs_degenerate << '\n';
    out << "clamped: " << (fit.clamped ? "yes" : "no") << '\n';
}

void write_gravity_fit(const CalibrationResult& fit, std::ostream& out) {
    const auto& g = *fit.gravity;
    out << "model: gravity\n";
    out << "G: " << format_number(g.G) << '\n';
    out << "alpha: " << format_number(g.alpha) << '\n';
    out << "beta: " << format_number(g.beta) << '\n';
    out << "gamma: " << format_number(g.gamma) << '\n';
    out << "theta: " << format_number(g.theta) << '\n';
    out << "eta: " << format_number(g.eta) << '\n';
    out << "rss_log: " << format_number(fit.rss) << '\n';
    out << "pairs_used: " << fit.pairs_used << '\n';
    out << "pairs_excluded: " << fit.pairs_degenerate << '\n';
}

void write_residuals(const CalibrationResult& fit, std::ostream& out) {
    out << "origin,dest,observed,predicted,residual\n";
    for (const auto& r : fit.residuals)
        out << r.origin << ',' << r.dest << ',' << format_number(r.observed) << ','
            << format_number(r.predicted) << ',' << format_number(r.residual) << '\n';
}

} // namespace

int cmd_validate(const ScenarioArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto load = load_and_validate(args);
        if (!load.issues.empty()) {
            print_issues(load.issues, out);
            return kExitInputError;
        }
        const auto& s = load.scenario;
        out << "scenario ok: " << s.regions.size() << " regions, model "
            << to_string(s.config.model) << ", " << s.config.steps << " steps\n";
        return kExitOk;
    });
}

int cmd_flows(const ScenarioArgs& args, const OutputArgs& output, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&] {
        const auto load = load_and_validate(args);
        if (!load.issues.empty()) {
            print_issues(load.issues, err);
            return kExitInputError;
        }
        const auto& scenario = load.scenario;
        const FlowComputation comp = compute_flows(scenario.regions, scenario);

        StagedDir staging(output.out_dir);
        staging.stage("flows.csv", [&](std::ostream& os) { write_flow_matrix(comp.flows, os); });
        staging.stage("summary.txt", [&](std::ostream& os) {
            write_flow_summary(comp.flows, scenario.config, os);
        });
        staging.commit();

        out << "total flow " << format_number(comp.flows.total()) << " across "
            << scenario.regions.size() << " regions; outputs in " << output.out_dir << '\n';
        return kExitOk;
    });
}

int cmd_simulate(const ScenarioArgs& args, const OutputArgs& output, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        auto load = load_and_validate(args);
        if (load.issues.empty() && load.scenario.config.steps < 1)
            load.issues.push_back("steps must be >= 1 to simulate");
        if (!load.issues.empty()) {
            print_issues(load.issues, err);
            return kExitInputError;
        }
        const auto& scenario = load.scenario;

        double initial_total = 0.0;
        for (const auto& r : scenario.regions) initial_total += r.profile.population;

        const RunResult result = run(scenario);

        double final_total = 0.0;
        for (const auto& r : result.final_state.regions) final_total += r.profile.population;
        const double drift = initial_total > 0.0
                                 ? std::abs(final_total - initial_total) / initial_total
                                 : std::abs(final_total - initial_total);

        RegionTable final_table;
        final_table.regions = result.final_state.regions;
        final_table.has_charge_column = load.has_charge_column;
        final_table.charge_overrides = scenario.charge_overrides;

        StagedDir staging(output.out_dir);
        staging.stage("timeseries.csv",
                      [&](std::ostream& os) { write_timeseries(result.series, os); });
        staging.stage("final_state.csv",
                      [&](std::ostream& os) { write_regions(final_table, os); });
        staging.stage("flows_cumulative.csv", [&](std::ostream& os) {
            write_flow_matrix(result.final_state.cumulative, os);
        });
        staging.commit();

        out << "simulated " << scenario.config.steps << " steps; population drift "
            << format_number(drift) << " relative (initial " << format_number(initial_total)
            << ", final " << format_number(final_total) << "); outputs in "
            << output.out_dir << '\n';
        return kExitOk;
    });
}

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.model != "coulomb" && args.model != "gravity") {
            err << "error: --model must be coulomb or gravity\n";
            return kExitInputError;
        }
        const ScenarioConfig config =
            args.config_path ? load_scenario_config(*args.config_path) : ScenarioConfig{};

        RegionTable table = load_regions(args.regions_path);
        const DistanceMatrix raw = args.distances_path
                                       ? load_distance_matrix(*args.distances_path)
                                       : distances_from_positions(table.regions);

        std::vector<std::string> ids;
        ids.reserve(table.regions.size());
        for (const auto& r : table.regions) ids.push_back(r.id);

        const FlowMatrix observed = align_flows(load_flow_matrix(args.observed_path), ids);
        const DistanceMatrix distances = align_distances(raw, ids);

        CalibrationResult fit;
        std::optional<double> epsilon;
        if (args.model == "coulomb") {
            const ChargeAssignment charges =
                assign_charges(table.regions, config, table.charge_overrides);
            if (args.config_path) epsilon = config.epsilon;
            fit = fit_coulomb_coupling(observed, charges, distances, epsilon);
        } else {
            const Eigen::MatrixXd economic = economic_distance_matrix(
                distances.km, config.distance_c0, config.distance_c1);
            fit = fit_gravity_params(observed, table.regions, economic);
        }

        StagedDir staging(args.out_dir);
        staging.stage("fit.txt", [&](std::ostream& os) {
            if (args.model == "coulomb") write_coulomb_fit(fit, epsilon, os);
            else write_gravity_fit(fit, os);
        });
        staging.stage("residuals.csv", [&](std::ostream& os) { write_residuals(fit, os); });
        staging.commit();

        if (args.model == "coulomb") {
            out << "lambda " << format_number(*fit.lambda);
            if (fit.k_for_epsilon) out << ", k " << format_number(*fit.k_for_epsilon);
        } else {
            const auto& g = *fit.gravity;
            out << "G " << format_number(g.G) << ", alpha " << format_number(g.alpha)
                << ", beta " << format_number(g.beta) << ", gamma " << format_number(g.gamma)
                << ", theta " << format_number(g.theta) << ", eta " << format_number(g.eta);
        }
        out << "; rss " << format_number(fit.rss) << "; outputs in " << args.out_dir << '\n';
        return kExitOk;
    });
}

} // namespace mig::cli
