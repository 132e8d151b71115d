// dynamics.hpp -- discrete-time population dynamics driven by the
// configured flow model; totals are conserved by construction.
#pragma once

#include "mig/scenario.hpp"

namespace mig {

struct SimulationState {
    int step = 0;
    std::vector<Region> regions; // profiles evolve with the flows
    ChargeAssignment charges;    // always derived from the current profiles
    FlowMatrix cumulative;       // applied flows summed over all steps
};

struct TimeSeriesRecord {
    int step = 0;
    std::string region_id;
    double population = 0.0;
    double charge = 0.0;
    double net_inflow = 0.0; // inflow - outflow during this step
};

// One record per region per step, step indices contiguous from 0.
// Step 0 is the initial state with zero net inflow.
struct TimeSeries {
    std::vector<TimeSeriesRecord> records;
};

// Proportional rationing of an origin's outflows: untouched while the total
// stays within mu * population, otherwise all entries scale down together.
Eigen::VectorXd apply_mobility_cap(const Eigen::VectorXd& outflows, double population,
                                   double mu);

// State at step 0 for a validated scenario.
SimulationState initial_state(const Scenario& scenario);

// One synchronous step: flows are computed from the state at entry, capped
// per origin, then applied at once. Population moves with its share of the
// origin's GDP; wage and unemployment rates stay fixed. Charges are
// re-derived from the updated profiles.
SimulationState step(const SimulationState& state, const Scenario& scenario);

struct RunResult {
    TimeSeries series;
    SimulationState final_state;
};

// Applies `step` exactly config.steps times. Deterministic: identical
// inputs give bit-identical outputs.
RunResult run(const Scenario& scenario);

} // namespace mig
