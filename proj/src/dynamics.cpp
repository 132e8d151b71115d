#include "mig/dynamics.hpp"

#include <sstream>

namespace mig {

Eigen::VectorXd apply_mobility_cap(const Eigen::VectorXd& outflows, double population,
                                   double mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidInput("apply_mobility_cap: mu must lie in [0, 1]");
    if (!(population >= 0.0) || !std::isfinite(population))
        throw InvalidInput("apply_mobility_cap: population must be >= 0");
    for (Eigen::Index i = 0; i < outflows.size(); ++i)
        if (!(outflows(i) >= 0.0) || !std::isfinite(outflows(i)))
            throw InvalidInput("apply_mobility_cap: outflows must be >= 0");

    const double total = outflows.sum();
    const double cap = mu * population;
    if (total <= cap || total == 0.0) return outflows;
    return outflows * (cap / total);
}

SimulationState initial_state(const Scenario& scenario) {
    SimulationState state;
    state.step = 0;
    state.regions = scenario.regions;
    state.charges =
        assign_charges(state.regions, scenario.config, scenario.charge_overrides);
    state.cumulative = FlowMatrix::zero(scenario.region_ids());
    return state;
}

SimulationState step(const SimulationState& state, const Scenario& scenario) {
    const auto n = static_cast<Eigen::Index>(state.regions.size());

    // Flows from the state at entry; everything applied synchronously below.
    FlowMatrix flows;
    try {
        flows = model_flow_matrix(state.charges, state.regions, scenario);
    } catch (const InvalidInput& e) {
        std::ostringstream msg;
        msg << "step " << state.step + 1 << ": " << e.what();
        throw InvalidInput(msg.str());
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd capped = apply_mobility_cap(
            flows.people.row(i).transpose(),
            state.regions[static_cast<std::size_t>(i)].profile.population,
            scenario.config.mobility_cap);
        flows.people.row(i) = capped.transpose();
    }

    SimulationState next;
    next.step = state.step + 1;
    next.regions = state.regions;
    next.cumulative = state.cumulative;
    next.cumulative.people += flows.people;

    // Migrants carry their origin's per-capita GDP with them.
    Eigen::VectorXd gdp_per_capita(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = state.regions[static_cast<std::size_t>(i)].profile;
        gdp_per_capita(i) = p.population > 0.0 ? p.gdp / p.population : 0.0;
    }
    const Eigen::VectorXd people_out = flows.people.rowwise().sum();
    const Eigen::VectorXd people_in = flows.people.colwise().sum().transpose();
    const Eigen::VectorXd gdp_out = people_out.cwiseProduct(gdp_per_capita);
    const Eigen::VectorXd gdp_in = flows.people.transpose() * gdp_per_capita;

    for (Eigen::Index i = 0; i < n; ++i) {
        auto& profile = next.regions[static_cast<std::size_t>(i)].profile;
        // The cap keeps removals within the region; clamp only absorbs
        // floating-point rounding at the boundary.
        profile.population = std::max(0.0, profile.population - people_out(i) + people_in(i));
        profile.gdp = std::max(0.0, profile.gdp - gdp_out(i) + gdp_in(i));
    }

    next.charges = assign_charges(next.regions, scenario.config, scenario.charge_overrides);
    return next;
}

RunResult run(const Scenario& scenario) {
    if (scenario.config.steps < 0) throw InvalidInput("run: steps must be >= 0");

    RunResult result;
    SimulationState state = initial_state(scenario);

    auto record_block = [&](const SimulationState& s, const Eigen::VectorXd& net_inflow) {
        for (std::size_t i = 0; i < s.regions.size(); ++i) {
            TimeSeriesRecord rec;
            rec.step = s.step;
            rec.region_id = s.regions[i].id;
            rec.population = s.regions[i].profile.population;
            rec.charge = s.charges.charge(static_cast<Eigen::Index>(i));
            rec.net_inflow = net_inflow(static_cast<Eigen::Index>(i));
            result.series.records.push_back(std::move(rec));
        }
    };

    const auto n = static_cast<Eigen::Index>(state.regions.size());
    record_block(state, Eigen::VectorXd::Zero(n));

    for (int t = 0; t < scenario.config.steps; ++t) {
        SimulationState next = step(state, scenario);
        const Eigen::MatrixXd applied = next.cumulative.people - state.cumulative.people;
        const Eigen::VectorXd net_inflow =
            applied.colwise().sum().transpose() - applied.rowwise().sum();
        record_block(next, net_inflow);
        state = std::move(next);
    }

    result.final_state = std::move(state);
    return result;
}

} // namespace mig
