// scenario.hpp -- validated scenario bundle and the model dispatch shared
// by the CLI commands and the simulation loop.
#pragma once

#include <span>
#include <unordered_map>

#include "mig/classical.hpp"
#include "mig/coulomb.hpp"
#include "mig/core.hpp"

namespace mig {

// Everything a flow computation needs, with distances aligned to the
// region order and the NPV table loaded when the model is gated.
struct Scenario {
    std::vector<Region> regions;
    DistanceMatrix distances; // ids in region order
    ScenarioConfig config;
    std::unordered_map<std::string, double> charge_overrides;
    std::optional<NpvTable> npv; // present iff an npv-gated model is configured

    std::vector<std::string> region_ids() const {
        std::vector<std::string> out;
        out.reserve(regions.size());
        for (const auto& r : regions) out.push_back(r.id);
        return out;
    }
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

// Checks every type invariant and lists all violations, not just the first:
// region ids, coordinate ranges, profile ranges, distance-matrix symmetry
// and positivity, config ranges, threshold feasibility, NPV-gate presence.
ValidationReport validate_scenario(const ScenarioConfig& config,
                                   std::span<const Region> regions,
                                   const DistanceMatrix& distances);

ValidationReport validate_scenario(const Scenario& scenario);

// Reorders a distance matrix to the given id order. The id sets must match
// exactly; otherwise throws InvalidInput naming the mismatched ids.
DistanceMatrix align_distances(const DistanceMatrix& distances,
                               const std::vector<std::string>& ids);

struct FlowComputation {
    ChargeAssignment charges; // charges that produced the flows
    FlowMatrix flows;
};

// Flow matrix for the configured model (coulomb or gravity, plus the
// optional NPV gate) given charges already derived for these regions.
FlowMatrix model_flow_matrix(const ChargeAssignment& charges,
                             std::span<const Region> current_regions,
                             const Scenario& scenario);

// One-shot flow matrix for the configured model, deriving the charges from
// the given current region profiles.
FlowComputation compute_flows(std::span<const Region> current_regions,
                              const Scenario& scenario);

} // namespace mig
