#include "mig/scenario.hpp"

#include <set>
#include <sstream>
#include <unordered_set>

namespace mig {

namespace {

std::string fmt_pair(const std::string& a, const std::string& b) {
    return "(" + a + ", " + b + ")";
}

void check_regions(std::span<const Region> regions, std::vector<std::string>& issues) {
    if (regions.empty()) issues.push_back("scenario has no regions");
    std::unordered_set<std::string> seen;
    for (const auto& r : regions) {
        if (r.id.empty()) issues.push_back("region with empty id");
        if (!seen.insert(r.id).second)
            issues.push_back("duplicate region id '" + r.id + "'");
        if (r.position) {
            if (!(r.position->lat >= -90.0 && r.position->lat <= 90.0))
                issues.push_back("region '" + r.id + "': latitude out of [-90, 90]");
            if (!(r.position->lon >= -180.0 && r.position->lon <= 180.0))
                issues.push_back("region '" + r.id + "': longitude out of [-180, 180]");
        }
        const auto& p = r.profile;
        for (auto [value, what] : {std::pair{p.population, "population"},
                                   std::pair{p.gdp, "gdp"},
                                   std::pair{p.wage_rate, "wage_rate"}}) {
            if (!std::isfinite(value))
                issues.push_back("region '" + r.id + "': " + what + " is not finite");
            else if (value < 0.0)
                issues.push_back("region '" + r.id + "': " + what + " must be >= 0");
        }
        if (!std::isfinite(p.unemployment_rate) || p.unemployment_rate < 0.0 ||
            p.unemployment_rate > 1.0)
            issues.push_back("region '" + r.id + "': unemployment_rate out of [0, 1]");
    }
}

void check_distances(std::span<const Region> regions, const DistanceMatrix& d,
                     std::vector<std::string>& issues) {
    const auto n = d.size();
    if (d.km.rows() != n || d.km.cols() != n) {
        issues.push_back("distance matrix storage is not square over its id list");
        return;
    }

    std::set<std::string> region_ids;
    for (const auto& r : regions) region_ids.insert(r.id);
    std::set<std::string> matrix_ids(d.ids.begin(), d.ids.end());
    for (const auto& id : region_ids)
        if (!matrix_ids.count(id))
            issues.push_back("distance matrix is missing region '" + id + "'");
    for (const auto& id : matrix_ids)
        if (!region_ids.count(id))
            issues.push_back("distance matrix has unknown region '" + id + "'");

    for (Eigen::Index i = 0; i < n; ++i) {
        if (d.km(i, i) != 0.0)
            issues.push_back("distance matrix: nonzero diagonal for '" +
                             d.ids[static_cast<std::size_t>(i)] + "'");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& a = d.ids[static_cast<std::size_t>(i)];
            const auto& b = d.ids[static_cast<std::size_t>(j)];
            if (!std::isfinite(d.km(i, j)) || !std::isfinite(d.km(j, i))) {
                issues.push_back("distance matrix: non-finite entry for pair " +
                                 fmt_pair(a, b));
                continue;
            }
            if (d.km(i, j) != d.km(j, i)) {
                std::ostringstream msg;
                msg << "distance matrix: asymmetric pair " << fmt_pair(a, b) << ": "
                    << d.km(i, j) << " vs " << d.km(j, i);
                issues.push_back(msg.str());
            }
            if (!(d.km(i, j) > 0.0))
                issues.push_back("distance matrix: distance must be positive for pair " +
                                 fmt_pair(a, b));
        }
    }
}

void check_config(const ScenarioConfig& c, std::span<const Region> regions,
                  std::vector<std::string>& issues) {
    if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon))
        issues.push_back("epsilon must be positive");
    if (!(c.k >= 0.0) || !std::isfinite(c.k)) issues.push_back("k must be >= 0");
    if (!(c.mobility_cap >= 0.0 && c.mobility_cap <= 1.0))
        issues.push_back("mobility_cap must lie in [0, 1]");
    if (c.steps < 0) issues.push_back("steps must be >= 0");
    if (!(c.gravity.G >= 0.0) || !std::isfinite(c.gravity.G))
        issues.push_back("gravity.G must be >= 0");
    for (auto [value, what] : {std::pair{c.gravity.alpha, "gravity.alpha"},
                               std::pair{c.gravity.beta, "gravity.beta"},
                               std::pair{c.gravity.gamma, "gravity.gamma"}})
        if (!std::isfinite(value)) issues.push_back(std::string(what) + " must be finite");
    if (!(c.gravity.theta >= 0.0) || !std::isfinite(c.gravity.theta))
        issues.push_back("gravity.theta must be >= 0");
    if (!(c.gravity.eta >= 0.0) || !std::isfinite(c.gravity.eta))
        issues.push_back("gravity.eta must be >= 0");
    if (!(c.distance_c0 >= 0.0) || !std::isfinite(c.distance_c0))
        issues.push_back("distance.c0 must be >= 0");
    if (!(c.distance_c1 >= 0.0) || !std::isfinite(c.distance_c1))
        issues.push_back("distance.c1 must be >= 0");
    if (c.charge_threshold && !std::isfinite(*c.charge_threshold))
        issues.push_back("charge_threshold must be finite");

    const bool gravity_model =
        c.model == ModelKind::Gravity || c.model == ModelKind::NpvGatedGravity;
    if (gravity_model && c.distance_c0 == 0.0 && c.distance_c1 == 0.0)
        issues.push_back(
            "gravity model needs a positive economic distance: set distance.c0 or distance.c1");

    // Charges are derived for every model (the time series records them),
    // so the weighted-mean rule must be feasible regardless of the model.
    if (!c.charge_threshold && !regions.empty()) {
        double population = 0.0;
        for (const auto& r : regions) population += r.profile.population;
        if (!(population > 0.0))
            issues.push_back(
                "weighted-mean charge threshold needs at least one region with positive "
                "population");
    }

    const bool gated = c.model == ModelKind::NpvGatedCoulomb ||
                       c.model == ModelKind::NpvGatedGravity;
    if (gated && !c.npv)
        issues.push_back("model '" + std::string(to_string(c.model)) +
                         "' needs npv.table in the config");
}

} // namespace

ValidationReport validate_scenario(const ScenarioConfig& config,
                                   std::span<const Region> regions,
                                   const DistanceMatrix& distances) {
    ValidationReport report;
    check_regions(regions, report.issues);
    check_distances(regions, distances, report.issues);
    check_config(config, regions, report.issues);
    return report;
}

ValidationReport validate_scenario(const Scenario& scenario) {
    ValidationReport report =
        validate_scenario(scenario.config, scenario.regions, scenario.distances);
    for (const auto& [id, charge] : scenario.charge_overrides)
        if (!std::isfinite(charge))
            report.issues.push_back("charge override for '" + id + "' is not finite");
    return report;
}

DistanceMatrix align_distances(const DistanceMatrix& distances,
                               const std::vector<std::string>& ids) {
    const auto n = static_cast<Eigen::Index>(ids.size());
    DistanceMatrix aligned;
    aligned.ids = ids;
    aligned.km.resize(n, n);
    std::vector<Eigen::Index> perm(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto at = distances.index_of(ids[i]);
        if (at < 0)
            throw InvalidInput("align_distances: no distances for region '" + ids[i] + "'");
        perm[i] = at;
    }
    if (distances.size() != n)
        throw InvalidInput("align_distances: distance matrix covers a different region set");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            aligned.km(i, j) = distances.km(perm[static_cast<std::size_t>(i)],
                                            perm[static_cast<std::size_t>(j)]);
    return aligned;
}

FlowMatrix model_flow_matrix(const ChargeAssignment& charges,
                             std::span<const Region> current_regions,
                             const Scenario& scenario) {
    const auto& config = scenario.config;
    FlowMatrix flows;
    const bool coulomb = config.model == ModelKind::Coulomb ||
                         config.model == ModelKind::NpvGatedCoulomb;
    if (coulomb) {
        flows = coulomb_flow_matrix(charges, scenario.distances.km, config);
    } else {
        const Eigen::MatrixXd economic = economic_distance_matrix(
            scenario.distances.km, config.distance_c0, config.distance_c1);
        flows = gravity_flow_matrix(current_regions, economic, config.gravity);
    }

    const bool gated = config.model == ModelKind::NpvGatedCoulomb ||
                       config.model == ModelKind::NpvGatedGravity;
    if (gated) {
        if (!scenario.npv)
            throw InvalidInput("model_flow_matrix: npv-gated model without a loaded NPV table");
        flows = apply_npv_gate(flows, *scenario.npv);
    }
    return flows;
}

FlowComputation compute_flows(std::span<const Region> current_regions,
                              const Scenario& scenario) {
    FlowComputation result;
    result.charges =
        assign_charges(current_regions, scenario.config, scenario.charge_overrides);
    result.flows = model_flow_matrix(result.charges, current_regions, scenario);
    return result;
}

} // namespace mig
