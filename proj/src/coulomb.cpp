#include "mig/coulomb.hpp"

#include <sstream>

namespace mig {

double field_at(const AttractorDescription& attractor, double r_km, double epsilon,
                Symmetry symmetry) {
    detail::require_finite(r_km, "field_at");
    if (r_km <= 0.0) throw InvalidInput("field_at: R must be positive");
    if (epsilon <= 0.0 || !std::isfinite(epsilon))
        throw InvalidInput("field_at: epsilon must be positive");

    if (const auto* total = std::get_if<TotalCharge>(&attractor.charge)) {
        detail::require_finite(total->value, "field_at");
        return coupling_constant(symmetry, epsilon) * total->value / (r_km * r_km);
    }
    const auto& density = std::get<ChargeDensity>(attractor.charge);
    detail::require_finite(density.rho, "field_at");
    if (density.radius_km <= 0.0 || !std::isfinite(density.radius_km))
        throw InvalidInput("field_at: density radius must be positive");
    // Distributed-charge form: rho * a^2 / (3 * eps * R^2).
    return density.rho * density.radius_km * density.radius_km /
           (3.0 * epsilon * r_km * r_km);
}

FieldSample superposed_field(std::span<const AttractorDescription> attractors,
                             double epsilon, Symmetry symmetry) {
    FieldSample sample;
    sample.contributions.reserve(attractors.size());
    for (std::size_t i = 0; i < attractors.size(); ++i) {
        const auto& a = attractors[i];
        if (!(a.distance_km > 0.0)) {
            std::ostringstream msg;
            msg << "superposed_field: attractor " << i << " is co-located with the probe";
            throw InvalidInput(msg.str());
        }
        sample.contributions.push_back(field_at(a, a.distance_km, epsilon, symmetry));
    }
    sample.net = 0.0;
    for (double c : sample.contributions) sample.net += c;
    return sample;
}

namespace {
double indicator_of(const EconomicProfile& profile, ChargeSource source) {
    return source == ChargeSource::Gdp ? profile.gdp : profile.population;
}
} // namespace

double weighted_mean_threshold(std::span<const Region> regions, ChargeSource source) {
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (const auto& r : regions) {
        weight_sum += r.profile.population;
        weighted += r.profile.population * indicator_of(r.profile, source);
    }
    if (!(weight_sum > 0.0))
        throw InvalidInput(
            "weighted_mean_threshold: needs at least one region with positive population");
    return weighted / weight_sum;
}

double derive_charge(const EconomicProfile& profile, ChargeSource source,
                     double threshold) {
    detail::require_finite(threshold, "derive_charge");
    const double indicator = indicator_of(profile, source);
    detail::require_finite(indicator, "derive_charge");
    if (indicator > threshold) return indicator;
    if (indicator < threshold) return -indicator + 0.0; // normalizes -0.0
    return 0.0;
}

ChargeAssignment assign_charges(std::span<const Region> regions, const ScenarioConfig& config,
                                const std::unordered_map<std::string, double>& overrides) {
    ChargeAssignment assignment;
    assignment.threshold = config.charge_threshold
                               ? *config.charge_threshold
                               : weighted_mean_threshold(regions, config.charge_source);
    assignment.ids.reserve(regions.size());
    assignment.charge.resize(static_cast<Eigen::Index>(regions.size()));
    for (std::size_t i = 0; i < regions.size(); ++i) {
        assignment.ids.push_back(regions[i].id);
        const auto it = overrides.find(regions[i].id);
        assignment.charge(static_cast<Eigen::Index>(i)) =
            it != overrides.end()
                ? it->second
                : derive_charge(regions[i].profile, config.charge_source,
                                assignment.threshold);
    }
    return assignment;
}

FlowMatrix coulomb_flow_matrix(const ChargeAssignment& charges,
                               const Eigen::MatrixXd& distance_km,
                               const ScenarioConfig& config) {
    const Eigen::Index n = charges.size();
    if (distance_km.rows() != n || distance_km.cols() != n)
        throw InvalidInput("coulomb_flow_matrix: distance matrix size mismatch");

    // The distributed-charge route maps each destination's total charge
    // onto a reference radius of 1 km; both forms then agree exactly.
    constexpr double kReferenceRadiusKm = 1.0;

    FlowMatrix flows = FlowMatrix::zero(charges.ids);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double q_i = charges.charge(i);
        if (!(q_i < 0.0)) continue; // only poor regions emit
        for (Eigen::Index j = 0; j < n; ++j) {
            const double q_j = charges.charge(j);
            if (i == j || !(q_j > 0.0)) continue;
            const double r = distance_km(i, j);
            try {
                if (config.flow_form == FlowForm::Eq8) {
                    const double rho = density_from_total_charge(q_j, kReferenceRadiusKm);
                    flows.people(i, j) = flow_eq8(config.k, q_i, rho, kReferenceRadiusKm,
                                                  config.epsilon, r);
                } else {
                    flows.people(i, j) = flow_eq9(config.k, q_i, q_j, config.epsilon, r);
                }
            } catch (const InvalidInput& e) {
                std::ostringstream msg;
                msg << "pair (" << charges.ids[static_cast<std::size_t>(i)] << ", "
                    << charges.ids[static_cast<std::size_t>(j)] << "): " << e.what();
                throw InvalidInput(msg.str());
            }
        }
    }
    return flows;
}

std::string_view to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Coulomb: return "coulomb";
        case ModelKind::Gravity: return "gravity";
        case ModelKind::NpvGatedCoulomb: return "npv-gated-coulomb";
        case ModelKind::NpvGatedGravity: return "npv-gated-gravity";
    }
    return "?";
}

std::string_view to_string(Symmetry s) {
    return s == Symmetry::Spherical ? "spherical" : "circular";
}

std::string_view to_string(FlowForm f) { return f == FlowForm::Eq8 ? "eq8" : "eq9"; }

std::string_view to_string(ChargeSource c) {
    return c == ChargeSource::Gdp ? "gdp" : "population";
}

} // namespace mig
