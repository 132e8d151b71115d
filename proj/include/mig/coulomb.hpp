// coulomb.hpp -- electrostatic machinery: Coulomb force, fields,
// superposition, signed economic charges and the two migration-flow forms.
#pragma once

#include <numbers>
#include <span>
#include <unordered_map>
#include <variant>

#include "mig/core.hpp"

namespace mig {

// Signed scalar charge per region. Sign encodes poor (negative) versus
// rich (positive) relative to the reference threshold; magnitude is the
// raw indicator value.
struct ChargeAssignment {
    std::vector<std::string> ids;
    Eigen::VectorXd charge; // aligned with ids
    double threshold = 0.0; // reference value used for sign determination

    Eigen::Index size() const { return static_cast<Eigen::Index>(ids.size()); }
};

// Attractor charge given as a lumped total Q_j.
struct TotalCharge {
    double value = 0.0;
};

// Attractor charge given as a density rho_j spread over a region of
// radius a (km), as used by the distributed-charge flow form.
struct ChargeDensity {
    double rho = 0.0;
    double radius_km = 1.0;
};

struct AttractorDescription {
    std::variant<TotalCharge, ChargeDensity> charge;
    double distance_km = 0.0; // distance R from the attractor to the probe
};

// Field felt by a unit probe charge, with the per-attractor breakdown kept
// so flows can be allocated per attractor later.
struct FieldSample {
    double net = 0.0;
    std::vector<double> contributions;
};

namespace detail {
template <typename Scalar>
void require_finite(Scalar v, const char* what) {
    if (!std::isfinite(v)) throw InvalidInput(std::string(what) + ": non-finite input");
}
// Strictly opposite signs; any zero charge never produces flow.
template <typename Scalar>
bool signs_oppose(Scalar a, Scalar b) {
    return (a < Scalar(0) && b > Scalar(0)) || (a > Scalar(0) && b < Scalar(0));
}
} // namespace detail

// Coupling constant K of the Coulomb law: 1/(4*pi*eps) for spherical
// symmetry, 1/(2*pi*eps) for circular symmetry.
template <typename Scalar>
Scalar coupling_constant(Symmetry symmetry, Scalar epsilon) {
    detail::require_finite(epsilon, "coupling_constant");
    if (epsilon <= Scalar(0))
        throw InvalidInput("coupling_constant: epsilon must be positive");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar denom = symmetry == Symmetry::Spherical ? Scalar(4) * pi * epsilon
                                                         : Scalar(2) * pi * epsilon;
    return Scalar(1) / denom;
}

// F = K * q1 * q2 / r^2. Positive = repulsion (like signs), negative =
// attraction (opposite signs).
template <typename Scalar>
Scalar coulomb_force(Scalar q1, Scalar q2, Scalar r_km, Scalar coupling) {
    detail::require_finite(q1, "coulomb_force");
    detail::require_finite(q2, "coulomb_force");
    detail::require_finite(r_km, "coulomb_force");
    detail::require_finite(coupling, "coulomb_force");
    if (r_km <= Scalar(0)) throw InvalidInput("coulomb_force: r must be positive");
    return coupling * (q1 * q2) / (r_km * r_km);
}

// F_a = q * E. Negative (attraction) iff probe sign opposes the field's
// source sign.
template <typename Scalar>
Scalar attraction_force(Scalar probe_charge, Scalar field) {
    detail::require_finite(probe_charge, "attraction_force");
    detail::require_finite(field, "attraction_force");
    return probe_charge * field;
}

// Total charge equivalent to a density description: Q = (2*pi/3) * rho * a^2.
// This is the exact identity under which the two flow forms agree.
template <typename Scalar>
Scalar total_charge_from_density(Scalar rho, Scalar radius_km) {
    detail::require_finite(rho, "total_charge_from_density");
    detail::require_finite(radius_km, "total_charge_from_density");
    if (radius_km <= Scalar(0))
        throw InvalidInput("total_charge_from_density: radius must be positive");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return (Scalar(2) * pi / Scalar(3)) * rho * radius_km * radius_km;
}

template <typename Scalar>
Scalar density_from_total_charge(Scalar total, Scalar radius_km) {
    detail::require_finite(total, "density_from_total_charge");
    detail::require_finite(radius_km, "density_from_total_charge");
    if (radius_km <= Scalar(0))
        throw InvalidInput("density_from_total_charge: radius must be positive");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return Scalar(3) * total / (Scalar(2) * pi * radius_km * radius_km);
}

// Migrant mass per step, distributed-charge form:
//   M = k * |q_i| * |rho_j| * a^2 / (3 * eps * R^2)
// emitted only when the signs oppose; like signs give zero flow.
template <typename Scalar>
Scalar flow_eq8(Scalar k, Scalar origin_charge, Scalar dest_density,
                Scalar dest_radius_km, Scalar epsilon, Scalar r_km) {
    detail::require_finite(k, "flow_eq8");
    detail::require_finite(origin_charge, "flow_eq8");
    detail::require_finite(dest_density, "flow_eq8");
    detail::require_finite(dest_radius_km, "flow_eq8");
    detail::require_finite(epsilon, "flow_eq8");
    detail::require_finite(r_km, "flow_eq8");
    if (r_km <= Scalar(0)) throw InvalidInput("flow_eq8: R must be positive");
    if (dest_radius_km <= Scalar(0)) throw InvalidInput("flow_eq8: radius must be positive");
    if (epsilon <= Scalar(0)) throw InvalidInput("flow_eq8: epsilon must be positive");
    if (k < Scalar(0)) throw InvalidInput("flow_eq8: k must be >= 0");
    if (!detail::signs_oppose(origin_charge, dest_density)) return Scalar(0);
    using std::abs;
    return k * abs(origin_charge) * abs(dest_density) * dest_radius_km * dest_radius_km /
           (Scalar(3) * epsilon * r_km * r_km);
}

// Migrant mass per step, total-charge form:
//   M = k * |q_i| * |Q_j| / (2 * pi * eps * R^2)
// with the same opposite-sign gating as flow_eq8.
template <typename Scalar>
Scalar flow_eq9(Scalar k, Scalar origin_charge, Scalar dest_charge,
                Scalar epsilon, Scalar r_km) {
    detail::require_finite(k, "flow_eq9");
    detail::require_finite(origin_charge, "flow_eq9");
    detail::require_finite(dest_charge, "flow_eq9");
    detail::require_finite(epsilon, "flow_eq9");
    detail::require_finite(r_km, "flow_eq9");
    if (r_km <= Scalar(0)) throw InvalidInput("flow_eq9: R must be positive");
    if (epsilon <= Scalar(0)) throw InvalidInput("flow_eq9: epsilon must be positive");
    if (k < Scalar(0)) throw InvalidInput("flow_eq9: k must be >= 0");
    if (!detail::signs_oppose(origin_charge, dest_charge)) return Scalar(0);
    using std::abs;
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return k * abs(origin_charge) * abs(dest_charge) /
           (Scalar(2) * pi * epsilon * r_km * r_km);
}

// Signed field contribution of one attractor at distance R, per unit probe
// charge. Total-charge form uses K(symmetry, eps); the density form is
// rho * a^2 / (3 * eps * R^2) with its own fixed coupling.
double field_at(const AttractorDescription& attractor, double r_km, double epsilon,
                Symmetry symmetry);

// Algebraic superposition over an attractor set; each attractor contributes
// at its own stored distance.
FieldSample superposed_field(std::span<const AttractorDescription> attractors,
                             double epsilon, Symmetry symmetry);

// Population-weighted mean of the chosen indicator over the scenario
// regions; the default sign threshold.
double weighted_mean_threshold(std::span<const Region> regions, ChargeSource source);

// Signed charge of one region: magnitude is the indicator itself, sign is
// sign(indicator - threshold), exactly zero on the boundary.
double derive_charge(const EconomicProfile& profile, ChargeSource source,
                     double threshold);

// Charges for a whole region set under the configured source and threshold
// rule. Entries in `overrides` pin a region's charge verbatim.
ChargeAssignment assign_charges(std::span<const Region> regions, const ScenarioConfig& config,
                                const std::unordered_map<std::string, double>& overrides = {});

// Pairwise flow matrix: M_ij by the configured flow form for every ordered
// pair with q_i < 0 < q_j, zero elsewhere. `distance_km` must be aligned
// with `charges.ids`.
FlowMatrix coulomb_flow_matrix(const ChargeAssignment& charges,
                               const Eigen::MatrixXd& distance_km,
                               const ScenarioConfig& config);

} // namespace mig
