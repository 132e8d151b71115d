// classical.hpp -- the two baseline models: human-capital NPV and the
// empirical gravity model.
#pragma once

#include <span>

#include "mig/core.hpp"

namespace mig {

// Net present value of moving: benefits minus costs.
template <typename Scalar>
Scalar npv(Scalar benefits, Scalar costs) {
    if (!std::isfinite(benefits) || !std::isfinite(costs))
        throw InvalidInput("npv: non-finite input");
    return benefits - costs;
}

// Binary gate: a flow passes only under strictly positive NPV.
template <typename Scalar>
Scalar npv_gate(Scalar npv_value, Scalar flow) {
    if (!std::isfinite(npv_value) || !std::isfinite(flow))
        throw InvalidInput("npv_gate: non-finite input");
    if (flow < Scalar(0)) throw InvalidInput("npv_gate: flow must be >= 0");
    return npv_value > Scalar(0) ? flow : Scalar(0);
}

// Gravity flow
//   M_ij = G * P_i^alpha * P_j^beta * D_ij^(-gamma)
//        * exp(theta*(W_j - W_i) - eta*(U_j - U_i))
template <typename Scalar>
Scalar gravity_flow(Scalar P_i, Scalar P_j, Scalar D_ij, Scalar U_i, Scalar U_j,
                    Scalar W_i, Scalar W_j, const GravityParamsT<Scalar>& params) {
    for (Scalar v : {P_i, P_j, D_ij, U_i, U_j, W_i, W_j, params.G, params.alpha,
                     params.beta, params.gamma, params.theta, params.eta})
        if (!std::isfinite(v)) throw InvalidInput("gravity_flow: non-finite input");
    if (P_i < Scalar(0) || P_j < Scalar(0))
        throw InvalidInput("gravity_flow: populations must be >= 0");
    if (D_ij <= Scalar(0))
        throw InvalidInput("gravity_flow: economic distance must be positive");
    if (P_i == Scalar(0) && params.alpha < Scalar(0))
        throw InvalidInput("gravity_flow: P_i = 0 with negative alpha");
    if (P_j == Scalar(0) && params.beta < Scalar(0))
        throw InvalidInput("gravity_flow: P_j = 0 with negative beta");
    using std::exp;
    using std::pow;
    const Scalar value = params.G * pow(P_i, params.alpha) * pow(P_j, params.beta) *
                         pow(D_ij, -params.gamma) *
                         exp(params.theta * (W_j - W_i) - params.eta * (U_j - U_i));
    if (!std::isfinite(value)) throw InvalidInput("gravity_flow: result overflow");
    return value;
}

// Elementwise economic distances for a physical distance matrix. The
// diagonal carries the fixed cost c0; flow assemblies never read it.
Eigen::MatrixXd economic_distance_matrix(const Eigen::MatrixXd& physical_km,
                                         double c0, double c1);

// Pairwise gravity flows over a region set. `economic_dist` must be aligned
// with the region order; the diagonal stays zero.
FlowMatrix gravity_flow_matrix(std::span<const Region> regions,
                               const Eigen::MatrixXd& economic_dist,
                               const GravityParams& params);

// Per-pair NPV gate inputs, aligned to a region id order. Both matrices are
// dense over all ordered pairs; the diagonal is unused.
struct NpvTable {
    std::vector<std::string> ids;
    Eigen::MatrixXd benefits;
    Eigen::MatrixXd costs;
};

// Zeroes every flow whose pair NPV (benefits - costs) is not strictly
// positive. Table and flows must share the id order.
FlowMatrix apply_npv_gate(const FlowMatrix& flows, const NpvTable& table);

} // namespace mig
