// calibration.hpp -- fits model constants to observed flow matrices and
// exposes the distance-cost identification.
#pragma once

#include <span>

#include "mig/core.hpp"
#include "mig/coulomb.hpp"

namespace mig {

// The dimensionless factor k / (2*pi*eps*R^2) identifying the distance
// cost with the electrostatic decay.
template <typename Scalar>
Scalar distance_cost_factor(Scalar k, Scalar epsilon, Scalar r_km) {
    if (!std::isfinite(k) || !std::isfinite(epsilon) || !std::isfinite(r_km))
        throw InvalidInput("distance_cost_factor: non-finite input");
    if (r_km <= Scalar(0)) throw InvalidInput("distance_cost_factor: R must be positive");
    if (epsilon <= Scalar(0))
        throw InvalidInput("distance_cost_factor: epsilon must be positive");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return k / (Scalar(2) * pi * epsilon * r_km * r_km);
}

struct PairResidual {
    std::string origin;
    std::string dest;
    double observed = 0.0;
    double predicted = 0.0;
    double residual = 0.0; // observed - predicted
};

struct CalibrationResult {
    // Coulomb fit: combined coupling lambda = k / (2*pi*eps), >= 0.
    std::optional<double> lambda;
    // Back-solved k = 2*pi*eps*lambda when epsilon was supplied.
    std::optional<double> k_for_epsilon;
    // Gravity fit.
    std::optional<GravityParams> gravity;

    // Coulomb: sum of squared flow residuals over all off-diagonal pairs.
    // Gravity: sum of squared log residuals over the fitted pairs.
    double rss = 0.0;
    std::vector<PairResidual> residuals; // all ordered pairs, row-major
    Eigen::Index pairs_used = 0;
    Eigen::Index pairs_degenerate = 0; // excluded pairs (wrong sign, zero flow, ...)
    bool clamped = false;              // lambda was clamped to zero
};

// Least-squares coupling for the total-charge flow form. Over ordered
// pairs with q_i < 0 < q_j the model predicts M_ij = lambda * x_ij with
// x_ij = |q_i|*|Q_j|/R^2, so lambda* = sum(x*m)/sum(x^2), clamped at zero.
// All three inputs must share the same id order.
CalibrationResult fit_coulomb_coupling(const FlowMatrix& observed,
                                       const ChargeAssignment& charges,
                                       const DistanceMatrix& distances,
                                       std::optional<double> epsilon = std::nullopt);

// Log-linear least squares on
//   ln M_ij = ln G + alpha ln P_i + beta ln P_j - gamma ln D_ij
//           + theta (W_j - W_i) - eta (U_j - U_i)
// via the normal equations. Pairs with zero observed flow are excluded and
// counted. `economic_dist` must be aligned with the region order.
CalibrationResult fit_gravity_params(const FlowMatrix& observed,
                                     std::span<const Region> regions,
                                     const Eigen::MatrixXd& economic_dist);

} // namespace mig
