#include "mig/calibration.hpp"

#include "mig/classical.hpp"

#include <array>
#include <limits>
#include <sstream>

namespace mig {

CalibrationResult fit_coulomb_coupling(const FlowMatrix& observed,
                                       const ChargeAssignment& charges,
                                       const DistanceMatrix& distances,
                                       std::optional<double> epsilon) {
    if (observed.ids != charges.ids || distances.ids != charges.ids)
        throw InvalidInput("fit_coulomb_coupling: inputs must share one region id order");
    if (epsilon && !(*epsilon > 0.0))
        throw InvalidInput("fit_coulomb_coupling: epsilon must be positive");

    const Eigen::Index n = charges.size();
    CalibrationResult result;

    // lambda* = sum(x*m) / sum(x^2) over poor -> rich pairs.
    double xm = 0.0;
    double xx = 0.0;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double q_i = charges.charge(i);
            const double q_j = charges.charge(j);
            if (!(q_i < 0.0 && q_j > 0.0)) {
                ++result.pairs_degenerate;
                continue;
            }
            const double r = distances.km(i, j);
            if (!(r > 0.0))
                throw InvalidInput("fit_coulomb_coupling: non-positive distance for pair (" +
                                   charges.ids[static_cast<std::size_t>(i)] + ", " +
                                   charges.ids[static_cast<std::size_t>(j)] + ")");
            x(i, j) = std::abs(q_i) * std::abs(q_j) / (r * r);
            xm += x(i, j) * observed.people(i, j);
            xx += x(i, j) * x(i, j);
            ++result.pairs_used;
        }
    }

    if (result.pairs_used == 0)
        throw DegenerateFit(
            "fit_coulomb_coupling: no poor-to-rich (opposite-sign) pairs to fit");
    if (!(xx > 0.0))
        throw DegenerateFit("fit_coulomb_coupling: all predictor terms are zero");

    double lambda = xm / xx;
    if (lambda < 0.0) {
        lambda = 0.0;
        result.clamped = true;
    }
    result.lambda = lambda;
    if (epsilon) result.k_for_epsilon = 2.0 * std::numbers::pi * *epsilon * lambda;

    result.residuals.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            PairResidual pr;
            pr.origin = charges.ids[static_cast<std::size_t>(i)];
            pr.dest = charges.ids[static_cast<std::size_t>(j)];
            pr.observed = observed.people(i, j);
            pr.predicted = lambda * x(i, j);
            pr.residual = pr.observed - pr.predicted;
            result.rss += pr.residual * pr.residual;
            result.residuals.push_back(std::move(pr));
        }
    return result;
}

namespace {

constexpr std::array<const char*, 6> kGravityColumns = {
    "intercept", "ln_P_origin", "ln_P_dest", "ln_D", "wage_diff", "unemp_diff"};

} // namespace

CalibrationResult fit_gravity_params(const FlowMatrix& observed,
                                     std::span<const Region> regions,
                                     const Eigen::MatrixXd& economic_dist) {
    const auto n = static_cast<Eigen::Index>(regions.size());
    if (observed.size() != n || economic_dist.rows() != n || economic_dist.cols() != n)
        throw InvalidInput("fit_gravity_params: input sizes do not match the region set");
    for (Eigen::Index i = 0; i < n; ++i)
        if (observed.ids[static_cast<std::size_t>(i)] != regions[static_cast<std::size_t>(i)].id)
            throw InvalidInput("fit_gravity_params: observed ids must follow the region order");

    CalibrationResult result;

    std::vector<Eigen::Index> rows_i;
    std::vector<Eigen::Index> rows_j;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& from = regions[static_cast<std::size_t>(i)].profile;
            const auto& to = regions[static_cast<std::size_t>(j)].profile;
            const bool usable = observed.people(i, j) > 0.0 && from.population > 0.0 &&
                                to.population > 0.0 && economic_dist(i, j) > 0.0;
            if (usable) {
                rows_i.push_back(i);
                rows_j.push_back(j);
            } else {
                ++result.pairs_degenerate;
            }
        }

    const auto m = static_cast<Eigen::Index>(rows_i.size());
    result.pairs_used = m;
    if (m < 6)
        throw DegenerateFit(
            "fit_gravity_params: needs at least 6 pairs with positive observed flow, got " +
            std::to_string(m));

    Eigen::MatrixXd design(m, 6);
    Eigen::VectorXd response(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index i = rows_i[static_cast<std::size_t>(r)];
        const Eigen::Index j = rows_j[static_cast<std::size_t>(r)];
        const auto& from = regions[static_cast<std::size_t>(i)].profile;
        const auto& to = regions[static_cast<std::size_t>(j)].profile;
        design(r, 0) = 1.0;
        design(r, 1) = std::log(from.population);
        design(r, 2) = std::log(to.population);
        design(r, 3) = std::log(economic_dist(i, j));
        design(r, 4) = to.wage_rate - from.wage_rate;
        design(r, 5) = to.unemployment_rate - from.unemployment_rate;
        response(r) = std::log(observed.people(i, j));
    }

    // Center the non-intercept columns before forming the normal equations;
    // the intercept is recovered afterwards.
    Eigen::RowVectorXd means = design.colwise().mean();
    means(0) = 0.0;
    Eigen::MatrixXd centered = design.rowwise() - means;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(centered);
    if (qr.rank() < 6) {
        const auto perm = qr.colsPermutation().indices();
        std::ostringstream msg;
        msg << "fit_gravity_params: rank-deficient design, collinear columns:";
        for (Eigen::Index c = qr.rank(); c < 6; ++c)
            msg << ' ' << kGravityColumns[static_cast<std::size_t>(perm(c))];
        throw DegenerateFit(msg.str());
    }

    const Eigen::MatrixXd normal = centered.transpose() * centered;
    const Eigen::VectorXd rhs = centered.transpose() * response;
    Eigen::VectorXd coef = normal.ldlt().solve(rhs);
    coef(0) -= means.tail(5).dot(coef.tail(5)); // un-center the intercept

    GravityParams params;
    params.G = std::exp(coef(0));
    params.alpha = coef(1);
    params.beta = coef(2);
    params.gamma = -coef(3);
    params.theta = coef(4);
    params.eta = -coef(5);
    result.gravity = params;

    const Eigen::VectorXd log_residuals = response - design * coef;
    result.rss = log_residuals.squaredNorm();

    result.residuals.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& from = regions[static_cast<std::size_t>(i)];
            const auto& to = regions[static_cast<std::size_t>(j)];
            PairResidual pr;
            pr.origin = from.id;
            pr.dest = to.id;
            pr.observed = observed.people(i, j);
            try {
                pr.predicted = gravity_flow(
                    from.profile.population, to.profile.population, economic_dist(i, j),
                    from.profile.unemployment_rate, to.profile.unemployment_rate,
                    from.profile.wage_rate, to.profile.wage_rate, params);
            } catch (const InvalidInput&) {
                pr.predicted = std::numeric_limits<double>::quiet_NaN();
            }
            pr.residual = pr.observed - pr.predicted;
            result.residuals.push_back(std::move(pr));
        }
    return result;
}

} // namespace mig
