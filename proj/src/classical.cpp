#include "mig/classical.hpp"

#include <sstream>

namespace mig {

Eigen::MatrixXd economic_distance_matrix(const Eigen::MatrixXd& physical_km,
                                         double c0, double c1) {
    if (!std::isfinite(c0) || !std::isfinite(c1) || c0 < 0.0 || c1 < 0.0)
        throw InvalidInput("economic_distance_matrix: cost coefficients must be >= 0");
    return (c0 + c1 * physical_km.array()).matrix();
}

FlowMatrix gravity_flow_matrix(std::span<const Region> regions,
                               const Eigen::MatrixXd& economic_dist,
                               const GravityParams& params) {
    const auto n = static_cast<Eigen::Index>(regions.size());
    if (economic_dist.rows() != n || economic_dist.cols() != n)
        throw InvalidInput("gravity_flow_matrix: distance matrix size mismatch");

    std::vector<std::string> ids;
    ids.reserve(regions.size());
    for (const auto& r : regions) ids.push_back(r.id);

    FlowMatrix flows = FlowMatrix::zero(std::move(ids));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& from = regions[static_cast<std::size_t>(i)].profile;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& to = regions[static_cast<std::size_t>(j)].profile;
            try {
                flows.people(i, j) = gravity_flow(
                    from.population, to.population, economic_dist(i, j),
                    from.unemployment_rate, to.unemployment_rate, from.wage_rate,
                    to.wage_rate, params);
            } catch (const InvalidInput& e) {
                std::ostringstream msg;
                msg << "pair (" << regions[static_cast<std::size_t>(i)].id << ", "
                    << regions[static_cast<std::size_t>(j)].id << "): " << e.what();
                throw InvalidInput(msg.str());
            }
        }
    }
    return flows;
}

FlowMatrix apply_npv_gate(const FlowMatrix& flows, const NpvTable& table) {
    if (table.ids != flows.ids)
        throw InvalidInput("apply_npv_gate: NPV table ids do not match the flow matrix");
    FlowMatrix gated = flows;
    const Eigen::Index n = flows.size();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double value = npv(table.benefits(i, j), table.costs(i, j));
            gated.people(i, j) = npv_gate(value, flows.people(i, j));
        }
    return gated;
}

} // namespace mig
