// core.hpp -- domain types shared by every migration model, plus the
// economic-distance kernel.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mig {

// Thrown when a numeric argument violates an operation's preconditions
// (non-finite value, non-positive distance, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown on file problems: unreadable paths, malformed CSV rows, unknown
// config keys. Messages carry row numbers where applicable.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown by the calibration routines when the data cannot identify the
// parameters (no usable pairs, collinear design columns).
class DegenerateFit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LatLon {
    double lat = 0.0; // degrees, [-90, 90]
    double lon = 0.0; // degrees, [-180, 180]
};

// Per-region economic indicators. Population in persons, money values in
// abstract money units; the models are unit-covariant and calibration
// absorbs unit choices into the fitted constants.
struct EconomicProfile {
    double population = 0.0;        // P_i, persons
    double gdp = 0.0;               // economic power, money units
    double wage_rate = 0.0;         // W_i, money per period
    double unemployment_rate = 0.0; // U_i, fraction in [0, 1]
};

struct Region {
    std::string id;   // unique short identifier
    std::string name; // display name
    std::optional<LatLon> position; // absent for abstract scenarios
    EconomicProfile profile;
};

// Square table of physical distances in km, indexed by region id.
// Invariants: symmetric, zero diagonal, positive off-diagonal.
struct DistanceMatrix {
    std::vector<std::string> ids;
    Eigen::MatrixXd km;

    Eigen::Index size() const { return static_cast<Eigen::Index>(ids.size()); }
    // Index of `id` in this matrix, or -1 when absent.
    Eigen::Index index_of(std::string_view id) const {
        for (Eigen::Index i = 0; i < size(); ++i)
            if (ids[static_cast<std::size_t>(i)] == id) return i;
        return -1;
    }
};

// Origin x destination matrix of migrant mass per simulation step.
// Invariants: non-negative entries, zero diagonal.
struct FlowMatrix {
    std::vector<std::string> ids;
    Eigen::MatrixXd people;

    Eigen::Index size() const { return static_cast<Eigen::Index>(ids.size()); }
    Eigen::Index index_of(std::string_view id) const {
        for (Eigen::Index i = 0; i < size(); ++i)
            if (ids[static_cast<std::size_t>(i)] == id) return i;
        return -1;
    }
    double total() const { return people.size() > 0 ? people.sum() : 0.0; }

    static FlowMatrix zero(std::vector<std::string> ids_) {
        FlowMatrix m;
        const auto n = static_cast<Eigen::Index>(ids_.size());
        m.ids = std::move(ids_);
        m.people = Eigen::MatrixXd::Zero(n, n);
        return m;
    }
};

enum class ModelKind { Coulomb, Gravity, NpvGatedCoulomb, NpvGatedGravity };
enum class Symmetry { Spherical, Circular };
enum class FlowForm { Eq8, Eq9 };
enum class ChargeSource { Gdp, Population };

std::string_view to_string(ModelKind m);
std::string_view to_string(Symmetry s);
std::string_view to_string(FlowForm f);
std::string_view to_string(ChargeSource c);

// Parameters of the empirical gravity model
//   M_ij = G * P_i^alpha * P_j^beta * D_ij^(-gamma)
//        * exp(theta*(W_j - W_i) - eta*(U_j - U_i))
template <typename Scalar>
struct GravityParamsT {
    Scalar G = Scalar(1);     // scale, >= 0
    Scalar alpha = Scalar(1); // origin population exponent
    Scalar beta = Scalar(1);  // destination population exponent
    Scalar gamma = Scalar(2); // distance decay exponent
    Scalar theta = Scalar(0); // wage-difference sensitivity, >= 0
    Scalar eta = Scalar(0);   // unemployment-difference sensitivity, >= 0
};
using GravityParams = GravityParamsT<double>;

// Configuration of the per-pair NPV gate table (long-form CSV).
struct NpvTableConfig {
    std::string table; // path, resolved against the config file location
    std::string benefits_column = "benefits";
    std::string costs_column = "costs";
};

struct ScenarioConfig {
    ModelKind model = ModelKind::Coulomb;
    double k = 1.0;       // flow proportionality coefficient, >= 0
    double epsilon = 1.0; // permissiveness between regions, > 0
    Symmetry symmetry = Symmetry::Circular;
    FlowForm flow_form = FlowForm::Eq9;
    GravityParams gravity;
    ChargeSource charge_source = ChargeSource::Gdp;
    // Absent threshold selects the population-weighted mean of the indicator.
    std::optional<double> charge_threshold;
    double mobility_cap = 0.05; // mu, fraction of a region leaving per step
    int steps = 10;             // simulation steps, >= 0
    double distance_c0 = 0.0;   // fixed cost of a move, money
    double distance_c1 = 1.0;   // cost per km, money
    std::optional<NpvTableConfig> npv;
};

// Economic distance D_ij: monetized cost of moving, affine in the physical
// distance. Zero distance still costs the fixed part c0.
template <typename Scalar>
Scalar economic_distance(Scalar physical_km, Scalar c0, Scalar c1) {
    if (!std::isfinite(physical_km) || !std::isfinite(c0) || !std::isfinite(c1))
        throw InvalidInput("economic_distance: non-finite input");
    if (physical_km < Scalar(0))
        throw InvalidInput("economic_distance: physical distance must be >= 0");
    if (c0 < Scalar(0) || c1 < Scalar(0))
        throw InvalidInput("economic_distance: cost coefficients must be >= 0");
    return c0 + c1 * physical_km;
}

} // namespace mig
