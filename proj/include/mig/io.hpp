// io.hpp -- CSV and config ingestion, great-circle distances, and the
// writers for every on-disk format.
#pragma once

#include <iosfwd>
#include <unordered_map>

#include "mig/classical.hpp"
#include "mig/core.hpp"
#include "mig/dynamics.hpp"

namespace mig {

// Region table CSV. Header is exactly
//   id,name,lat,lon,population,gdp,wage_rate,unemployment_rate[,charge]
// with `.` decimals and UTF-8 text. Empty lat/lon fields make a
// positionless region; a non-empty charge field pins that region's charge.
struct RegionTable {
    std::vector<Region> regions;
    std::unordered_map<std::string, double> charge_overrides;
    bool has_charge_column = false;
};

RegionTable load_regions(const std::string& path);
void write_regions(const RegionTable& table, std::ostream& out);
void write_regions(const RegionTable& table, const std::string& path);

// Great-circle distance in km on a sphere of radius 6371.0 km.
double haversine_distance(double lat1, double lon1, double lat2, double lon2);

// Distance matrix from region coordinates; every region needs a position.
DistanceMatrix distances_from_positions(std::span<const Region> regions);

// Square CSV with a region-id header row and a leading id column.
DistanceMatrix load_distance_matrix(const std::string& path);
void write_distance_matrix(const DistanceMatrix& m, std::ostream& out);
void write_distance_matrix(const DistanceMatrix& m, const std::string& path);

// Flow matrix CSV: header `origin,<dest ids...>`, one row per origin.
FlowMatrix load_flow_matrix(const std::string& path);
void write_flow_matrix(const FlowMatrix& m, std::ostream& out);
void write_flow_matrix(const FlowMatrix& m, const std::string& path);

// Long-form time series CSV: step,region_id,population,charge,net_inflow.
TimeSeries load_timeseries(const std::string& path);
void write_timeseries(const TimeSeries& series, std::ostream& out);
void write_timeseries(const TimeSeries& series, const std::string& path);

// Scenario config: a JSON document with the exact key set
//   model, k, epsilon, symmetry, flow_form, gravity.{G,alpha,beta,gamma,
//   theta,eta}, charge_source, charge_threshold, mobility_cap, steps,
//   distance.{c0,c1}, npv.{table,benefits_column,costs_column}.
// Unknown keys are errors. charge_threshold is a number or "weighted-mean".
// npv.table is resolved against the config file's directory.
ScenarioConfig load_scenario_config(const std::string& path);

// NPV gate table from long-form CSV with columns origin, dest and the two
// named value columns. Every ordered pair of `region_ids` must appear
// exactly once; extra columns are ignored.
NpvTable load_npv_table(const std::string& path, const std::string& benefits_column,
                        const std::string& costs_column,
                        const std::vector<std::string>& region_ids);

// Numbers in every format are serialized with up to 12 significant digits.
std::string format_number(double v);

} // namespace mig
