#include <doctest.h>

#include "helpers.hpp"
#include "mig/io.hpp"

#include <numbers>
#include <sstream>

using namespace mig;
using testutil::rel_err;
using testutil::TempDir;
using testutil::write_text;

namespace {
constexpr const char* kHeader =
    "id,name,lat,lon,population,gdp,wage_rate,unemployment_rate\n";
}

TEST_CASE("load_regions parses a well-formed table") {
    TempDir tmp("regions_ok");
    write_text(tmp.file("regions.csv"),
               std::string(kHeader) +
                   "a,Alpha,45.5,10.25,1000,50,2.5,0.1\n"
                   "b,Beta,,,2000,75,3,0.05\n");
    const auto table = load_regions(tmp.file("regions.csv"));
    REQUIRE(table.regions.size() == 2);
    CHECK(table.regions[0].id == "a");
    CHECK(table.regions[0].position.has_value());
    CHECK(table.regions[0].position->lat == 45.5);
    CHECK_FALSE(table.regions[1].position.has_value());
    CHECK(table.regions[1].profile.gdp == 75.0);
    CHECK_FALSE(table.has_charge_column);
}

TEST_CASE("load_regions reads charge overrides") {
    TempDir tmp("regions_charge");
    write_text(tmp.file("regions.csv"),
               std::string(kHeader).substr(0, std::string(kHeader).size() - 1) +
                   ",charge\n"
                   "a,Alpha,,,1000,50,2.5,0.1,-12.5\n"
                   "b,Beta,,,2000,75,3,0.05,\n");
    const auto table = load_regions(tmp.file("regions.csv"));
    CHECK(table.has_charge_column);
    REQUIRE(table.charge_overrides.count("a") == 1);
    CHECK(table.charge_overrides.at("a") == -12.5);
    CHECK(table.charge_overrides.count("b") == 0);
}

TEST_CASE("load_regions names duplicate ids with both row numbers") {
    TempDir tmp("regions_dup");
    write_text(tmp.file("regions.csv"), std::string(kHeader) +
                                            "a,Alpha,,,1,1,1,0\n"
                                            "a,Again,,,2,2,2,0\n");
    try {
        load_regions(tmp.file("regions.csv"));
        FAIL("expected IoError");
    } catch (const IoError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("'a'") != std::string::npos);
        CHECK(msg.find(":3:") != std::string::npos); // failing row
        CHECK(msg.find("row 2") != std::string::npos);
    }
}

TEST_CASE("load_regions rejects out-of-range and malformed fields by row") {
    TempDir tmp("regions_bad");
    write_text(tmp.file("u.csv"), std::string(kHeader) + "a,Alpha,,,1,1,1,1.5\n");
    CHECK_THROWS_WITH_AS(load_regions(tmp.file("u.csv")),
                         doctest::Contains("out of [0,1]"), IoError);

    write_text(tmp.file("n.csv"), std::string(kHeader) + "a,Alpha,,,xyz,1,1,0\n");
    CHECK_THROWS_WITH_AS(load_regions(tmp.file("n.csv")),
                         doctest::Contains("not a number"), IoError);

    write_text(tmp.file("h.csv"), "id,name\n");
    CHECK_THROWS_WITH_AS(load_regions(tmp.file("h.csv")),
                         doctest::Contains("expected header"), IoError);

    CHECK_THROWS_AS(load_regions(tmp.file("missing.csv")), IoError);
}

TEST_CASE("haversine_distance matches hand-computed arcs") {
    CHECK(haversine_distance(12.0, 34.0, 12.0, 34.0) == 0.0);
    const double half_circle = std::numbers::pi * 6371.0;
    CHECK(rel_err(haversine_distance(0.0, 0.0, 0.0, 180.0), half_circle) < 1e-12);
    CHECK(rel_err(haversine_distance(0.0, 0.0, 0.0, 90.0), half_circle / 2.0) < 1e-12);
    CHECK_THROWS_AS(haversine_distance(91.0, 0.0, 0.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(haversine_distance(0.0, 181.0, 0.0, 0.0), InvalidInput);
}

TEST_CASE("haversine_distance is symmetric and satisfies the triangle inequality") {
    testutil::Rng rng(401);
    std::uniform_real_distribution<double> lat(-90.0, 90.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a_lat = lat(rng), a_lon = lon(rng);
        const double b_lat = lat(rng), b_lon = lon(rng);
        const double c_lat = lat(rng), c_lon = lon(rng);
        const double ab = haversine_distance(a_lat, a_lon, b_lat, b_lon);
        const double ba = haversine_distance(b_lat, b_lon, a_lat, a_lon);
        CHECK(std::abs(ab - ba) < 1e-9);
        const double bc = haversine_distance(b_lat, b_lon, c_lat, c_lon);
        const double ac = haversine_distance(a_lat, a_lon, c_lat, c_lon);
        CHECK(ac <= ab + bc + 1e-9);
    }
}

TEST_CASE("distances_from_positions builds a symmetric matrix") {
    std::vector<Region> regions{
        Region{"a", "A", LatLon{0.0, 0.0}, {1, 1, 1, 0}},
        Region{"b", "B", LatLon{0.0, 90.0}, {1, 1, 1, 0}},
        Region{"c", "C", LatLon{45.0, 45.0}, {1, 1, 1, 0}}};
    const auto d = distances_from_positions(regions);
    CHECK(d.km(0, 0) == 0.0);
    CHECK(d.km(0, 1) == d.km(1, 0));
    CHECK(rel_err(d.km(0, 1), std::numbers::pi * 6371.0 / 2.0) < 1e-12);

    regions[1].position.reset();
    CHECK_THROWS_WITH_AS(distances_from_positions(regions), doctest::Contains("'b'"),
                         InvalidInput);
}

TEST_CASE("load_distance_matrix validates symmetry and diagonal") {
    TempDir tmp("dist");
    write_text(tmp.file("ok.csv"),
               "id,a,b,c\n"
               "a,0,5,7\n"
               "b,5,0,3\n"
               "c,7,3,0\n");
    const auto d = load_distance_matrix(tmp.file("ok.csv"));
    CHECK(d.ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(d.km(0, 2) == 7.0);

    write_text(tmp.file("asym.csv"),
               "id,a,b\n"
               "a,0,5\n"
               "b,6,0\n");
    try {
        load_distance_matrix(tmp.file("asym.csv"));
        FAIL("expected IoError");
    } catch (const IoError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("asymmetric") != std::string::npos);
        CHECK(msg.find("(a, b)") != std::string::npos);
        CHECK(msg.find('5') != std::string::npos);
        CHECK(msg.find('6') != std::string::npos);
    }

    write_text(tmp.file("diag.csv"),
               "id,a,b\n"
               "a,0.1,5\n"
               "b,5,0\n");
    CHECK_THROWS_WITH_AS(load_distance_matrix(tmp.file("diag.csv")),
                         doctest::Contains("diagonal"), IoError);
}

TEST_CASE("flow matrix round trip is identity within 1e-9") {
    testutil::Rng rng(409);
    std::uniform_real_distribution<double> mass(0.0, 1e6);
    TempDir tmp("flow_rt");
    FlowMatrix m = FlowMatrix::zero({"w", "x", "y", "z"});
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            if (i != j) m.people(i, j) = mass(rng);

    write_flow_matrix(m, tmp.file("flows.csv"));
    const auto back = load_flow_matrix(tmp.file("flows.csv"));
    REQUIRE(back.ids == m.ids);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            CHECK(rel_err(back.people(i, j), m.people(i, j)) < 1e-9);
}

TEST_CASE("flow matrix writer emits an all-zero body for the zero matrix") {
    std::ostringstream out;
    write_flow_matrix(FlowMatrix::zero({"a", "b"}), out);
    CHECK(out.str() == "origin,a,b\na,0,0\nb,0,0\n");
}

TEST_CASE("load_flow_matrix rejects negative entries and nonzero diagonal") {
    TempDir tmp("flow_bad");
    write_text(tmp.file("neg.csv"),
               "origin,a,b\n"
               "a,0,-1\n"
               "b,2,0\n");
    CHECK_THROWS_WITH_AS(load_flow_matrix(tmp.file("neg.csv")),
                         doctest::Contains("negative"), IoError);
    write_text(tmp.file("diag.csv"),
               "origin,a,b\n"
               "a,1,1\n"
               "b,2,0\n");
    CHECK_THROWS_WITH_AS(load_flow_matrix(tmp.file("diag.csv")),
                         doctest::Contains("diagonal"), IoError);
}

TEST_CASE("distance matrix round trip is identity within 1e-9") {
    testutil::Rng rng(419);
    TempDir tmp("dist_rt");
    const auto regions = testutil::random_regions(5, rng);
    const auto d = testutil::random_distances(regions, rng);
    write_distance_matrix(d, tmp.file("d.csv"));
    const auto back = load_distance_matrix(tmp.file("d.csv"));
    REQUIRE(back.ids == d.ids);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 5; ++j)
            CHECK(rel_err(back.km(i, j), d.km(i, j)) < 1e-9);
}

TEST_CASE("region table round trip preserves values, positions and charges") {
    testutil::Rng rng(421);
    TempDir tmp("region_rt");
    RegionTable table;
    table.regions = testutil::random_regions(6, rng);
    table.regions[2].position.reset();
    table.has_charge_column = true;
    table.charge_overrides = {{"r1", -4.25}, {"r4", 19.0}};

    write_regions(table, tmp.file("r.csv"));
    const auto back = load_regions(tmp.file("r.csv"));
    REQUIRE(back.regions.size() == table.regions.size());
    CHECK(back.has_charge_column);
    CHECK(back.charge_overrides == table.charge_overrides);
    for (std::size_t i = 0; i < table.regions.size(); ++i) {
        const auto& a = table.regions[i];
        const auto& b = back.regions[i];
        CHECK(a.id == b.id);
        CHECK(a.name == b.name);
        CHECK(a.position.has_value() == b.position.has_value());
        if (a.position) {
            CHECK(rel_err(b.position->lat, a.position->lat) < 1e-9);
            CHECK(rel_err(b.position->lon, a.position->lon) < 1e-9);
        }
        CHECK(rel_err(b.profile.population, a.profile.population) < 1e-9);
        CHECK(rel_err(b.profile.gdp, a.profile.gdp) < 1e-9);
        CHECK(rel_err(b.profile.wage_rate, a.profile.wage_rate) < 1e-9);
        CHECK(rel_err(b.profile.unemployment_rate, a.profile.unemployment_rate) < 1e-9);
    }
}

TEST_CASE("time series round trip and validation") {
    TempDir tmp("ts_rt");
    TimeSeries series;
    for (int step = 0; step <= 2; ++step)
        for (const auto* id : {"a", "b"}) {
            TimeSeriesRecord rec;
            rec.step = step;
            rec.region_id = id;
            rec.population = 100.0 + step * 3.25;
            rec.charge = step % 2 == 0 ? -1.5 : 2.5;
            rec.net_inflow = step == 0 ? 0.0 : 0.125;
            series.records.push_back(rec);
        }
    write_timeseries(series, tmp.file("ts.csv"));
    const auto back = load_timeseries(tmp.file("ts.csv"));
    REQUIRE(back.records.size() == series.records.size());
    for (std::size_t i = 0; i < series.records.size(); ++i) {
        CHECK(back.records[i].step == series.records[i].step);
        CHECK(back.records[i].region_id == series.records[i].region_id);
        CHECK(rel_err(back.records[i].population, series.records[i].population) < 1e-9);
        CHECK(rel_err(back.records[i].charge, series.records[i].charge) < 1e-9);
        CHECK(rel_err(back.records[i].net_inflow, series.records[i].net_inflow) < 1e-9);
    }

    write_text(tmp.file("gap.csv"),
               "step,region_id,population,charge,net_inflow\n"
               "0,a,1,0,0\n"
               "2,a,1,0,0\n");
    CHECK_THROWS_WITH_AS(load_timeseries(tmp.file("gap.csv")),
                         doctest::Contains("contiguous"), IoError);
}

TEST_CASE("load_scenario_config parses the full key set") {
    TempDir tmp("cfg");
    write_text(tmp.file("npv.csv"), "origin,dest,benefits,costs\n");
    write_text(tmp.file("config.json"), R"({
        "model": "npv-gated-gravity",
        "k": 2.5,
        "epsilon": 0.5,
        "symmetry": "spherical",
        "flow_form": "eq8",
        "gravity": {"G": 3.0, "alpha": 0.9, "beta": 1.1, "gamma": 1.8,
                     "theta": 0.02, "eta": 0.4},
        "charge_source": "population",
        "charge_threshold": 1234.5,
        "mobility_cap": 0.2,
        "steps": 42,
        "distance": {"c0": 7.0, "c1": 0.25},
        "npv": {"table": "npv.csv", "benefits_column": "b", "costs_column": "c"}
    })");
    const auto config = load_scenario_config(tmp.file("config.json"));
    CHECK(config.model == ModelKind::NpvGatedGravity);
    CHECK(config.k == 2.5);
    CHECK(config.epsilon == 0.5);
    CHECK(config.symmetry == Symmetry::Spherical);
    CHECK(config.flow_form == FlowForm::Eq8);
    CHECK(config.gravity.G == 3.0);
    CHECK(config.gravity.eta == 0.4);
    CHECK(config.charge_source == ChargeSource::Population);
    REQUIRE(config.charge_threshold.has_value());
    CHECK(*config.charge_threshold == 1234.5);
    CHECK(config.mobility_cap == 0.2);
    CHECK(config.steps == 42);
    CHECK(config.distance_c0 == 7.0);
    CHECK(config.distance_c1 == 0.25);
    REQUIRE(config.npv.has_value());
    CHECK(config.npv->benefits_column == "b");
    // relative table paths resolve against the config directory
    CHECK(config.npv->table == tmp.file("npv.csv"));
}

TEST_CASE("load_scenario_config rejects unknown keys and bad values") {
    TempDir tmp("cfg_bad");
    write_text(tmp.file("unknown.json"), R"({"gravity": {"zeta": 1.0}})");
    CHECK_THROWS_WITH_AS(load_scenario_config(tmp.file("unknown.json")),
                         doctest::Contains("gravity.zeta"), IoError);

    write_text(tmp.file("typo.json"), R"({"mobillity_cap": 0.1})");
    CHECK_THROWS_WITH_AS(load_scenario_config(tmp.file("typo.json")),
                         doctest::Contains("mobillity_cap"), IoError);

    write_text(tmp.file("model.json"), R"({"model": "newtonian"})");
    CHECK_THROWS_AS(load_scenario_config(tmp.file("model.json")), IoError);

    write_text(tmp.file("steps.json"), R"({"steps": 2.5})");
    CHECK_THROWS_WITH_AS(load_scenario_config(tmp.file("steps.json")),
                         doctest::Contains("integer"), IoError);

    write_text(tmp.file("thr.json"), R"({"charge_threshold": "median"})");
    CHECK_THROWS_AS(load_scenario_config(tmp.file("thr.json")), IoError);

    // "weighted-mean" keeps the threshold rule unset
    write_text(tmp.file("wm.json"), R"({"charge_threshold": "weighted-mean"})");
    CHECK_FALSE(load_scenario_config(tmp.file("wm.json")).charge_threshold.has_value());
}

TEST_CASE("load_npv_table demands full pair coverage") {
    TempDir tmp("npv");
    write_text(tmp.file("full.csv"),
               "origin,dest,benefits,costs\n"
               "a,b,10,4\n"
               "b,a,1,4\n");
    const auto table = load_npv_table(tmp.file("full.csv"), "benefits", "costs", {"a", "b"});
    CHECK(table.benefits(0, 1) == 10.0);
    CHECK(table.costs(1, 0) == 4.0);

    write_text(tmp.file("partial.csv"),
               "origin,dest,benefits,costs\n"
               "a,b,10,4\n");
    CHECK_THROWS_WITH_AS(
        load_npv_table(tmp.file("partial.csv"), "benefits", "costs", {"a", "b"}),
        doctest::Contains("missing NPV entry"), IoError);

    write_text(tmp.file("dup.csv"),
               "origin,dest,benefits,costs\n"
               "a,b,10,4\n"
               "a,b,11,4\n"
               "b,a,1,4\n");
    CHECK_THROWS_WITH_AS(
        load_npv_table(tmp.file("dup.csv"), "benefits", "costs", {"a", "b"}),
        doctest::Contains("duplicate pair"), IoError);

    write_text(tmp.file("neg.csv"),
               "origin,dest,benefits,costs\n"
               "a,b,10,-4\n"
               "b,a,1,4\n");
    CHECK_THROWS_AS(load_npv_table(tmp.file("neg.csv"), "benefits", "costs", {"a", "b"}),
                    IoError);
}

TEST_CASE("format_number keeps 12 significant digits and a clean zero") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1234.5) == "1234.5");
    CHECK(format_number(0.1).size() <= 18);
}
