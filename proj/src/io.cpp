#include "mig/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace mig {

namespace {

struct CsvLine {
    int row = 0; // 1-based file line number
    std::vector<std::string> fields;
};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::vector<CsvLine> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open file");
    std::vector<CsvLine> lines;
    std::string raw;
    int row = 0;
    while (std::getline(in, raw)) {
        ++row;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (row == 1 && raw.rfind("\xEF\xBB\xBF", 0) == 0) raw.erase(0, 3);
        if (raw.empty() && in.peek() == std::char_traits<char>::eof()) break;
        lines.push_back(CsvLine{row, split_fields(raw)});
    }
    if (lines.empty()) throw IoError(path + ": empty file");
    return lines;
}

[[noreturn]] void fail_at(const std::string& path, int row, const std::string& what) {
    throw IoError(path + ":" + std::to_string(row) + ": " + what);
}

double parse_number(const std::string& field, const std::string& path, int row,
                    const std::string& column) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        fail_at(path, row, column + ": not a number: '" + field + "'");
    return value;
}

int parse_int(const std::string& field, const std::string& path, int row,
              const std::string& column) {
    int value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        fail_at(path, row, column + ": not an integer: '" + field + "'");
    return value;
}

void require_field_count(const CsvLine& line, std::size_t expected,
                         const std::string& path) {
    if (line.fields.size() != expected)
        fail_at(path, line.row,
                "expected " + std::to_string(expected) + " fields, got " +
                    std::to_string(line.fields.size()));
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    return out;
}

void finish_write(std::ostream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError(path + ": write failed");
}

constexpr const char* kRegionHeader =
    "id,name,lat,lon,population,gdp,wage_rate,unemployment_rate";
constexpr const char* kTimeSeriesHeader = "step,region_id,population,charge,net_inflow";

} // namespace

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

RegionTable load_regions(const std::string& path) {
    const auto lines = read_csv(path);

    const auto header = split_fields(std::string(kRegionHeader));
    const auto& head = lines.front().fields;
    bool with_charge = false;
    if (head.size() == header.size() + 1 && head.back() == "charge") {
        with_charge = true;
    } else if (head != header) {
        fail_at(path, lines.front().row,
                "expected header '" + std::string(kRegionHeader) + "[,charge]'");
    }
    const std::size_t columns = header.size() + (with_charge ? 1 : 0);

    RegionTable table;
    table.has_charge_column = with_charge;
    std::map<std::string, int> first_row_of_id;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        require_field_count(line, columns, path);
        const auto& f = line.fields;

        Region region;
        region.id = f[0];
        region.name = f[1];
        if (region.id.empty()) fail_at(path, line.row, "empty region id");
        if (const auto it = first_row_of_id.find(region.id); it != first_row_of_id.end())
            fail_at(path, line.row,
                    "duplicate region id '" + region.id + "' (first seen at row " +
                        std::to_string(it->second) + ")");
        first_row_of_id.emplace(region.id, line.row);

        const bool lat_empty = f[2].empty();
        const bool lon_empty = f[3].empty();
        if (lat_empty != lon_empty)
            fail_at(path, line.row, "lat and lon must both be set or both be empty");
        if (!lat_empty) {
            LatLon pos;
            pos.lat = parse_number(f[2], path, line.row, "lat");
            pos.lon = parse_number(f[3], path, line.row, "lon");
            if (pos.lat < -90.0 || pos.lat > 90.0)
                fail_at(path, line.row, "lat out of [-90, 90]");
            if (pos.lon < -180.0 || pos.lon > 180.0)
                fail_at(path, line.row, "lon out of [-180, 180]");
            region.position = pos;
        }

        auto& p = region.profile;
        p.population = parse_number(f[4], path, line.row, "population");
        p.gdp = parse_number(f[5], path, line.row, "gdp");
        p.wage_rate = parse_number(f[6], path, line.row, "wage_rate");
        p.unemployment_rate = parse_number(f[7], path, line.row, "unemployment_rate");
        for (auto [value, what] : {std::pair{p.population, "population"},
                                   std::pair{p.gdp, "gdp"},
                                   std::pair{p.wage_rate, "wage_rate"}}) {
            if (!std::isfinite(value) || value < 0.0)
                fail_at(path, line.row, std::string(what) + " must be finite and >= 0");
        }
        if (!std::isfinite(p.unemployment_rate) || p.unemployment_rate < 0.0 ||
            p.unemployment_rate > 1.0)
            fail_at(path, line.row, "unemployment_rate out of [0,1]");

        if (with_charge && !f[8].empty()) {
            const double charge = parse_number(f[8], path, line.row, "charge");
            if (!std::isfinite(charge)) fail_at(path, line.row, "charge must be finite");
            table.charge_overrides.emplace(region.id, charge);
        }
        table.regions.push_back(std::move(region));
    }
    return table;
}

void write_regions(const RegionTable& table, std::ostream& out) {
    out << kRegionHeader;
    if (table.has_charge_column) out << ",charge";
    out << '\n';
    for (const auto& r : table.regions) {
        out << r.id << ',' << r.name << ',';
        if (r.position)
            out << format_number(r.position->lat) << ',' << format_number(r.position->lon);
        else
            out << ',';
        const auto& p = r.profile;
        out << ',' << format_number(p.population) << ',' << format_number(p.gdp) << ','
            << format_number(p.wage_rate) << ',' << format_number(p.unemployment_rate);
        if (table.has_charge_column) {
            out << ',';
            if (const auto it = table.charge_overrides.find(r.id);
                it != table.charge_overrides.end())
                out << format_number(it->second);
        }
        out << '\n';
    }
}

void write_regions(const RegionTable& table, const std::string& path) {
    auto out = open_for_write(path);
    write_regions(table, out);
    finish_write(out, path);
}

double haversine_distance(double lat1, double lon1, double lat2, double lon2) {
    for (auto [lat, lon] : {std::pair{lat1, lon1}, std::pair{lat2, lon2}}) {
        if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0)
            throw InvalidInput("haversine_distance: latitude out of [-90, 90]");
        if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0)
            throw InvalidInput("haversine_distance: longitude out of [-180, 180]");
    }
    constexpr double kEarthRadiusKm = 6371.0;
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

DistanceMatrix distances_from_positions(std::span<const Region> regions) {
    DistanceMatrix d;
    const auto n = static_cast<Eigen::Index>(regions.size());
    d.ids.reserve(regions.size());
    for (const auto& r : regions) {
        if (!r.position)
            throw InvalidInput("region '" + r.id +
                               "' has no coordinates; supply an explicit distance matrix");
        d.ids.push_back(r.id);
    }
    d.km = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& a = *regions[static_cast<std::size_t>(i)].position;
            const auto& b = *regions[static_cast<std::size_t>(j)].position;
            const double km = haversine_distance(a.lat, a.lon, b.lat, b.lon);
            d.km(i, j) = km;
            d.km(j, i) = km;
        }
    return d;
}

namespace {

// Shared reader for the two square matrix formats (distance, flow).
struct SquareCsv {
    std::vector<std::string> ids;
    Eigen::MatrixXd values;
};

SquareCsv load_square_csv(const std::string& path) {
    const auto lines = read_csv(path);
    const auto& head = lines.front().fields;
    if (head.size() < 2)
        fail_at(path, lines.front().row, "matrix header needs at least one region id");

    SquareCsv out;
    out.ids.assign(head.begin() + 1, head.end());
    const auto n = static_cast<Eigen::Index>(out.ids.size());
    std::set<std::string> unique_ids;
    for (const auto& id : out.ids) {
        if (id.empty()) fail_at(path, lines.front().row, "empty id in header");
        if (!unique_ids.insert(id).second)
            fail_at(path, lines.front().row, "duplicate id '" + id + "' in header");
    }

    if (static_cast<Eigen::Index>(lines.size()) - 1 != n)
        throw IoError(path + ": expected " + std::to_string(n) + " data rows, got " +
                      std::to_string(lines.size() - 1));

    out.values.resize(n, n);
    std::set<std::string> seen_rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        require_field_count(line, static_cast<std::size_t>(n) + 1, path);
        const auto& row_id = line.fields[0];
        auto it = std::find(out.ids.begin(), out.ids.end(), row_id);
        if (it == out.ids.end())
            fail_at(path, line.row, "unknown row id '" + row_id + "'");
        if (!seen_rows.insert(row_id).second)
            fail_at(path, line.row, "duplicate row id '" + row_id + "'");
        const auto i = static_cast<Eigen::Index>(it - out.ids.begin());
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& field = line.fields[static_cast<std::size_t>(j) + 1];
            const double v = parse_number(field, path, line.row,
                                          "column '" + out.ids[static_cast<std::size_t>(j)] + "'");
            if (!std::isfinite(v))
                fail_at(path, line.row,
                        "column '" + out.ids[static_cast<std::size_t>(j)] + "': not finite");
            out.values(i, j) = v;
        }
    }
    return out;
}

void write_square_csv(const char* corner, const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& values, std::ostream& out) {
    out << corner;
    for (const auto& id : ids) out << ',' << id;
    out << '\n';
    const auto n = static_cast<Eigen::Index>(ids.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        out << ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) out << ',' << format_number(values(i, j));
        out << '\n';
    }
}

} // namespace

DistanceMatrix load_distance_matrix(const std::string& path) {
    auto square = load_square_csv(path);
    DistanceMatrix d;
    d.ids = std::move(square.ids);
    d.km = std::move(square.values);
    const auto n = d.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d.km(i, i) != 0.0)
            throw IoError(path + ": nonzero diagonal for '" + d.ids[static_cast<std::size_t>(i)] +
                          "': " + format_number(d.km(i, i)));
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (d.km(i, j) != d.km(j, i))
                throw IoError(path + ": asymmetric pair (" + d.ids[static_cast<std::size_t>(i)] +
                              ", " + d.ids[static_cast<std::size_t>(j)] + "): " +
                              format_number(d.km(i, j)) + " vs " + format_number(d.km(j, i)));
    }
    return d;
}

void write_distance_matrix(const DistanceMatrix& m, std::ostream& out) {
    write_square_csv("id", m.ids, m.km, out);
}

void write_distance_matrix(const DistanceMatrix& m, const std::string& path) {
    auto out = open_for_write(path);
    write_distance_matrix(m, out);
    finish_write(out, path);
}

FlowMatrix load_flow_matrix(const std::string& path) {
    auto square = load_square_csv(path);
    FlowMatrix m;
    m.ids = std::move(square.ids);
    m.people = std::move(square.values);
    const auto n = m.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (m.people(i, i) != 0.0)
            throw IoError(path + ": nonzero diagonal for '" +
                          m.ids[static_cast<std::size_t>(i)] + "'");
        for (Eigen::Index j = 0; j < n; ++j)
            if (m.people(i, j) < 0.0)
                throw IoError(path + ": negative flow for pair (" +
                              m.ids[static_cast<std::size_t>(i)] + ", " +
                              m.ids[static_cast<std::size_t>(j)] + ")");
    }
    return m;
}

void write_flow_matrix(const FlowMatrix& m, std::ostream& out) {
    write_square_csv("origin", m.ids, m.people, out);
}

void write_flow_matrix(const FlowMatrix& m, const std::string& path) {
    auto out = open_for_write(path);
    write_flow_matrix(m, out);
    finish_write(out, path);
}

TimeSeries load_timeseries(const std::string& path) {
    const auto lines = read_csv(path);
    if (lines.front().fields != split_fields(kTimeSeriesHeader))
        fail_at(path, lines.front().row,
                "expected header '" + std::string(kTimeSeriesHeader) + "'");

    TimeSeries series;
    std::map<int, std::set<std::string>> ids_per_step;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        require_field_count(line, 5, path);
        TimeSeriesRecord rec;
        rec.step = parse_int(line.fields[0], path, line.row, "step");
        rec.region_id = line.fields[1];
        rec.population = parse_number(line.fields[2], path, line.row, "population");
        rec.charge = parse_number(line.fields[3], path, line.row, "charge");
        rec.net_inflow = parse_number(line.fields[4], path, line.row, "net_inflow");
        if (rec.step < 0) fail_at(path, line.row, "step must be >= 0");
        if (rec.region_id.empty()) fail_at(path, line.row, "empty region_id");
        if (!ids_per_step[rec.step].insert(rec.region_id).second)
            fail_at(path, line.row,
                    "duplicate record for region '" + rec.region_id + "' at step " +
                        std::to_string(rec.step));
        series.records.push_back(std::move(rec));
    }

    int expected = 0;
    for (const auto& [step, ids] : ids_per_step) {
        if (step != expected)
            throw IoError(path + ": step indices not contiguous from 0 (missing step " +
                          std::to_string(expected) + ")");
        if (ids != ids_per_step.at(0))
            throw IoError(path + ": step " + std::to_string(step) +
                          " covers a different region set than step 0");
        ++expected;
    }
    return series;
}

void write_timeseries(const TimeSeries& series, std::ostream& out) {
    out << kTimeSeriesHeader << '\n';
    for (const auto& rec : series.records)
        out << rec.step << ',' << rec.region_id << ',' << format_number(rec.population)
            << ',' << format_number(rec.charge) << ',' << format_number(rec.net_inflow)
            << '\n';
}

void write_timeseries(const TimeSeries& series, const std::string& path) {
    auto out = open_for_write(path);
    write_timeseries(series, out);
    finish_write(out, path);
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& path, const std::string& key,
                          const std::string& what) {
    throw IoError(path + ": config key '" + key + "': " + what);
}

double number_at(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_number()) bad_key(path, key, "expected a number");
    return j.get<double>();
}

std::string string_at(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_string()) bad_key(path, key, "expected a string");
    return j.get<std::string>();
}

} // namespace

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
    if (!doc.is_object()) throw IoError(path + ": config must be a JSON object");

    ScenarioConfig config;
    for (const auto& [key, value] : doc.items()) {
        if (key == "model") {
            const auto name = string_at(value, path, key);
            if (name == "coulomb") config.model = ModelKind::Coulomb;
            else if (name == "gravity") config.model = ModelKind::Gravity;
            else if (name == "npv-gated-coulomb") config.model = ModelKind::NpvGatedCoulomb;
            else if (name == "npv-gated-gravity") config.model = ModelKind::NpvGatedGravity;
            else
                bad_key(path, key,
                        "expected one of coulomb, gravity, npv-gated-coulomb, "
                        "npv-gated-gravity");
        } else if (key == "k") {
            config.k = number_at(value, path, key);
        } else if (key == "epsilon") {
            config.epsilon = number_at(value, path, key);
        } else if (key == "symmetry") {
            const auto name = string_at(value, path, key);
            if (name == "spherical") config.symmetry = Symmetry::Spherical;
            else if (name == "circular") config.symmetry = Symmetry::Circular;
            else bad_key(path, key, "expected spherical or circular");
        } else if (key == "flow_form") {
            const auto name = string_at(value, path, key);
            if (name == "eq8") config.flow_form = FlowForm::Eq8;
            else if (name == "eq9") config.flow_form = FlowForm::Eq9;
            else bad_key(path, key, "expected eq8 or eq9");
        } else if (key == "gravity") {
            if (!value.is_object()) bad_key(path, key, "expected an object");
            for (const auto& [gkey, gvalue] : value.items()) {
                const std::string full = "gravity." + gkey;
                if (gkey == "G") config.gravity.G = number_at(gvalue, path, full);
                else if (gkey == "alpha") config.gravity.alpha = number_at(gvalue, path, full);
                else if (gkey == "beta") config.gravity.beta = number_at(gvalue, path, full);
                else if (gkey == "gamma") config.gravity.gamma = number_at(gvalue, path, full);
                else if (gkey == "theta") config.gravity.theta = number_at(gvalue, path, full);
                else if (gkey == "eta") config.gravity.eta = number_at(gvalue, path, full);
                else throw IoError(path + ": unknown config key '" + full + "'");
            }
        } else if (key == "charge_source") {
            const auto name = string_at(value, path, key);
            if (name == "gdp") config.charge_source = ChargeSource::Gdp;
            else if (name == "population") config.charge_source = ChargeSource::Population;
            else bad_key(path, key, "expected gdp or population");
        } else if (key == "charge_threshold") {
            if (value.is_string()) {
                if (value.get<std::string>() != "weighted-mean")
                    bad_key(path, key, "expected a number or \"weighted-mean\"");
                config.charge_threshold.reset();
            } else if (value.is_number()) {
                config.charge_threshold = value.get<double>();
            } else {
                bad_key(path, key, "expected a number or \"weighted-mean\"");
            }
        } else if (key == "mobility_cap") {
            config.mobility_cap = number_at(value, path, key);
        } else if (key == "steps") {
            if (!value.is_number_integer()) bad_key(path, key, "expected an integer");
            config.steps = value.get<int>();
        } else if (key == "distance") {
            if (!value.is_object()) bad_key(path, key, "expected an object");
            for (const auto& [dkey, dvalue] : value.items()) {
                const std::string full = "distance." + dkey;
                if (dkey == "c0") config.distance_c0 = number_at(dvalue, path, full);
                else if (dkey == "c1") config.distance_c1 = number_at(dvalue, path, full);
                else throw IoError(path + ": unknown config key '" + full + "'");
            }
        } else if (key == "npv") {
            if (!value.is_object()) bad_key(path, key, "expected an object");
            NpvTableConfig npv;
            for (const auto& [nkey, nvalue] : value.items()) {
                const std::string full = "npv." + nkey;
                if (nkey == "table") npv.table = string_at(nvalue, path, full);
                else if (nkey == "benefits_column")
                    npv.benefits_column = string_at(nvalue, path, full);
                else if (nkey == "costs_column")
                    npv.costs_column = string_at(nvalue, path, full);
                else throw IoError(path + ": unknown config key '" + full + "'");
            }
            if (npv.table.empty()) bad_key(path, "npv.table", "must not be empty");
            std::filesystem::path table_path(npv.table);
            if (table_path.is_relative())
                table_path = std::filesystem::path(path).parent_path() / table_path;
            npv.table = table_path.string();
            config.npv = std::move(npv);
        } else {
            throw IoError(path + ": unknown config key '" + key + "'");
        }
    }
    return config;
}

NpvTable load_npv_table(const std::string& path, const std::string& benefits_column,
                        const std::string& costs_column,
                        const std::vector<std::string>& region_ids) {
    const auto lines = read_csv(path);
    const auto& head = lines.front().fields;

    auto column_index = [&](const std::string& name) -> std::size_t {
        std::size_t found = head.size();
        for (std::size_t c = 0; c < head.size(); ++c) {
            if (head[c] != name) continue;
            if (found != head.size())
                fail_at(path, lines.front().row, "duplicate column '" + name + "'");
            found = c;
        }
        if (found == head.size())
            fail_at(path, lines.front().row, "missing column '" + name + "'");
        return found;
    };
    const auto origin_col = column_index("origin");
    const auto dest_col = column_index("dest");
    const auto benefits_col = column_index(benefits_column);
    const auto costs_col = column_index(costs_column);

    const auto n = static_cast<Eigen::Index>(region_ids.size());
    NpvTable table;
    table.ids = region_ids;
    table.benefits = Eigen::MatrixXd::Zero(n, n);
    table.costs = Eigen::MatrixXd::Zero(n, n);

    auto index_of = [&](const std::string& id) -> Eigen::Index {
        for (Eigen::Index i = 0; i < n; ++i)
            if (region_ids[static_cast<std::size_t>(i)] == id) return i;
        return -1;
    };

    std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        require_field_count(line, head.size(), path);
        const auto& origin = line.fields[origin_col];
        const auto& dest = line.fields[dest_col];
        const auto i = index_of(origin);
        const auto j = index_of(dest);
        if (i < 0) fail_at(path, line.row, "unknown origin '" + origin + "'");
        if (j < 0) fail_at(path, line.row, "unknown dest '" + dest + "'");
        if (i == j) fail_at(path, line.row, "origin and dest must differ");
        if (!seen.insert({i, j}).second)
            fail_at(path, line.row, "duplicate pair (" + origin + ", " + dest + ")");
        const double benefits =
            parse_number(line.fields[benefits_col], path, line.row, benefits_column);
        const double costs = parse_number(line.fields[costs_col], path, line.row, costs_column);
        if (!std::isfinite(benefits)) fail_at(path, line.row, benefits_column + ": not finite");
        if (!std::isfinite(costs) || costs < 0.0)
            fail_at(path, line.row, costs_column + ": must be finite and >= 0");
        table.benefits(i, j) = benefits;
        table.costs(i, j) = costs;
    }

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || seen.count({i, j})) continue;
            throw IoError(path + ": missing NPV entry for pair (" +
                          region_ids[static_cast<std::size_t>(i)] + ", " +
                          region_ids[static_cast<std::size_t>(j)] + ")");
        }
    return table;
}

} // namespace mig
