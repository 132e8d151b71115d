// Shared fixtures for the test binaries: deterministic random scenarios and
// throwaway directories.
#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mig/core.hpp"
#include "mig/scenario.hpp"

namespace testutil {

using Rng = std::mt19937_64;

inline std::vector<mig::Region> random_regions(int n, Rng& rng) {
    std::uniform_real_distribution<double> pop(1e4, 1e6);
    std::uniform_real_distribution<double> gdp(1e2, 1e5);
    std::uniform_real_distribution<double> wage(1.0, 9.0);
    std::uniform_real_distribution<double> unemp(0.0, 0.25);
    std::uniform_real_distribution<double> lat(-60.0, 60.0);
    std::uniform_real_distribution<double> lon(-170.0, 170.0);

    std::vector<mig::Region> regions;
    regions.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        mig::Region r;
        r.id = "r" + std::to_string(i);
        r.name = "Region " + std::to_string(i);
        r.position = mig::LatLon{lat(rng), lon(rng)};
        r.profile.population = pop(rng);
        r.profile.gdp = gdp(rng);
        r.profile.wage_rate = wage(rng);
        r.profile.unemployment_rate = unemp(rng);
        regions.push_back(std::move(r));
    }
    return regions;
}

inline mig::DistanceMatrix random_distances(const std::vector<mig::Region>& regions,
                                            Rng& rng) {
    std::uniform_real_distribution<double> km(50.0, 2500.0);
    mig::DistanceMatrix d;
    for (const auto& r : regions) d.ids.push_back(r.id);
    const auto n = d.size();
    d.km = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = km(rng);
            d.km(i, j) = v;
            d.km(j, i) = v;
        }
    return d;
}

// Scratch directory under the current working directory (the build tree
// when run through ctest); removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static int counter = 0;
        path_ = std::filesystem::absolute("tmp_" + label + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::filesystem::path path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

inline double rel_err(double actual, double expected) {
    if (expected == 0.0) return std::abs(actual);
    return std::abs(actual - expected) / std::abs(expected);
}

} // namespace testutil
