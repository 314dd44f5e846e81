#pragma once

#include "gal/agent.hpp"
#include "gal/consolidation.hpp"
#include "support/gen.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace galtest {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(GAL_SOURCE_DIR); }
inline fs::path synthetic_dir() { return source_dir() / "data" / "synthetic"; }

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        Rng rng(static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(this)) ^ ++counter ^
                static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()));
        do {
            path_ = fs::temp_directory_path() / ("galtest_" + std::to_string(rng.integer(0, 1 << 30)));
        } while (fs::exists(path_));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Copy of the bundled config with absolute data paths and corpus/output
/// redirected under `dir`. Extra lines are appended to the matching section.
inline fs::path synthetic_config(const fs::path& dir, const std::string& params_extra = "") {
    const fs::path d = synthetic_dir();
    std::ostringstream c;
    c << "[data]\n"
      << "hotspots_dir = " << (d / "hotspots").string() << "\n"
      << "stations = " << (d / "stations.geojson").string() << "\n"
      << "counties = " << (d / "counties.geojson").string() << "\n"
      << "landcover = " << (d / "landcover.asc").string() << "\n"
      << "population = " << (d / "population.asc").string() << "\n"
      << "weather_dir = " << (d / "weather").string() << "\n"
      << "ground_truth = " << (d / "ground_truth.csv").string() << "\n"
      << "corpus_dir = " << (dir / "corpus").string() << "\n"
      << "\n[fires]\neval = EVAL_X, EVAL_Y\ntraining = TRAIN_A, TRAIN_B, TRAIN_C\n"
      << "\n[params]\n" << params_extra
      << "\n[client]\nkind = mock\n"
      << "\n[output]\nout_dir = " << (dir / "runs").string() << "\n";
    const fs::path p = dir / "config.ini";
    write_file(p, c.str());
    return p;
}

inline gal::ClusterFeatures cluster(int id, std::size_t points, double frp, double area = 100.0) {
    gal::ClusterFeatures c;
    c.cluster_id = id;
    c.point_count = points;
    c.sum_frp = frp;
    c.max_brightness = 340.0;
    c.centroid = {37.0, -122.0};
    c.area_acres = area;
    c.perimeter_m = 4000.0;
    c.weather.bi = 50.0;
    c.weather.tmax = 305.0;
    c.weather.tmin = 290.0;
    c.weather.wind = 3.0;
    c.weather.fm1 = 8.0;
    gal::TerrainProfile t;
    t.composition = {{42, 0.5}, {71, 0.5}};
    t.shannon_diversity = 0.6931;
    t.fragmentation = 0.25;
    t.risk_high = 0.5;
    t.risk_medium = 0.5;
    t.continuous_fuels = 1.0;
    t.spread_potential = 0.8;
    t.covered_cells = 8;
    c.terrain = t;
    c.exposure.population = 120.0;
    c.exposure.density = 3.0;
    c.exposure.counties = {"06001"};
    c.exposure.county_names = {"Alpha"};
    c.access.nearest = {{"ST1", 1500.0}, {"ST2", 2500.0}, {"ST3", 4000.0}};
    c.access.density_10km = 3;
    c.access.within_ids = {"ST1", "ST2", "ST3"};
    return c;
}

inline gal::EventDayContext context(const std::string& fire, gal::Date date, std::vector<gal::ClusterFeatures> cs) {
    gal::EventDayContext ctx;
    ctx.fire_id = fire;
    ctx.snapshot = gal::global_snapshot(date, cs);
    ctx.clusters = std::move(cs);
    return ctx;
}

inline gal::Recommendation recommendation(long long personnel, long long budget, int confidence = 3) {
    gal::Recommendation r;
    r.personnel = personnel;
    r.daily_budget_usd = budget;
    r.confidence = confidence;
    r.indicators.fill(gal::Level::moderate);
    r.reasoning = {"a", "b", "c", "d"};
    return r;
}

/// A schema-conformant output document with values inside `bounds`.
inline nlohmann::json conformant_doc(Rng& rng, const gal::AnalogBounds& bounds) {
    gal::Recommendation r;
    const double plo = bounds.personnel ? bounds.personnel->lo : 0.0;
    const double phi = bounds.personnel ? bounds.personnel->hi : 5000.0;
    const double clo = bounds.cost_musd ? bounds.cost_musd->lo : 0.0;
    const double chi = bounds.cost_musd ? bounds.cost_musd->hi : 20.0;
    r.personnel = static_cast<long long>(std::ceil(rng.uniform(plo, phi)));
    if (static_cast<double>(r.personnel) > phi) r.personnel = static_cast<long long>(std::floor(phi));
    r.daily_budget_usd = static_cast<long long>(std::ceil(rng.uniform(clo, chi) * 1e6));
    if (static_cast<double>(r.daily_budget_usd) / 1e6 > chi)
        r.daily_budget_usd = static_cast<long long>(std::floor(chi * 1e6));
    r.confidence = rng.integer(1, 5);
    for (auto& l : r.indicators) l = static_cast<gal::Level>(rng.integer(0, 4));
    for (std::size_t i = 0; i < r.reasoning.size(); ++i)
        r.reasoning[i] = "reason " + std::to_string(rng.integer(0, 999));
    return gal::to_json(r);
}

} // namespace galtest
