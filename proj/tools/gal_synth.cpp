// Writes the bundled synthetic dataset: static layers over a 0.6 x 0.6 degree
// region, daily weather grids, per-fire hotspot CSVs, ground truth and a
// config. Output depends only on the seed.

#include "gal/date.hpp"
#include "gal/error.hpp"
#include "gal/ingest.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>

namespace fs = std::filesystem;
using gal::Date;

namespace {

constexpr double kSouth = 36.8, kWest = -122.4, kSpan = 0.6;

// std::*_distribution output is implementation-defined; the engine's is not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
    double normal() {
        const double u1 = 1.0 - uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 eng_;
};

struct FireSpec {
    std::string id;
    double lat, lon;
    Date start;
    int days;
    double scale; // intensity multiplier
};

double round_to(double v, double step) { return std::round(v / step) * step; }

std::ofstream open(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) gal::fail(gal::ErrorKind::runtime, "cannot write " + p.string());
    return out;
}

gal::RasterGrid grid(double cell) {
    gal::RasterGrid g;
    g.west = kWest;
    g.south = kSouth;
    g.cell_size = cell;
    g.n_rows = g.n_cols = static_cast<std::size_t>(std::lround(kSpan / cell));
    g.values.assign(g.n_rows * g.n_cols, 0.0);
    return g;
}

void write_landcover(const fs::path& dir, Rng& rng) {
    gal::RasterGrid g = grid(0.005);
    const int classes[] = {42, 42, 52, 52, 71, 41, 81, 21, 43, 82, 22, 11};
    const double ph1 = rng.uniform(0, 6.28), ph2 = rng.uniform(0, 6.28), ph3 = rng.uniform(0, 6.28);
    for (std::size_t r = 0; r < g.n_rows; ++r)
        for (std::size_t c = 0; c < g.n_cols; ++c) {
            const double x = static_cast<double>(c) / 12.0, y = static_cast<double>(r) / 12.0;
            const double v = std::sin(x + ph1) + std::sin(0.7 * y + ph2) + 0.6 * std::sin(1.9 * (x + y) + ph3) +
                             0.35 * rng.normal();
            int idx = static_cast<int>(std::floor((v + 3.0) / 6.0 * 12.0));
            idx = std::clamp(idx, 0, 11);
            g.values[r * g.n_cols + c] = classes[idx];
        }
    auto out = open(dir / "landcover.asc");
    gal::write_raster(out, g);
}

void write_population(const fs::path& dir, Rng& rng) {
    gal::RasterGrid g = grid(0.005);
    struct Town { double lat, lon, peak, radius; };
    std::vector<Town> towns;
    for (int i = 0; i < 6; ++i)
        towns.push_back({rng.uniform(kSouth, kSouth + kSpan), rng.uniform(kWest, kWest + kSpan),
                         rng.uniform(200.0, 1500.0), rng.uniform(0.01, 0.04)});
    for (std::size_t r = 0; r < g.n_rows; ++r)
        for (std::size_t c = 0; c < g.n_cols; ++c) {
            const gal::GeoPoint p = g.cell_center(r, c);
            double v = 2.0;
            for (const Town& t : towns) {
                const double d2 = (p.lat - t.lat) * (p.lat - t.lat) + (p.lon - t.lon) * (p.lon - t.lon);
                v += t.peak * std::exp(-d2 / (2 * t.radius * t.radius));
            }
            g.values[r * g.n_cols + c] = std::round(v);
        }
    auto out = open(dir / "population.asc");
    gal::write_raster(out, g);
}

void write_counties(const fs::path& dir, Rng& rng) {
    nlohmann::json features = nlohmann::json::array();
    const double step = kSpan / 3.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double s = kSouth + i * step, w = kWest + j * step;
            const double n = s + step, e = w + step;
            nlohmann::json ring = {{w, s}, {e, s}, {e, n}, {w, n}, {w, s}};
            features.push_back({{"type", "Feature"},
                                {"geometry", {{"type", "Polygon"}, {"coordinates", {ring}}}},
                                {"properties",
                                 {{"county_id", fmt::format("06{:03d}", 100 + 3 * i + j)},
                                  {"name", fmt::format("County {}{}", static_cast<char>('A' + i), j + 1)},
                                  {"population", std::round(rng.uniform(20000.0, 400000.0))}}}});
        }
    auto out = open(dir / "counties.geojson");
    out << nlohmann::json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) << '\n';
}

void write_stations(const fs::path& dir, Rng& rng) {
    std::vector<gal::FireStation> st;
    for (int i = 0; i < 30; ++i)
        st.push_back({fmt::format("ST{:03d}", i + 1), round_to(rng.uniform(kSouth, kSouth + kSpan), 1e-5),
                      round_to(rng.uniform(kWest, kWest + kSpan), 1e-5), fmt::format("Station {}", i + 1)});
    auto out = open(dir / "stations.geojson");
    gal::write_stations(out, st);
}

void write_weather_day(const fs::path& dir, Date date, Rng& rng) {
    const double t = static_cast<double>(date.days() % 365) / 365.0;
    const double heat = 8.0 * std::sin(2 * std::numbers::pi * (t - 0.3)) + 2.0 * rng.normal();
    const double gust = std::max(0.5, 4.0 + 1.5 * rng.normal());
    gal::RasterGrid bi = grid(0.05), tmax = bi, tmin = bi, wind = bi, fm1 = bi;
    for (std::size_t r = 0; r < bi.n_rows; ++r)
        for (std::size_t c = 0; c < bi.n_cols; ++c) {
            const std::size_t k = r * bi.n_cols + c;
            const double inland = static_cast<double>(c) / static_cast<double>(bi.n_cols);
            const double hi = round_to(296.0 + heat + 8.0 * inland + rng.normal(), 0.1);
            tmax.values[k] = hi;
            tmin.values[k] = round_to(hi - 12.0 - 2.0 * rng.uniform(), 0.1);
            wind.values[k] = round_to(std::max(0.0, gust + 0.8 * rng.normal()), 0.1);
            fm1.values[k] = round_to(std::clamp(12.0 - 0.3 * heat - 5.0 * inland + rng.normal(), 2.0, 30.0), 0.1);
            bi.values[k] = std::round(std::max(0.0, 40.0 + 2.5 * heat + 25.0 * inland + 4.0 * gust + 5 * rng.normal()));
        }
    const fs::path d = dir / "weather" / date.iso();
    const std::pair<const char*, const gal::RasterGrid*> files[] = {
        {"bi", &bi}, {"tmax", &tmax}, {"tmin", &tmin}, {"wind", &wind}, {"fm1", &fm1}};
    for (const auto& [name, g] : files) {
        auto out = open(d / fmt::format("{}.asc", name));
        gal::write_raster(out, *g);
    }
}

// Activity rises to a peak around day 4-6 then decays.
double activity(int day, int days) {
    const double x = (static_cast<double>(day) + 1.0) / static_cast<double>(days);
    return 0.25 + 3.0 * x * std::exp(1.0 - 2.2 * x);
}

void write_fire(const fs::path& dir, const FireSpec& f, Rng& rng, gal::GroundTruth& truth) {
    std::vector<gal::Hotspot> hs;
    double personnel = 0.0;
    for (int day = 0; day < f.days; ++day) {
        const Date date = f.start + day;
        const double a = activity(day, f.days) * f.scale;
        const int n_clusters = 1 + static_cast<int>(a > 1.2) + static_cast<int>(a > 2.2);
        int points_today = 0;
        double frp_today = 0.0;
        for (int k = 0; k < n_clusters; ++k) {
            const double clat = f.lat + 0.03 * k, clon = f.lon + 0.04 * k * (k % 2 ? 1 : -1);
            const double radius_deg = 0.004 + 0.003 * a;
            const int n = std::max(3, static_cast<int>(std::lround(a * rng.uniform(5.0, 10.0))));
            for (int i = 0; i < n; ++i) {
                gal::Hotspot h;
                h.lat = round_to(clat + radius_deg * rng.normal(), 1e-5);
                h.lon = round_to(clon + radius_deg * rng.normal(), 1e-5);
                h.frp = round_to(std::exp(std::log(4.0 + 6.0 * a) + 0.6 * rng.normal()), 0.01);
                h.brightness = round_to(rng.uniform(300.0, 365.0), 0.01);
                h.acq_date = date;
                h.acq_time = rng.uniform() < 0.5 ? 9 * 60 + 30 + rng.integer(0, 40) : 21 * 60 + rng.integer(0, 40);
                h.satellite = rng.uniform() < 0.5 ? "N" : "1";
                hs.push_back(h);
                ++points_today;
                frp_today += h.frp;
            }
        }
        // A stray detection far from the fire becomes DBSCAN noise.
        if (rng.uniform() < 0.5) {
            gal::Hotspot h;
            h.lat = round_to(f.lat - 0.08 + 0.01 * rng.normal(), 1e-5);
            h.lon = round_to(f.lon + 0.09 + 0.01 * rng.normal(), 1e-5);
            h.frp = round_to(rng.uniform(0.5, 3.0), 0.01);
            h.brightness = round_to(rng.uniform(300.0, 320.0), 0.01);
            h.acq_date = date;
            h.acq_time = 10 * 60;
            h.satellite = "N";
            hs.push_back(h);
        }
        const double target = 60.0 + 9.0 * points_today + 0.8 * frp_today;
        personnel = day == 0 ? target : 0.6 * personnel + 0.4 * target;
        const double p = std::round(personnel * (1.0 + 0.05 * rng.normal()));
        const double cost = round_to(p * rng.uniform(0.0035, 0.0048), 0.0001);
        truth[f.id].push_back({f.id, date, p, cost});
    }
    auto out = open(dir / "hotspots" / (f.id + ".csv"));
    gal::write_hotspots(out, hs);
}

void write_config(const fs::path& dir, const std::vector<FireSpec>& eval, const std::vector<FireSpec>& train) {
    auto ids = [](const std::vector<FireSpec>& v) {
        std::string s;
        for (const FireSpec& f : v) s += (s.empty() ? "" : ", ") + f.id;
        return s;
    };
    auto out = open(dir / "config.ini");
    out << "[data]\n"
           "hotspots_dir = hotspots\n"
           "stations = stations.geojson\n"
           "counties = counties.geojson\n"
           "landcover = landcover.asc\n"
           "population = population.asc\n"
           "weather_dir = weather\n"
           "ground_truth = ground_truth.csv\n"
           "corpus_dir = corpus\n"
           "\n[fires]\n"
        << "eval = " << ids(eval) << "\ntraining = " << ids(train) << "\n"
        << "\n[params]\n"
           "eps_m = 3000\n"
           "min_pts = 3\n"
           "top_k_clusters = 5\n"
           "analog_k = 5\n"
           "delta_threshold = 0.1\n"
           "\n[client]\n"
           "kind = mock\n"
           "\n[output]\n"
           "out_dir = runs\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic GAL dataset"};
    std::string out_dir = "data/synthetic";
    std::uint64_t seed = 20210901;
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Random seed");
    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path dir(out_dir);
        Rng rng(seed);
        write_landcover(dir, rng);
        write_population(dir, rng);
        write_counties(dir, rng);
        write_stations(dir, rng);

        const std::vector<FireSpec> train{
            {"TRAIN_A", 37.05, -122.25, Date::parse("2021-07-01"), 10, 1.0},
            {"TRAIN_B", 37.25, -121.95, Date::parse("2021-07-15"), 10, 1.4},
            {"TRAIN_C", 36.95, -121.90, Date::parse("2021-08-05"), 10, 0.7},
        };
        const std::vector<FireSpec> eval{
            {"EVAL_X", 37.15, -122.10, Date::parse("2021-09-01"), 10, 1.2},
            {"EVAL_Y", 36.90, -122.15, Date::parse("2021-09-01"), 10, 0.9},
        };
        std::set<Date> weather_days;
        gal::GroundTruth truth;
        for (const auto* group : {&train, &eval})
            for (const FireSpec& f : *group) {
                write_fire(dir, f, rng, truth);
                for (int d = 0; d < f.days; ++d) weather_days.insert(f.start + d);
            }
        for (Date d : weather_days) write_weather_day(dir, d, rng);
        {
            auto out = open(dir / "ground_truth.csv");
            gal::write_ground_truth(out, truth);
        }
        write_config(dir, eval, train);
        std::cout << "wrote " << dir.string() << '\n';
    } catch (const gal::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_status();
    }
    return 0;
}
