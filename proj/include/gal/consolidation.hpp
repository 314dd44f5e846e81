#pragma once

// Feature consolidation: per-cluster features, the event-day global snapshot,
// and temporal anchors (rolling windows plus qualitative deltas).

#include "gal/date.hpp"
#include "gal/enrichment.hpp"
#include "gal/footprint.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gal {

struct ClusterFeatures {
    int cluster_id = 0;
    std::size_t point_count = 0;
    double sum_frp = 0.0;        // MW
    double max_brightness = 0.0; // K
    GeoPoint centroid;
    double area_acres = 0.0;
    double perimeter_m = 0.0;
    FusedWeather weather;
    std::optional<TerrainProfile> terrain;
    ExposureProfile exposure;
    StationCoverage access;
};

struct GlobalSnapshot {
    Date date;
    std::size_t total_points = 0;
    double total_frp = 0.0;
    double total_area_acres = 0.0;
    double total_perimeter_m = 0.0;
    double max_frp = 0.0; // largest per-cluster FRP, MW
    double max_brightness = 0.0;
    double median_frp_per_cluster = 0.0;
    double p95_frp_per_cluster = 0.0;
    std::size_t n_clusters = 0;
    std::vector<std::string> counties;      // sorted ids
    std::vector<std::string> county_names;  // parallel to counties
    std::optional<double> total_population; // absent when no cluster had coverage
    std::size_t station_count = 0;          // distinct stations within the density radius
    std::optional<double> nearest_station_mi;
    FusedWeather weather;                   // FRP-weighted over clusters
    std::optional<double> mean_spread_potential;
};

enum class Trend { up, flat, down };

std::string_view symbol(Trend t);     // ↑ ≈ ↓
std::string_view trend_word(Trend t); // increasing / stable / decreasing

struct WindowStats {
    double avg3 = 0.0;
    double max3 = 0.0;
    double avg7 = 0.0;
    double max7 = 0.0;
};

/// One prior day as seen by the anchor computation. Resource values are the
/// previously emitted recommendation (or ground truth in diagnostic runs).
struct DayRecord {
    GlobalSnapshot snapshot;
    std::optional<double> personnel;
    std::optional<double> cost_musd;
};

struct TemporalAnchors {
    WindowStats points;
    WindowStats frp;
    WindowStats area;
    std::optional<WindowStats> cost;      // million USD; needs >= 1 prior resource value
    std::optional<WindowStats> personnel;
    double pct_of_hist_max_points = 0.0;
    double pct_of_hist_max_area = 0.0;
    double global_max_points = 0.0;
    double global_max_area = 0.0;
    int days_since_global_max_points = 0;
    int days_since_global_max_area = 0;
    std::map<std::string, Trend> trends;
    GlobalSnapshot yesterday;
    int days_since_start = 0;
};

struct EventDayContext {
    std::string fire_id;
    GlobalSnapshot snapshot;
    std::vector<ClusterFeatures> clusters;
    std::optional<TemporalAnchors> anchors; // absent on the first analysed day
};

ClusterFeatures consolidate_cluster(const Cluster& cluster, const FusedWeather& weather,
                                    const std::optional<TerrainProfile>& terrain,
                                    const ExposureProfile& exposure, const StationCoverage& access);

/// Order used for reductions and rendering: descending sum_frp, then
/// ascending cluster_id.
bool consequence_before(const ClusterFeatures& a, const ClusterFeatures& b);

/// Median (midpoint for even counts) and nearest-rank p95 of per-cluster FRP.
GlobalSnapshot global_snapshot(Date date, const std::vector<ClusterFeatures>& clusters);

inline constexpr double kDefaultDeltaThreshold = 0.10;

/// ↑ if cur > prev(1+t); ↓ if cur < prev(1-t); ≈ otherwise.
Trend qualitative_delta(double prev, double cur, double rel_threshold = kDefaultDeltaThreshold);

/// Fire-activity windows include today; resource windows cover prior days only.
TemporalAnchors temporal_anchors(std::span<const DayRecord> history, const GlobalSnapshot& today,
                                 double rel_threshold = kDefaultDeltaThreshold);

/// Nearest-rank percentile over an ascending-sorted sample: element
/// ceil(percent * n / 100), 1-based. Integer arithmetic keeps the index exact.
double nearest_rank(const std::vector<double>& sorted, int percent);
double median_sorted(const std::vector<double>& sorted);

} // namespace gal
