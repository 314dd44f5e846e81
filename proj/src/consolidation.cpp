#include "gal/consolidation.hpp"

#include "gal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace gal {

std::string_view symbol(Trend t) {
    switch (t) {
    case Trend::up: return "↑";
    case Trend::flat: return "≈";
    case Trend::down: return "↓";
    }
    return "?";
}

std::string_view trend_word(Trend t) {
    switch (t) {
    case Trend::up: return "increasing";
    case Trend::flat: return "stable";
    case Trend::down: return "decreasing";
    }
    return "?";
}

ClusterFeatures consolidate_cluster(const Cluster& cluster, const FusedWeather& weather,
                                    const std::optional<TerrainProfile>& terrain,
                                    const ExposureProfile& exposure, const StationCoverage& access) {
    require(!cluster.members.empty(), "consolidate_cluster: cluster has no members");
    ClusterFeatures f;
    f.cluster_id = cluster.cluster_id;
    f.point_count = cluster.members.size();
    f.max_brightness = cluster.members.front().brightness;
    for (const Hotspot& h : cluster.members) {
        f.sum_frp += h.frp;
        f.max_brightness = std::max(f.max_brightness, h.brightness);
    }
    f.centroid = cluster.centroid;
    f.area_acres = cluster.area_acres;
    f.perimeter_m = geodesic_perimeter_m(cluster.footprint);
    f.weather = weather;
    f.terrain = terrain;
    f.exposure = exposure;
    f.access = access;
    return f;
}

bool consequence_before(const ClusterFeatures& a, const ClusterFeatures& b) {
    if (a.sum_frp != b.sum_frp) return a.sum_frp > b.sum_frp;
    return a.cluster_id < b.cluster_id;
}

double nearest_rank(const std::vector<double>& sorted, int percent) {
    if (sorted.empty()) return 0.0;
    const std::size_t n = sorted.size();
    std::size_t rank = (static_cast<std::size_t>(percent) * n + 99) / 100;
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

double median_sorted(const std::vector<double>& sorted) {
    if (sorted.empty()) return 0.0;
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

namespace {

// FRP-weighted mean of one weather field across clusters; uniform weights
// when every cluster carrying the field has zero FRP.
std::optional<double> weighted_field(const std::vector<const ClusterFeatures*>& ordered,
                                     std::optional<double> FusedWeather::*field) {
    double wsum = 0.0, acc = 0.0, plain = 0.0;
    std::size_t n = 0;
    for (const ClusterFeatures* c : ordered) {
        const auto& v = c->weather.*field;
        if (!v) continue;
        wsum += c->sum_frp;
        acc += c->sum_frp * *v;
        plain += *v;
        ++n;
    }
    if (n == 0) return std::nullopt;
    if (wsum > 0.0) return acc / wsum;
    return plain / static_cast<double>(n);
}

} // namespace

GlobalSnapshot global_snapshot(Date date, const std::vector<ClusterFeatures>& clusters) {
    GlobalSnapshot s;
    s.date = date;
    s.n_clusters = clusters.size();
    if (clusters.empty()) return s;

    std::vector<const ClusterFeatures*> ordered;
    for (const auto& c : clusters) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const ClusterFeatures* a, const ClusterFeatures* b) { return consequence_before(*a, *b); });

    std::map<std::string, std::string> counties;
    std::set<std::string> stations;
    std::vector<double> frps;
    double pop = 0.0, spread = 0.0;
    bool any_pop = false;
    std::size_t n_terrain = 0;

    s.max_brightness = ordered.front()->max_brightness;
    for (const ClusterFeatures* c : ordered) {
        s.total_points += c->point_count;
        s.total_frp += c->sum_frp;
        s.total_area_acres += c->area_acres;
        s.total_perimeter_m += c->perimeter_m;
        s.max_frp = std::max(s.max_frp, c->sum_frp);
        s.max_brightness = std::max(s.max_brightness, c->max_brightness);
        frps.push_back(c->sum_frp);

        for (std::size_t i = 0; i < c->exposure.counties.size(); ++i) {
            const std::string& name =
                i < c->exposure.county_names.size() ? c->exposure.county_names[i] : c->exposure.counties[i];
            counties.emplace(c->exposure.counties[i], name);
        }
        if (c->exposure.population) {
            pop += *c->exposure.population;
            any_pop = true;
        }
        stations.insert(c->access.within_ids.begin(), c->access.within_ids.end());
        if (!c->access.nearest.empty()) {
            const double mi = c->access.nearest.front().second / kMetersPerMile;
            s.nearest_station_mi = s.nearest_station_mi ? std::min(*s.nearest_station_mi, mi) : mi;
        }
        if (c->terrain) {
            spread += c->terrain->spread_potential;
            ++n_terrain;
        }
    }

    std::sort(frps.begin(), frps.end());
    s.median_frp_per_cluster = median_sorted(frps);
    s.p95_frp_per_cluster = nearest_rank(frps, 95);

    for (const auto& [id, name] : counties) {
        s.counties.push_back(id);
        s.county_names.push_back(name);
    }
    if (any_pop) s.total_population = pop;
    s.station_count = stations.size();
    if (n_terrain > 0) s.mean_spread_potential = spread / static_cast<double>(n_terrain);

    s.weather.bi = weighted_field(ordered, &FusedWeather::bi);
    s.weather.tmax = weighted_field(ordered, &FusedWeather::tmax);
    s.weather.tmin = weighted_field(ordered, &FusedWeather::tmin);
    s.weather.wind = weighted_field(ordered, &FusedWeather::wind);
    s.weather.fm1 = weighted_field(ordered, &FusedWeather::fm1);
    return s;
}

Trend qualitative_delta(double prev, double cur, double t) {
    require(t > 0.0, "qualitative_delta: threshold must be positive");
    require(std::isfinite(prev) && std::isfinite(cur), "qualitative_delta: non-finite input");
    require(prev >= 0.0 && cur >= 0.0, "qualitative_delta: negative input");
    if (cur > prev * (1.0 + t)) return Trend::up;
    if (cur < prev * (1.0 - t)) return Trend::down;
    return Trend::flat;
}

namespace {

WindowStats window_stats(const std::vector<double>& series) {
    WindowStats w;
    auto fill = [&](std::size_t len, double& avg, double& mx) {
        const std::size_t n = std::min(len, series.size());
        if (n == 0) return;
        double sum = 0.0;
        mx = series[series.size() - n];
        for (std::size_t i = series.size() - n; i < series.size(); ++i) {
            sum += series[i];
            mx = std::max(mx, series[i]);
        }
        avg = sum / static_cast<double>(n);
    };
    fill(3, w.avg3, w.max3);
    fill(7, w.avg7, w.max7);
    return w;
}

// Prior-day resource windows: the last 3 / 7 prior days, averaging only the
// days that carry a value.
std::optional<WindowStats> resource_window(std::span<const DayRecord> history,
                                           std::optional<double> DayRecord::*field) {
    WindowStats w;
    bool any = false;
    auto fill = [&](std::size_t len, double& avg, double& mx) {
        const std::size_t n = std::min(len, history.size());
        double sum = 0.0;
        std::size_t k = 0;
        for (std::size_t i = history.size() - n; i < history.size(); ++i) {
            const auto& v = history[i].*field;
            if (!v) continue;
            sum += *v;
            mx = k == 0 ? *v : std::max(mx, *v);
            ++k;
        }
        if (k > 0) {
            avg = sum / static_cast<double>(k);
            any = true;
        }
    };
    fill(3, w.avg3, w.max3);
    fill(7, w.avg7, w.max7);
    if (!any) return std::nullopt;
    return w;
}

struct PeakInfo {
    double max = 0.0;
    int days_since = 0;
    double pct = 0.0;
};

PeakInfo peak(const std::vector<double>& series, const std::vector<Date>& dates) {
    PeakInfo p;
    std::size_t at = 0;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i] >= p.max) {
            p.max = series[i];
            at = i;
        }
    p.days_since = static_cast<int>(dates.back() - dates[at]);
    p.pct = p.max > 0.0 ? 100.0 * series.back() / p.max : 0.0;
    return p;
}

} // namespace

TemporalAnchors temporal_anchors(std::span<const DayRecord> history, const GlobalSnapshot& today,
                                 double t) {
    require(!history.empty(), "temporal_anchors: empty history; use the Day-1 path");
    for (std::size_t i = 0; i < history.size(); ++i) {
        const Date next = i + 1 < history.size() ? history[i + 1].snapshot.date : today.date;
        require(history[i].snapshot.date < next,
                fmt::format("temporal_anchors: history not strictly ascending at {}",
                            history[i].snapshot.date.iso()));
    }

    std::vector<double> points, frp, area;
    std::vector<Date> dates;
    for (const DayRecord& d : history) {
        points.push_back(static_cast<double>(d.snapshot.total_points));
        frp.push_back(d.snapshot.total_frp);
        area.push_back(d.snapshot.total_area_acres);
        dates.push_back(d.snapshot.date);
    }
    points.push_back(static_cast<double>(today.total_points));
    frp.push_back(today.total_frp);
    area.push_back(today.total_area_acres);
    dates.push_back(today.date);

    TemporalAnchors a;
    a.points = window_stats(points);
    a.frp = window_stats(frp);
    a.area = window_stats(area);
    a.cost = resource_window(history, &DayRecord::cost_musd);
    a.personnel = resource_window(history, &DayRecord::personnel);

    const PeakInfo pp = peak(points, dates);
    const PeakInfo pa = peak(area, dates);
    a.global_max_points = pp.max;
    a.days_since_global_max_points = pp.days_since;
    a.pct_of_hist_max_points = pp.pct;
    a.global_max_area = pa.max;
    a.days_since_global_max_area = pa.days_since;
    a.pct_of_hist_max_area = pa.pct;
    a.days_since_start = static_cast<int>(today.date - history.front().snapshot.date);

    const GlobalSnapshot& y = history.back().snapshot;
    a.yesterday = y;
    auto trend = [&](const char* key, double prev, double cur) {
        a.trends[key] = qualitative_delta(prev, cur, t);
    };
    trend("points", static_cast<double>(y.total_points), static_cast<double>(today.total_points));
    trend("clusters", static_cast<double>(y.n_clusters), static_cast<double>(today.n_clusters));
    trend("frp", y.total_frp, today.total_frp);
    trend("area", y.total_area_acres, today.total_area_acres);
    trend("max_frp", y.max_frp, today.max_frp);
    trend("stations", static_cast<double>(y.station_count), static_cast<double>(today.station_count));
    if (y.total_population && today.total_population)
        trend("population", *y.total_population, *today.total_population);
    auto weather_trend = [&](const char* key, std::optional<double> FusedWeather::*field) {
        const auto& p = y.weather.*field;
        const auto& c = today.weather.*field;
        if (p && c && *p >= 0.0 && *c >= 0.0) trend(key, *p, *c);
    };
    weather_trend("bi", &FusedWeather::bi);
    weather_trend("tmax", &FusedWeather::tmax);
    weather_trend("wind", &FusedWeather::wind);
    weather_trend("fm1", &FusedWeather::fm1);

    auto resource_trend = [&](const char* key, std::optional<double> DayRecord::*field) {
        std::vector<double> vals;
        for (const DayRecord& d : history)
            if (d.*field) vals.push_back(*(d.*field));
        if (vals.size() >= 2) trend(key, vals[vals.size() - 2], vals.back());
    };
    resource_trend("cost", &DayRecord::cost_musd);
    resource_trend("personnel", &DayRecord::personnel);
    return a;
}

} // namespace gal
