#include "gal/perception.hpp"

#include "gal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace gal {

namespace {

struct Slot {
    std::string_view name;
    int precision;
    NaDefault na;
};

// Every numeric slot the script can emit.
constexpr std::array kSlots{
    Slot{"points", 0, NaDefault::zero},         Slot{"clusters", 0, NaDefault::zero},
    Slot{"frp", 1, NaDefault::zero},            Slot{"area", 1, NaDefault::zero},
    Slot{"max_frp", 1, NaDefault::omit},        Slot{"brightness", 1, NaDefault::omit},
    Slot{"median_frp", 1, NaDefault::omit},     Slot{"p95_frp", 1, NaDefault::omit},
    Slot{"BI", 1, NaDefault::omit},             Slot{"Tmax", 1, NaDefault::omit},
    Slot{"Tmin", 1, NaDefault::omit},           Slot{"Wind", 1, NaDefault::omit},
    Slot{"FM1", 1, NaDefault::omit},            Slot{"pop", 0, NaDefault::zero},
    Slot{"density", 1, NaDefault::zero},        Slot{"stations", 0, NaDefault::zero},
    Slot{"nearest_station", 1, NaDefault::omit}, Slot{"station_1", 1, NaDefault::omit},
    Slot{"station_2", 1, NaDefault::omit},      Slot{"station_3", 1, NaDefault::omit},
    Slot{"spread_potential", 3, NaDefault::omit}, Slot{"diversity", 3, NaDefault::omit},
    Slot{"fragmentation", 4, NaDefault::omit},  Slot{"continuous_fuels", 1, NaDefault::omit},
    Slot{"barriers", 1, NaDefault::omit},       Slot{"percent", 1, NaDefault::omit},
    Slot{"days", 0, NaDefault::omit},
};

const Slot& find_slot(std::string_view name) {
    for (const Slot& s : kSlots)
        if (s.name == name) return s;
    fail(ErrorKind::schema, fmt::format("unknown perception slot '{}'", name));
}

class Renderer {
public:
    explicit Renderer(std::vector<std::string>& na) : na_(na) {}

    std::string operator()(std::string_view scope, std::string_view slot, std::optional<double> v) {
        if (!v) na_.push_back(fmt::format("{}.{}", scope, slot));
        return na_policy(slot, v);
    }

private:
    std::vector<std::string>& na_;
};

std::string delta(double prev, double cur, int precision) {
    const double d = cur - prev;
    const std::string mag = fixed(std::abs(d), precision);
    if (mag == fixed(0.0, precision)) return "(no change)";
    return fmt::format("({} {})", d > 0 ? "up" : "down", mag);
}

std::string delta_pct(double prev, double cur, int precision) {
    const double d = cur - prev;
    const std::string mag = fixed(std::abs(d), precision);
    if (mag == fixed(0.0, precision)) return "(no change)";
    const std::string pct = prev > 0.0 ? fixed(100.0 * std::abs(d) / prev, 1) + "%" : "NA%";
    return fmt::format("({} {}, {})", d > 0 ? "up" : "down", mag, pct);
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::vector<std::string> names_not_in(const GlobalSnapshot& a, const GlobalSnapshot& b) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a.counties.size(); ++i)
        if (!std::binary_search(b.counties.begin(), b.counties.end(), a.counties[i]))
            out.push_back(a.county_names[i]);
    return out;
}

void check_kelvin(const std::string& scope, const char* slot, const std::optional<double>& v) {
    if (v && !(*v >= 200.0))
        fail(ErrorKind::unit,
             fmt::format("unit lock: {}.{}={} is below 200 K; expected kelvin", scope, slot, *v));
}

void check_nonneg(const std::string& scope, const char* slot, std::optional<double> v) {
    if (v && !(*v >= 0.0 && std::isfinite(*v)))
        fail(ErrorKind::unit, fmt::format("unit lock: {}.{}={} must be a finite non-negative value",
                                          scope, slot, *v));
}

void check_weather(const std::string& scope, const FusedWeather& w) {
    check_kelvin(scope, "Tmax", w.tmax);
    check_kelvin(scope, "Tmin", w.tmin);
    check_nonneg(scope, "BI", w.bi);
    check_nonneg(scope, "Wind", w.wind);
    if (w.fm1 && !(*w.fm1 >= 0.0 && *w.fm1 <= 100.0))
        fail(ErrorKind::unit,
             fmt::format("unit lock: {}.FM1={} is outside [0, 100] percent", scope, *w.fm1));
}

std::string weather_line(Renderer& r, const std::string& scope, const FusedWeather& w) {
    return fmt::format("BI={}, Tmax/Tmin={}/{} K, Wind={} m/s, FM1={}%", r(scope, "BI", w.bi),
                       r(scope, "Tmax", w.tmax), r(scope, "Tmin", w.tmin), r(scope, "Wind", w.wind),
                       r(scope, "FM1", w.fm1));
}

std::string top_classes(const std::map<int, double>& composition) {
    std::vector<std::pair<int, double>> items(composition.begin(), composition.end());
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (items.size() > 3) items.resize(3);
    std::vector<std::string> parts;
    for (const auto& [code, p] : items) parts.push_back(fmt::format("{}:{}%", code, fixed(100.0 * p, 1)));
    return parts.empty() ? "NA" : join(parts, "/");
}

} // namespace

std::string fixed(double v, int precision) {
    std::string s = fmt::format("{:.{}f}", v, precision);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string na_policy(std::string_view slot, std::optional<double> value) {
    const Slot& s = find_slot(slot);
    if (!value) return "NA";
    return fixed(*value, s.precision);
}

NaDefault na_default(std::string_view slot) { return find_slot(slot).na; }

const EventDayContext& unit_lock(const EventDayContext& ctx) {
    const GlobalSnapshot& s = ctx.snapshot;
    check_weather("global", s.weather);
    check_nonneg("global", "frp", s.total_frp);
    check_nonneg("global", "area", s.total_area_acres);
    check_nonneg("global", "pop", s.total_population);
    if (s.n_clusters > 0) check_kelvin("global", "brightness", s.max_brightness);
    for (const ClusterFeatures& c : ctx.clusters) {
        const std::string scope = fmt::format("cluster {}", c.cluster_id);
        check_weather(scope, c.weather);
        check_kelvin(scope, "brightness", c.max_brightness);
        check_nonneg(scope, "frp", c.sum_frp);
        check_nonneg(scope, "area", c.area_acres);
        check_nonneg(scope, "pop", c.exposure.population);
        if (c.terrain) {
            const double sp = c.terrain->spread_potential;
            if (!(sp >= 0.0 && sp <= 1.0))
                fail(ErrorKind::unit,
                     fmt::format("unit lock: {}.spread_potential={} is outside [0, 1]", scope, sp));
        }
    }
    if (ctx.anchors) check_weather("yesterday", ctx.anchors->yesterday.weather);
    return ctx;
}

PerceptionScript render_script(const EventDayContext& ctx, std::size_t top_k) {
    unit_lock(ctx);
    PerceptionScript out;
    Renderer r(out.na_fields);
    const GlobalSnapshot& s = ctx.snapshot;
    const GlobalSnapshot* y = ctx.anchors ? &ctx.anchors->yesterday : nullptr;
    const std::string vs = y ? " vs Yesterday" : "";
    auto suffix = [&](std::string d) { return y ? " " + d : std::string(); };

    std::string& h = out.head;
    h += fmt::format("## Fire Overview{}\n", vs);
    h += fmt::format("- Current date: {}\n", s.date.month_day());
    h += fmt::format("- Total Fire Points: {}{}\n", s.total_points,
                     suffix(y ? delta(double(y->total_points), double(s.total_points), 0) : ""));
    h += fmt::format("- Num Clusters: {}{}\n", s.n_clusters,
                     suffix(y ? delta(double(y->n_clusters), double(s.n_clusters), 0) : ""));
    h += fmt::format("- Total FRP: {} MW{}\n", r("global", "frp", s.total_frp),
                     suffix(y ? delta_pct(y->total_frp, s.total_frp, 1) : ""));
    h += fmt::format("- Total area: {} acres{}\n", r("global", "area", s.total_area_acres),
                     suffix(y ? delta_pct(y->total_area_acres, s.total_area_acres, 1) : ""));
    h += fmt::format("- Max FRP/Brightness: {} MW / {} K{}\n", r("global", "max_frp", s.max_frp),
                     r("global", "brightness", s.n_clusters ? std::optional(s.max_brightness) : std::nullopt),
                     suffix(y ? delta(y->max_frp, s.max_frp, 1) : ""));
    h += fmt::format("- FRP per cluster: median={} MW, p95={} MW\n",
                     r("global", "median_frp", s.median_frp_per_cluster),
                     r("global", "p95_frp", s.p95_frp_per_cluster));
    h += fmt::format("- Weather conditions: {}\n", weather_line(r, "global", s.weather));
    h += '\n';

    h += fmt::format("## Affected Areas{}\n", vs);
    {
        std::string counties = fmt::format("{{{}}}; now {}", join(s.county_names, ", "), s.counties.size());
        if (y) {
            counties = fmt::format("added {{{}}}; removed {{{}}}; now {}", join(names_not_in(s, *y), ", "),
                                   join(names_not_in(*y, s), ", "), s.counties.size());
        }
        h += fmt::format("- Counties: {}\n", counties);
    }
    std::string pop_delta;
    if (y && y->total_population && s.total_population)
        pop_delta = " " + delta(*y->total_population, *s.total_population, 0);
    h += fmt::format("- Total Population Affected: {}{}\n", r("global", "pop", s.total_population), pop_delta);
    h += fmt::format("- Fire stations in area: {}{}\n", s.station_count,
                     suffix(y ? delta(double(y->station_count), double(s.station_count), 0) : ""));
    std::string near_delta;
    if (y && y->nearest_station_mi && s.nearest_station_mi)
        near_delta = " " + delta(*y->nearest_station_mi, *s.nearest_station_mi, 1);
    h += fmt::format("- Nearest station: {} mile{}\n", r("global", "nearest_station", s.nearest_station_mi),
                     near_delta);
    h += fmt::format("- Mean spread potential: {}\n",
                     r("global", "spread_potential", s.mean_spread_potential));
    h += '\n';

    if (ctx.anchors) {
        const TemporalAnchors& a = *ctx.anchors;
        h += "## Fire Intensity Rolling Metrics\n";
        h += fmt::format("- 3-day avg fire points: {}\n", fixed(a.points.avg3, 1));
        h += fmt::format("- 3-day max fire points: {}\n", fixed(a.points.max3, 1));
        h += fmt::format("- 7-day avg fire points: {}\n", fixed(a.points.avg7, 1));
        h += fmt::format("- 7-day max fire points: {}\n", fixed(a.points.max7, 1));
        h += fmt::format("- Current fire points vs historical max: {}%\n", fixed(a.pct_of_hist_max_points, 1));
        h += fmt::format("- Global max fire points: {} ({} days ago)\n", fixed(a.global_max_points, 1),
                         a.days_since_global_max_points);
        h += fmt::format("- 3-day avg total FRP: {} MW\n", fixed(a.frp.avg3, 1));
        h += fmt::format("- 7-day avg total FRP: {} MW\n", fixed(a.frp.avg7, 1));
        h += fmt::format("- 3-day avg total area: {} acres\n", fixed(a.area.avg3, 1));
        h += fmt::format("- 7-day avg total area: {} acres\n", fixed(a.area.avg7, 1));
        h += fmt::format("- Current area vs historical max: {}%\n", fixed(a.pct_of_hist_max_area, 1));
        h += fmt::format("- Global max area: {} acres ({} days ago)\n", fixed(a.global_max_area, 1),
                         a.days_since_global_max_area);
        std::vector<std::string> cues;
        for (const auto& [field, t] : a.trends) cues.push_back(fmt::format("{} {}", field, symbol(t)));
        h += fmt::format("- Qualitative deltas: {}\n", cues.empty() ? "NA" : join(cues, ", "));
        h += '\n';
    }

    std::vector<const ClusterFeatures*> ordered;
    for (const auto& c : ctx.clusters) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const ClusterFeatures* a, const ClusterFeatures* b) { return consequence_before(*a, *b); });
    if (ordered.size() > top_k) ordered.resize(top_k);
    out.k_used = ordered.size();

    std::string& cb = out.cluster_block;
    cb += "## Cluster Details\n";
    if (ordered.empty()) cb += "- none (no hotspots detected today)\n";
    for (const ClusterFeatures* c : ordered) {
        const std::string scope = fmt::format("cluster {}", c->cluster_id);
        cb += fmt::format("- Cluster {}:\n", c->cluster_id);
        cb += fmt::format("  fire[points={}, frp={} MW, brightness={} K, area={} acres]\n", c->point_count,
                          r(scope, "frp", c->sum_frp), r(scope, "brightness", c->max_brightness),
                          r(scope, "area", c->area_acres));
        cb += fmt::format("  weather[BI={}, tmax={} K, tmin={} K, wind={} m/s, FM1={}%]\n",
                          r(scope, "BI", c->weather.bi), r(scope, "Tmax", c->weather.tmax),
                          r(scope, "Tmin", c->weather.tmin), r(scope, "Wind", c->weather.wind),
                          r(scope, "FM1", c->weather.fm1));
        std::array<std::optional<double>, 3> st;
        for (std::size_t i = 0; i < st.size() && i < c->access.nearest.size(); ++i)
            st[i] = c->access.nearest[i].second / kMetersPerMile;
        const std::string where = c->exposure.county_names.empty() ? "NA" : join(c->exposure.county_names, "/");
        cb += fmt::format("  location[{}, pop={}, density={} /km2, station_1/2/3={}/{}/{} mile]\n", where,
                          r(scope, "pop", c->exposure.population), r(scope, "density", c->exposure.density),
                          r(scope, "station_1", st[0]), r(scope, "station_2", st[1]),
                          r(scope, "station_3", st[2]));
        const TerrainProfile* t = c->terrain ? &*c->terrain : nullptr;
        auto tv = [&](double TerrainProfile::*f, double scale = 1.0) -> std::optional<double> {
            if (!t) return std::nullopt;
            return t->*f * scale;
        };
        cb += fmt::format("  terrain[spread_potential={}, diversity={}, fragmentation={}, "
                          "continuous_fuels={}%, barriers={}%, land_cover={}]\n",
                          r(scope, "spread_potential", tv(&TerrainProfile::spread_potential)),
                          r(scope, "diversity", tv(&TerrainProfile::shannon_diversity)),
                          r(scope, "fragmentation", tv(&TerrainProfile::fragmentation)),
                          r(scope, "continuous_fuels", tv(&TerrainProfile::continuous_fuels, 100.0)),
                          r(scope, "barriers", tv(&TerrainProfile::barriers, 100.0)),
                          t ? top_classes(t->composition) : std::string("NA"));
    }

    out.text = out.head + out.cluster_block;
    return out;
}

} // namespace gal
