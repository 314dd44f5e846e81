#include "gal/canonical_json.hpp"

#include "gal/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace gal {

namespace {

std::string format_float(double v) {
    if (!std::isfinite(v)) fail(ErrorKind::precondition, "canonical json: non-finite number");
    std::string s = fmt::format("{:.4f}", v);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

void dump_into(std::string& out, const json& j, int indent, int depth) {
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };

    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += json(it.key()).dump(-1, ' ', false);
            out += pretty ? ": " : ":";
            dump_into(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ',';
            newline(depth + 1);
            dump_into(out, j[i], indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case json::value_t::number_float:
        out += format_float(j.get<double>());
        return;
    default:
        out += j.dump(-1, ' ', false);
        return;
    }
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const json& at(const json& j, const char* key) {
    if (!j.is_object()) fail(ErrorKind::format, fmt::format("expected an object holding '{}'", key));
    auto it = j.find(key);
    if (it == j.end()) fail(ErrorKind::format, fmt::format("missing key '{}'", key));
    return *it;
}

double num(const json& j, const char* key) {
    const json& v = at(j, key);
    if (!v.is_number()) fail(ErrorKind::format, fmt::format("key '{}' is not a number", key));
    return v.get<double>();
}

std::size_t count(const json& j, const char* key) {
    const json& v = at(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail(ErrorKind::format, fmt::format("key '{}' is not a non-negative integer", key));
    return v.get<std::size_t>();
}

std::optional<double> opt_num(const json& j, const char* key) {
    const json& v = at(j, key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) fail(ErrorKind::format, fmt::format("key '{}' is not a number", key));
    return v.get<double>();
}

std::string str(const json& j, const char* key) {
    const json& v = at(j, key);
    if (!v.is_string()) fail(ErrorKind::format, fmt::format("key '{}' is not a string", key));
    return v.get<std::string>();
}

std::vector<std::string> strings(const json& j, const char* key) {
    const json& v = at(j, key);
    if (!v.is_array()) fail(ErrorKind::format, fmt::format("key '{}' is not an array", key));
    std::vector<std::string> out;
    for (const json& e : v) {
        if (!e.is_string()) fail(ErrorKind::format, fmt::format("key '{}' holds a non-string", key));
        out.push_back(e.get<std::string>());
    }
    return out;
}

Date date_of(const json& j, const char* key) {
    try {
        return Date::parse(str(j, key));
    } catch (const Error& e) {
        fail(ErrorKind::format, fmt::format("key '{}': {}", key, e.what()));
    }
}

std::string_view trend_key(Trend t) {
    switch (t) {
    case Trend::up: return "up";
    case Trend::flat: return "flat";
    case Trend::down: return "down";
    }
    return "flat";
}

Trend trend_from(const std::string& s) {
    if (s == "up") return Trend::up;
    if (s == "flat") return Trend::flat;
    if (s == "down") return Trend::down;
    fail(ErrorKind::format, fmt::format("unknown trend '{}'", s));
}

json to_json(const WindowStats& w) {
    return {{"avg3", w.avg3}, {"max3", w.max3}, {"avg7", w.avg7}, {"max7", w.max7}};
}

WindowStats window_from_json(const json& j) {
    return {num(j, "avg3"), num(j, "max3"), num(j, "avg7"), num(j, "max7")};
}

json to_json(const TerrainProfile& t) {
    json comp = json::object();
    for (const auto& [code, p] : t.composition) comp[std::to_string(code)] = p;
    return {{"composition", comp},
            {"shannon_diversity", t.shannon_diversity},
            {"fragmentation", t.fragmentation},
            {"risk_high", t.risk_high},
            {"risk_medium", t.risk_medium},
            {"risk_low", t.risk_low},
            {"continuous_fuels", t.continuous_fuels},
            {"barriers", t.barriers},
            {"unclassified", t.unclassified},
            {"spread_potential", t.spread_potential},
            {"covered_cells", t.covered_cells}};
}

TerrainProfile terrain_from_json(const json& j) {
    TerrainProfile t;
    const json& comp = at(j, "composition");
    if (!comp.is_object()) fail(ErrorKind::format, "terrain composition is not an object");
    for (auto it = comp.begin(); it != comp.end(); ++it) {
        if (!it.value().is_number()) fail(ErrorKind::format, "terrain composition holds a non-number");
        try {
            t.composition[std::stoi(it.key())] = it.value().get<double>();
        } catch (const std::logic_error&) {
            fail(ErrorKind::format, fmt::format("terrain composition key '{}' is not a class code", it.key()));
        }
    }
    t.shannon_diversity = num(j, "shannon_diversity");
    t.fragmentation = num(j, "fragmentation");
    t.risk_high = num(j, "risk_high");
    t.risk_medium = num(j, "risk_medium");
    t.risk_low = num(j, "risk_low");
    t.continuous_fuels = num(j, "continuous_fuels");
    t.barriers = num(j, "barriers");
    t.unclassified = num(j, "unclassified");
    t.spread_potential = num(j, "spread_potential");
    t.covered_cells = count(j, "covered_cells");
    return t;
}

} // namespace

std::string dump_canonical(const json& j, int indent) {
    std::string out;
    dump_into(out, j, indent, 0);
    return out;
}

json to_json(const FusedWeather& w) {
    return {{"bi", opt(w.bi)}, {"tmax", opt(w.tmax)}, {"tmin", opt(w.tmin)},
            {"wind", opt(w.wind)}, {"fm1", opt(w.fm1)}};
}

FusedWeather weather_from_json(const json& j) {
    return {opt_num(j, "bi"), opt_num(j, "tmax"), opt_num(j, "tmin"), opt_num(j, "wind"),
            opt_num(j, "fm1")};
}

json to_json(const GlobalSnapshot& s) {
    return {{"date", s.date.iso()},
            {"total_points", s.total_points},
            {"total_frp", s.total_frp},
            {"total_area_acres", s.total_area_acres},
            {"total_perimeter_m", s.total_perimeter_m},
            {"max_frp", s.max_frp},
            {"max_brightness", s.max_brightness},
            {"median_frp_per_cluster", s.median_frp_per_cluster},
            {"p95_frp_per_cluster", s.p95_frp_per_cluster},
            {"n_clusters", s.n_clusters},
            {"counties", s.counties},
            {"county_names", s.county_names},
            {"total_population", opt(s.total_population)},
            {"station_count", s.station_count},
            {"nearest_station_mi", opt(s.nearest_station_mi)},
            {"weather", to_json(s.weather)},
            {"mean_spread_potential", opt(s.mean_spread_potential)}};
}

GlobalSnapshot snapshot_from_json(const json& j) {
    GlobalSnapshot s;
    s.date = date_of(j, "date");
    s.total_points = count(j, "total_points");
    s.total_frp = num(j, "total_frp");
    s.total_area_acres = num(j, "total_area_acres");
    s.total_perimeter_m = num(j, "total_perimeter_m");
    s.max_frp = num(j, "max_frp");
    s.max_brightness = num(j, "max_brightness");
    s.median_frp_per_cluster = num(j, "median_frp_per_cluster");
    s.p95_frp_per_cluster = num(j, "p95_frp_per_cluster");
    s.n_clusters = count(j, "n_clusters");
    s.counties = strings(j, "counties");
    s.county_names = strings(j, "county_names");
    s.total_population = opt_num(j, "total_population");
    s.station_count = count(j, "station_count");
    s.nearest_station_mi = opt_num(j, "nearest_station_mi");
    s.weather = weather_from_json(at(j, "weather"));
    s.mean_spread_potential = opt_num(j, "mean_spread_potential");
    return s;
}

json to_json(const ClusterFeatures& c) {
    json nearest = json::array();
    for (const auto& [id, m] : c.access.nearest) nearest.push_back({{"id", id}, {"distance_m", m}});
    return {{"cluster_id", c.cluster_id},
            {"point_count", c.point_count},
            {"sum_frp", c.sum_frp},
            {"max_brightness", c.max_brightness},
            {"centroid", {{"lat", c.centroid.lat}, {"lon", c.centroid.lon}}},
            {"area_acres", c.area_acres},
            {"perimeter_m", c.perimeter_m},
            {"weather", to_json(c.weather)},
            {"terrain", c.terrain ? to_json(*c.terrain) : json(nullptr)},
            {"exposure",
             {{"population", opt(c.exposure.population)},
              {"density", c.exposure.density},
              {"counties", c.exposure.counties},
              {"county_names", c.exposure.county_names},
              {"nearby_counties", c.exposure.nearby_counties}}},
            {"access",
             {{"nearest", nearest},
              {"density_10km", c.access.density_10km},
              {"within_ids", c.access.within_ids}}}};
}

ClusterFeatures cluster_from_json(const json& j) {
    ClusterFeatures c;
    const json& id = at(j, "cluster_id");
    if (!id.is_number_integer()) fail(ErrorKind::format, "key 'cluster_id' is not an integer");
    c.cluster_id = id.get<int>();
    c.point_count = count(j, "point_count");
    c.sum_frp = num(j, "sum_frp");
    c.max_brightness = num(j, "max_brightness");
    const json& centroid = at(j, "centroid");
    c.centroid = {num(centroid, "lat"), num(centroid, "lon")};
    c.area_acres = num(j, "area_acres");
    c.perimeter_m = num(j, "perimeter_m");
    c.weather = weather_from_json(at(j, "weather"));
    if (const json& t = at(j, "terrain"); !t.is_null()) c.terrain = terrain_from_json(t);
    const json& e = at(j, "exposure");
    c.exposure.population = opt_num(e, "population");
    c.exposure.density = num(e, "density");
    c.exposure.counties = strings(e, "counties");
    c.exposure.county_names = strings(e, "county_names");
    c.exposure.nearby_counties = strings(e, "nearby_counties");
    const json& a = at(j, "access");
    const json& nearest = at(a, "nearest");
    if (!nearest.is_array()) fail(ErrorKind::format, "key 'nearest' is not an array");
    for (const json& n : nearest) c.access.nearest.emplace_back(str(n, "id"), num(n, "distance_m"));
    c.access.density_10km = count(a, "density_10km");
    c.access.within_ids = strings(a, "within_ids");
    return c;
}

json to_json(const TemporalAnchors& a) {
    json trends = json::object();
    for (const auto& [k, t] : a.trends) trends[k] = trend_key(t);
    return {{"points", to_json(a.points)},
            {"frp", to_json(a.frp)},
            {"area", to_json(a.area)},
            {"cost", a.cost ? to_json(*a.cost) : json(nullptr)},
            {"personnel", a.personnel ? to_json(*a.personnel) : json(nullptr)},
            {"pct_of_hist_max_points", a.pct_of_hist_max_points},
            {"pct_of_hist_max_area", a.pct_of_hist_max_area},
            {"global_max_points", a.global_max_points},
            {"global_max_area", a.global_max_area},
            {"days_since_global_max_points", a.days_since_global_max_points},
            {"days_since_global_max_area", a.days_since_global_max_area},
            {"days_since_start", a.days_since_start},
            {"trends", trends},
            {"yesterday", to_json(a.yesterday)}};
}

TemporalAnchors anchors_from_json(const json& j) {
    TemporalAnchors a;
    a.points = window_from_json(at(j, "points"));
    a.frp = window_from_json(at(j, "frp"));
    a.area = window_from_json(at(j, "area"));
    if (const json& c = at(j, "cost"); !c.is_null()) a.cost = window_from_json(c);
    if (const json& p = at(j, "personnel"); !p.is_null()) a.personnel = window_from_json(p);
    a.pct_of_hist_max_points = num(j, "pct_of_hist_max_points");
    a.pct_of_hist_max_area = num(j, "pct_of_hist_max_area");
    a.global_max_points = num(j, "global_max_points");
    a.global_max_area = num(j, "global_max_area");
    a.days_since_global_max_points = static_cast<int>(num(j, "days_since_global_max_points"));
    a.days_since_global_max_area = static_cast<int>(num(j, "days_since_global_max_area"));
    a.days_since_start = static_cast<int>(num(j, "days_since_start"));
    const json& trends = at(j, "trends");
    if (!trends.is_object()) fail(ErrorKind::format, "key 'trends' is not an object");
    for (auto it = trends.begin(); it != trends.end(); ++it) {
        if (!it.value().is_string()) fail(ErrorKind::format, "trend value is not a string");
        a.trends[it.key()] = trend_from(it.value().get<std::string>());
    }
    a.yesterday = snapshot_from_json(at(j, "yesterday"));
    return a;
}

json to_json(const EventDayContext& ctx) {
    json clusters = json::array();
    for (const auto& c : ctx.clusters) clusters.push_back(to_json(c));
    return {{"fire_id", ctx.fire_id},
            {"snapshot", to_json(ctx.snapshot)},
            {"clusters", clusters},
            {"anchors", ctx.anchors ? to_json(*ctx.anchors) : json(nullptr)}};
}

EventDayContext context_from_json(const json& j) {
    EventDayContext ctx;
    ctx.fire_id = str(j, "fire_id");
    ctx.snapshot = snapshot_from_json(at(j, "snapshot"));
    const json& clusters = at(j, "clusters");
    if (!clusters.is_array()) fail(ErrorKind::format, "key 'clusters' is not an array");
    for (const json& c : clusters) ctx.clusters.push_back(cluster_from_json(c));
    if (const json& a = at(j, "anchors"); !a.is_null()) ctx.anchors = anchors_from_json(a);
    return ctx;
}

void write_context_file(const std::string& path, const EventDayContext& ctx) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::runtime, fmt::format("cannot write {}", path));
    out << dump_canonical(to_json(ctx)) << '\n';
    if (!out) fail(ErrorKind::runtime, fmt::format("write failed: {}", path));
}

EventDayContext read_context_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::runtime, fmt::format("cannot open {}", path));
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return context_from_json(json::parse(buf.str()));
    } catch (const json::parse_error& e) {
        fail(ErrorKind::format, fmt::format("{}: {}", path, e.what()));
    } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("{}: {}", path, e.what()));
    }
}

} // namespace gal
