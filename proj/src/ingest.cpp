#include "gal/ingest.hpp"

#include "gal/csv.hpp"
#include "gal/error.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace gal {

using json = nlohmann::json;
using namespace csv;

int parse_acq_time(const std::string& text) {
    const std::string_view s = trim(text);
    int hhmm = -1;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), hhmm);
    if (s.empty() || s.size() > 4 || ec != std::errc{} || p != s.data() + s.size() || hhmm < 0)
        fail(ErrorKind::row, fmt::format("malformed acq_time '{}'", text));
    const int hours = hhmm / 100, minutes = hhmm % 100;
    if (hours > 23 || minutes > 59)
        fail(ErrorKind::row, fmt::format("acq_time '{}' out of range", text));
    return hours * 60 + minutes;
}

std::optional<double> RasterGrid::sample(GeoPoint p) const {
    if (p.lon < west || p.lat > north()) return std::nullopt;
    const double col_f = std::floor((p.lon - west) / cell_size);
    const double row_f = std::floor((north() - p.lat) / cell_size);
    if (col_f < 0 || row_f < 0 || col_f >= static_cast<double>(n_cols) ||
        row_f >= static_cast<double>(n_rows))
        return std::nullopt;
    const double v = at(static_cast<std::size_t>(row_f), static_cast<std::size_t>(col_f));
    if (is_nodata(v)) return std::nullopt;
    return v;
}

// ---------------------------------------------------------------- hotspots

std::vector<Hotspot> parse_hotspots(std::istream& in) {
    const Header h = read_header(in, "hotspot CSV");
    const std::size_t c_lat = h.need({"latitude", "lat"}, "latitude");
    const std::size_t c_lon = h.need({"longitude", "lon"}, "longitude");
    const std::size_t c_frp = h.need({"frp"}, "frp");
    const std::size_t c_bright = h.need({"brightness", "bright_ti4"}, "brightness");
    const std::size_t c_date = h.need({"acq_date"}, "acq_date");
    const std::size_t c_time = h.need({"acq_time"}, "acq_time");
    const std::optional<std::size_t> c_sat = h.find({"satellite"});
    const std::size_t width = h.columns.size();

    std::vector<Hotspot> out;
    CsvReader reader(in);
    std::vector<std::string> f;
    while (reader.next(f)) {
        const std::size_t row = reader.row();
        if (f.size() != width)
            throw RowError(row, fmt::format("expected {} fields, found {}", width, f.size()));

        Hotspot hs;
        hs.lat = field_double(f, c_lat, row, "latitude");
        hs.lon = field_double(f, c_lon, row, "longitude");
        hs.frp = field_double(f, c_frp, row, "frp");
        hs.brightness = field_double(f, c_bright, row, "brightness");
        try {
            hs.acq_date = Date::parse(f[c_date]);
            hs.acq_time = parse_acq_time(f[c_time]);
        } catch (const Error& e) {
            throw RowError(row, e.what());
        }
        if (c_sat) hs.satellite = f[*c_sat];

        if (!valid_coordinates(hs.lat, hs.lon))
            throw RowError(row, fmt::format("coordinate ({}, {}) out of range", hs.lat, hs.lon));
        if (hs.frp < 0.0) throw RowError(row, fmt::format("negative frp {}", hs.frp));
        if (hs.brightness <= 0.0)
            throw RowError(row, fmt::format("non-positive brightness {}", hs.brightness));
        out.push_back(std::move(hs));
    }
    return out;
}

void write_hotspots(std::ostream& out, const std::vector<Hotspot>& hotspots) {
    out << "latitude,longitude,bright_ti4,frp,acq_date,acq_time,satellite\n";
    for (const Hotspot& h : hotspots) {
        out << fmt::format("{},{},{},{},{},{:02d}{:02d},{}\n", shortest(h.lat), shortest(h.lon),
                           shortest(h.brightness), shortest(h.frp), h.acq_date.iso(),
                           h.acq_time / 60, h.acq_time % 60, h.satellite);
    }
}

// ---------------------------------------------------------------- stations

std::vector<FireStation> parse_stations(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::format, fmt::format("stations GeoJSON: {}", e.what()));
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array())
        fail(ErrorKind::format, "stations GeoJSON: expected a FeatureCollection");

    std::vector<FireStation> out;
    std::set<std::string> seen;
    const json& features = doc["features"];
    for (std::size_t i = 0; i < features.size(); ++i) {
        const json& feat = features[i];
        const auto where = fmt::format("feature {}", i);
        if (!feat.is_object() || !feat.contains("geometry") || !feat["geometry"].is_object())
            fail(ErrorKind::format, where + ": missing geometry");
        const json& geom = feat["geometry"];
        if (geom.value("type", "") != "Point")
            fail(ErrorKind::format,
                 fmt::format("{}: geometry type '{}' is not Point", where, geom.value("type", "")));
        const json& coords = geom.value("coordinates", json::array());
        if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() ||
            !coords[1].is_number())
            fail(ErrorKind::format, where + ": malformed Point coordinates");

        FireStation st;
        st.lon = coords[0].get<double>();
        st.lat = coords[1].get<double>();
        if (!valid_coordinates(st.lat, st.lon))
            fail(ErrorKind::format, where + ": coordinates out of range");

        const json props = feat.value("properties", json::object());
        if (!props.contains("id") || props["id"].is_null())
            fail(ErrorKind::format, where + ": missing id property");
        st.id = props["id"].is_string() ? props["id"].get<std::string>() : props["id"].dump();
        st.name = props.contains("name") && props["name"].is_string()
                      ? props["name"].get<std::string>()
                      : std::string{};
        if (!seen.insert(st.id).second)
            fail(ErrorKind::conflict, fmt::format("{}: duplicate station id '{}'", where, st.id));
        out.push_back(std::move(st));
    }
    return out;
}

void write_stations(std::ostream& out, const std::vector<FireStation>& stations) {
    json features = json::array();
    for (const FireStation& s : stations) {
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "Point"}, {"coordinates", {s.lon, s.lat}}}},
                            {"properties", {{"id", s.id}, {"name", s.name}}}});
    }
    out << json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) << '\n';
}

// ---------------------------------------------------------------- rasters

RasterGrid load_raster(std::istream& in) {
    RasterGrid g;
    std::map<std::string, double> header;
    std::string token;

    // Header keys come first; the first numeric token starts the body.
    std::vector<double> values;
    while (in >> token) {
        double v = 0.0;
        if (to_double(token, v)) {
            values.push_back(v);
            break;
        }
        std::string value;
        if (!(in >> value) || !to_double(value, v))
            fail(ErrorKind::format, fmt::format("raster header '{}' has no numeric value", token));
        header[lower(token)] = v;
    }

    auto need = [&](std::string_view key) {
        auto it = header.find(std::string(key));
        if (it == header.end()) fail(ErrorKind::format, fmt::format("raster missing '{}'", key));
        return it->second;
    };
    const double ncols = need("ncols"), nrows = need("nrows");
    if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows))
        fail(ErrorKind::format, "raster dimensions must be positive integers");
    g.n_cols = static_cast<std::size_t>(ncols);
    g.n_rows = static_cast<std::size_t>(nrows);
    g.west = need("xllcorner");
    g.south = need("yllcorner");
    g.cell_size = need("cellsize");
    if (!(g.cell_size > 0.0)) fail(ErrorKind::format, "raster cellsize must be positive");
    if (auto it = header.find("nodata_value"); it != header.end()) g.nodata = it->second;

    while (in >> token) {
        double v = 0.0;
        if (!to_double(token, v))
            fail(ErrorKind::format, fmt::format("raster value '{}' is not numeric", token));
        values.push_back(v);
    }
    if (values.size() != g.n_rows * g.n_cols)
        fail(ErrorKind::format, fmt::format("raster declares {}x{} cells but has {} values",
                                            g.n_rows, g.n_cols, values.size()));
    g.values = std::move(values);
    return g;
}

void write_raster(std::ostream& out, const RasterGrid& g) {
    out << fmt::format("ncols {}\nnrows {}\nxllcorner {}\nyllcorner {}\ncellsize {}\n"
                       "NODATA_value {}\n",
                       g.n_cols, g.n_rows, shortest(g.west), shortest(g.south),
                       shortest(g.cell_size), shortest(g.nodata));
    for (std::size_t r = 0; r < g.n_rows; ++r) {
        for (std::size_t c = 0; c < g.n_cols; ++c) {
            if (c) out << ' ';
            out << shortest(g.at(r, c));
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------- ground truth

GroundTruth parse_ground_truth(std::istream& in) {
    const Header h = read_header(in, "ground-truth CSV");
    const std::size_t c_fire = h.need({"fire_id"}, "fire_id");
    const std::size_t c_date = h.need({"date"}, "date");
    const std::size_t c_pers = h.need({"personnel"}, "personnel");
    const std::size_t c_cost = h.need({"daily_cost_musd"}, "daily_cost_musd");
    const std::size_t width = h.columns.size();

    GroundTruth out;
    CsvReader reader(in);
    std::vector<std::string> f;
    while (reader.next(f)) {
        const std::size_t row = reader.row();
        if (f.size() != width)
            throw RowError(row, fmt::format("expected {} fields, found {}", width, f.size()));
        GroundTruthDay d;
        d.fire_id = f[c_fire];
        if (d.fire_id.empty()) throw RowError(row, "empty fire_id");
        try {
            d.date = Date::parse(f[c_date]);
        } catch (const Error& e) {
            throw RowError(row, e.what());
        }
        d.personnel = field_double(f, c_pers, row, "personnel");
        d.daily_cost = field_double(f, c_cost, row, "daily_cost_musd");
        if (d.personnel < 0.0) throw RowError(row, "negative personnel");
        if (d.daily_cost < 0.0) throw RowError(row, "negative daily_cost_musd");
        out[d.fire_id].push_back(std::move(d));
    }

    for (auto& [fire, series] : out) {
        std::stable_sort(series.begin(), series.end(),
                         [](const auto& a, const auto& b) { return a.date < b.date; });
        for (std::size_t i = 1; i < series.size(); ++i)
            if (series[i].date == series[i - 1].date)
                fail(ErrorKind::conflict, fmt::format("duplicate ground-truth day {} for fire '{}'",
                                                      series[i].date.iso(), fire));
    }
    return out;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    out << "fire_id,date,personnel,daily_cost_musd\n";
    for (const auto& [fire, series] : truth)
        for (const GroundTruthDay& d : series)
            out << fmt::format("{},{},{},{}\n", d.fire_id, d.date.iso(), shortest(d.personnel),
                               shortest(d.daily_cost));
}

// ---------------------------------------------------------------- weather

WeatherDayGrids parse_weather_day(const WeatherStreams& s, Date date) {
    require(s.bi && s.tmax && s.tmin && s.wind && s.fm1,
            "parse_weather_day: all five weather streams are required");
    WeatherDayGrids w;
    w.date = date;
    w.bi = load_raster(*s.bi);
    w.tmax = load_raster(*s.tmax);
    w.tmin = load_raster(*s.tmin);
    w.wind = load_raster(*s.wind);
    w.fm1 = load_raster(*s.fm1);

    const std::pair<const char*, const RasterGrid*> others[] = {
        {"tmax", &w.tmax}, {"tmin", &w.tmin}, {"wind", &w.wind}, {"fm1", &w.fm1}};
    for (const auto& [name, grid] : others)
        if (!grid->same_georeference(w.bi))
            fail(ErrorKind::alignment,
                 fmt::format("weather {}: {} grid georeference differs from bi", date.iso(), name));

    auto check = [&](const char* name, const RasterGrid& g, auto ok, const char* expect) {
        for (double v : g.values)
            if (!g.is_nodata(v) && !ok(v))
                fail(ErrorKind::unit, fmt::format("weather {}: {} value {} implausible, expected {}",
                                                  date.iso(), name, v, expect));
    };
    check("bi", w.bi, [](double v) { return v >= 0.0; }, "non-negative index");
    check("tmax", w.tmax, [](double v) { return v >= 200.0; }, "kelvin");
    check("tmin", w.tmin, [](double v) { return v >= 200.0; }, "kelvin");
    check("wind", w.wind, [](double v) { return v >= 0.0; }, "non-negative m/s");
    check("fm1", w.fm1, [](double v) { return v >= 0.0 && v <= 100.0; }, "percent");
    return w;
}

// ---------------------------------------------------------------- files

namespace {
std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::runtime, fmt::format("cannot open '{}'", path));
    return in;
}

template <typename F>
auto with_path(const std::string& path, F&& parse) {
    std::ifstream in = open_or_throw(path);
    try {
        return parse(in);
    } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("{}: {}", path, e.what()));
    }
}
} // namespace

std::vector<Hotspot> read_hotspots_file(const std::string& path) {
    return with_path(path, [](std::istream& in) { return parse_hotspots(in); });
}
std::vector<FireStation> read_stations_file(const std::string& path) {
    return with_path(path, [](std::istream& in) { return parse_stations(in); });
}
RasterGrid read_raster_file(const std::string& path) {
    return with_path(path, [](std::istream& in) { return load_raster(in); });
}
GroundTruth read_ground_truth_file(const std::string& path) {
    return with_path(path, [](std::istream& in) { return parse_ground_truth(in); });
}

} // namespace gal
