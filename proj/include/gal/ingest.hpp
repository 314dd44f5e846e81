#pragma once

// File-format boundary: every external dataset is parsed here into validated
// records in canonical units (degrees, MW, kelvin, m/s, percent, million USD).

#include "gal/date.hpp"
#include "gal/geo.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gal {

struct Hotspot {
    double lat = 0.0;
    double lon = 0.0;
    double frp = 0.0;        // MW
    double brightness = 0.0; // K
    Date acq_date;
    int acq_time = 0;        // minutes of day, UTC
    std::string satellite;

    GeoPoint position() const { return {lat, lon}; }
    friend bool operator==(const Hotspot&, const Hotspot&) = default;
};

struct FireStation {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    std::string name;

    GeoPoint position() const { return {lat, lon}; }
    friend bool operator==(const FireStation&, const FireStation&) = default;
};

/// North-up geographic grid. Row 0 is the northernmost row.
struct RasterGrid {
    double west = 0.0;   // xllcorner
    double south = 0.0;  // yllcorner
    double cell_size = 0.0; // degrees
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    double nodata = -9999.0;
    std::vector<double> values; // row-major

    double north() const { return south + static_cast<double>(n_rows) * cell_size; }
    double east() const { return west + static_cast<double>(n_cols) * cell_size; }
    double at(std::size_t row, std::size_t col) const { return values[row * n_cols + col]; }
    bool is_nodata(double v) const { return v == nodata; }

    GeoPoint cell_center(std::size_t row, std::size_t col) const {
        return {north() - (static_cast<double>(row) + 0.5) * cell_size,
                west + (static_cast<double>(col) + 0.5) * cell_size};
    }

    /// Value of the cell containing p, or nullopt when p is off-grid or the
    /// cell is nodata.
    std::optional<double> sample(GeoPoint p) const;

    /// Same origin, cell size and shape.
    bool same_georeference(const RasterGrid& o) const {
        return west == o.west && south == o.south && cell_size == o.cell_size &&
               n_rows == o.n_rows && n_cols == o.n_cols;
    }

    friend bool operator==(const RasterGrid&, const RasterGrid&) = default;
};

struct GroundTruthDay {
    std::string fire_id;
    Date date;
    double personnel = 0.0;
    double daily_cost = 0.0; // million USD

    friend bool operator==(const GroundTruthDay&, const GroundTruthDay&) = default;
};

using GroundTruth = std::map<std::string, std::vector<GroundTruthDay>>;

struct WeatherDayGrids {
    Date date;
    RasterGrid bi;
    RasterGrid tmax; // K
    RasterGrid tmin; // K
    RasterGrid wind; // m/s
    RasterGrid fm1;  // percent
};

struct WeatherStreams {
    std::istream* bi = nullptr;
    std::istream* tmax = nullptr;
    std::istream* tmin = nullptr;
    std::istream* wind = nullptr;
    std::istream* fm1 = nullptr;
};

/// FIRMS-style CSV. Required columns: latitude, longitude, frp, brightness or
/// bright_ti4, acq_date, acq_time. `satellite` is optional.
std::vector<Hotspot> parse_hotspots(std::istream& in);
void write_hotspots(std::ostream& out, const std::vector<Hotspot>& hotspots);

/// GeoJSON FeatureCollection of Point features with `id` and `name` properties.
std::vector<FireStation> parse_stations(std::istream& in);
void write_stations(std::ostream& out, const std::vector<FireStation>& stations);

/// ASCII grid: ncols, nrows, xllcorner, yllcorner, cellsize, NODATA_value
/// header lines followed by whitespace-separated values, north row first.
RasterGrid load_raster(std::istream& in);
void write_raster(std::ostream& out, const RasterGrid& grid);

/// CSV with header `fire_id,date,personnel,daily_cost_musd`.
GroundTruth parse_ground_truth(std::istream& in);
void write_ground_truth(std::ostream& out, const GroundTruth& truth);

WeatherDayGrids parse_weather_day(const WeatherStreams& streams, Date date);

// Path-based conveniences; throw gal::Error(runtime) when a file can't be opened.
std::vector<Hotspot> read_hotspots_file(const std::string& path);
std::vector<FireStation> read_stations_file(const std::string& path);
RasterGrid read_raster_file(const std::string& path);
GroundTruth read_ground_truth_file(const std::string& path);

/// Minutes since midnight for FIRMS "HHMM" (leading zeros optional).
int parse_acq_time(const std::string& text);

} // namespace gal
