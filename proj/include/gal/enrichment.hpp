#pragma once

// Per-cluster retrieval along four dimensions: terrain complexity (land
// cover), weather escalation, demographic exposure and station access.

#include "gal/footprint.hpp"
#include "gal/ingest.hpp"
#include "gal/spatial_store.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gal {

enum class RiskTier { high, medium, low, barrier };

std::string_view to_string(RiskTier tier);

/// Land-cover class code -> spread-risk tier. Codes not in the table are
/// "unclassified" and contribute nothing to risk or barrier mass.
struct NlcdMapping {
    std::map<int, RiskTier> tiers;
    double high_value = 1.0;
    double medium_value = 0.6;
    double low_value = 0.3;
    double barrier_value = 0.0;

    static NlcdMapping defaults();

    /// Lines of `code = tier` (tier in high|medium|low|barrier); `#` starts a
    /// comment. Optional `value.<tier> = x` lines override risk values.
    static NlcdMapping parse(std::istream& in);
    static NlcdMapping read_file(const std::string& path);

    std::optional<RiskTier> tier(int code) const;
    double risk_value(RiskTier t) const;
};

struct TerrainProfile {
    std::map<int, double> composition;
    double shannon_diversity = 0.0; // nats
    double fragmentation = 0.0;     // 4-connected patches per covered cell
    double risk_high = 0.0;
    double risk_medium = 0.0;
    double risk_low = 0.0;
    double continuous_fuels = 0.0;
    double barriers = 0.0;
    double unclassified = 0.0;
    double spread_potential = 0.0; // [0, 1]
    std::size_t covered_cells = 0;
};

struct FusedWeather {
    std::optional<double> bi;
    std::optional<double> tmax; // K
    std::optional<double> tmin; // K
    std::optional<double> wind; // m/s
    std::optional<double> fm1;  // percent

    friend bool operator==(const FusedWeather&, const FusedWeather&) = default;
};

struct ExposureProfile {
    std::optional<double> population; // absent when the footprint misses the population grid
    double density = 0.0;             // persons per km^2
    std::vector<std::string> counties;
    std::vector<std::string> county_names;
    std::vector<std::string> nearby_counties; // within the county buffer
};

struct StationCoverage {
    std::vector<std::pair<std::string, double>> nearest; // (station id, meters), ascending
    std::size_t density_10km = 0;
    std::vector<std::string> within_ids; // stations inside the density radius, sorted
};

/// H = -sum p ln p over p > 0.
double shannon_diversity(const std::map<int, double>& composition);

/// Number of 4-connected same-class patches among covered cells.
std::size_t count_patches(const RasterGrid& grid, const CoveredCells& cells);

/// Empty optional when the polygon covers no land-cover cell.
std::optional<TerrainProfile> terrain_profile(const RasterGrid& landcover, const Polygon& poly,
                                              const NlcdMapping& mapping = NlcdMapping::defaults());

/// Shares of each tier from a composition; spread potential is the
/// composition-weighted risk value.
TerrainProfile classify_composition(const std::map<int, double>& composition,
                                    const NlcdMapping& mapping);

/// Each field is the FRP-weighted mean of the grid cell under each hotspot
/// (uniform weights when all frp are 0). Hotspots on nodata or off-grid cells
/// are dropped from that field only.
FusedWeather weather_fusion(const std::vector<Hotspot>& members, const WeatherDayGrids& grids);

ExposureProfile exposure(const Polygon& poly, const RasterGrid* population,
                         const CountyIndex& counties, double county_buffer_m = 10000.0);

inline constexpr double kStationDensityRadiusM = 10000.0;

StationCoverage station_coverage(GeoPoint centroid, const StationIndex& stations,
                                 double radius_m = kStationDensityRadiusM);

} // namespace gal
