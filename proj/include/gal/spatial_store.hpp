#pragma once

// Embedded spatial query layer: packed R-tree indexes over stations and
// county boundaries, plus zonal statistics over raster grids. Every query
// returns exactly what a linear scan over the same inputs would.

#include "gal/geo.hpp"
#include "gal/ingest.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gal {

struct CountyFeature {
    std::string county_id;
    std::string name;
    Polygon boundary;
    double population = 0.0;
};

/// GeoJSON FeatureCollection of Polygon features with `county_id`, `name` and
/// `population` properties. Only the exterior ring is used.
std::vector<CountyFeature> parse_counties(std::istream& in);
std::vector<CountyFeature> read_counties_file(const std::string& path);

/// Static R-tree over bounding boxes, bulk-loaded with sort-tile-recursive
/// packing. Entries are identified by their position in the input.
class PackedRTree {
public:
    static constexpr std::size_t kNodeCapacity = 8;

    PackedRTree() = default;
    explicit PackedRTree(const std::vector<BBox>& boxes);

    std::size_t size() const { return n_entries_; }

    /// Indices of entries whose box intersects `query`, ascending.
    std::vector<std::size_t> search(const BBox& query) const;

    struct Node {
        BBox box;
        std::size_t first = 0; // first child node, or first entry for leaves
        std::size_t count = 0;
        bool leaf = false;
    };
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t root() const { return nodes_.empty() ? 0 : nodes_.size() - 1; }
    std::size_t entry(std::size_t slot) const { return order_[slot]; }
    const BBox& entry_box(std::size_t slot) const { return boxes_[order_[slot]]; }

private:
    std::vector<BBox> boxes_;
    std::vector<std::size_t> order_; // leaf slots -> entry index
    std::vector<Node> nodes_;        // root stored last
    std::size_t n_entries_ = 0;
};

/// Lower bound on the great-circle distance from p to any point in `box`.
double min_distance_to_box(GeoPoint p, const BBox& box);

struct StationHit {
    const FireStation* station = nullptr;
    double distance_m = 0.0;
};

class StationIndex {
public:
    StationIndex() = default;
    explicit StationIndex(std::vector<FireStation> stations);

    const std::vector<FireStation>& stations() const { return stations_; }

    /// k nearest by great-circle distance, ascending; ties by station id.
    std::vector<StationHit> nearest(GeoPoint p, std::size_t k = 3) const;

    /// Stations at distance <= radius_m.
    std::vector<const FireStation*> within(GeoPoint p, double radius_m) const;
    std::size_t count_within(GeoPoint p, double radius_m) const { return within(p, radius_m).size(); }

private:
    std::vector<FireStation> stations_;
    PackedRTree tree_;
};

class CountyIndex {
public:
    CountyIndex() = default;
    explicit CountyIndex(std::vector<CountyFeature> counties);

    const std::vector<CountyFeature>& counties() const { return counties_; }

    /// Counties whose boundary intersects `poly`, ordered by county_id.
    std::vector<const CountyFeature*> intersecting(const Polygon& poly) const;

    /// Counties within `buffer_m` of `poly` (intersecting ones included),
    /// ordered by county_id.
    std::vector<const CountyFeature*> within_buffer(const Polygon& poly, double buffer_m) const;

private:
    std::vector<CountyFeature> counties_;
    PackedRTree tree_;
};

// Free-function forms of the station queries.
std::vector<StationHit> nearest_stations(GeoPoint p, const StationIndex& index, std::size_t k = 3);
std::size_t stations_within(GeoPoint p, const StationIndex& index, double radius_m);
std::vector<const CountyFeature*> counties_intersecting(const Polygon& poly,
                                                        const CountyIndex& index);

/// Cells of `grid` whose centre lies inside `poly` and whose value is not
/// nodata, as a window-local mask.
struct CoveredCells {
    std::size_t row0 = 0;
    std::size_t col0 = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> mask; // rows * cols
    std::size_t count = 0;

    bool covered(std::size_t r, std::size_t c) const { return mask[r * cols + c] != 0; }
};

CoveredCells covered_cells(const RasterGrid& grid, const Polygon& poly);

struct ZonalSum {
    double value = 0.0;
    std::size_t cells = 0;
    bool coverage_warning = false; // no non-nodata cell centre inside the polygon
};

ZonalSum zonal_sum(const RasterGrid& grid, const Polygon& poly);

struct ZonalComposition {
    std::map<int, double> proportions; // class code -> share of covered cells
    std::map<int, std::size_t> counts;
    std::size_t cells = 0;
    bool coverage_warning = false;
};

ZonalComposition zonal_composition(const RasterGrid& grid, const Polygon& poly);

} // namespace gal
