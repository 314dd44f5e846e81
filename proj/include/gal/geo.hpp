#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace gal {

inline constexpr double kEarthRadiusM = 6371008.8;    // mean Earth radius
inline constexpr double kSqMetersPerAcre = 4046.8564224;
inline constexpr double kMetersPerMile = 1609.344;

struct GeoPoint {
    double lat = 0.0; // degrees WGS84
    double lon = 0.0;

    friend constexpr auto operator<=>(const GeoPoint&, const GeoPoint&) = default;
};

bool valid_coordinates(double lat, double lon);

struct BBox {
    double min_lat = 0.0;
    double min_lon = 0.0;
    double max_lat = 0.0;
    double max_lon = 0.0;

    bool intersects(const BBox& o) const {
        return min_lat <= o.max_lat && o.min_lat <= max_lat && min_lon <= o.max_lon &&
               o.min_lon <= max_lon;
    }
    bool contains(GeoPoint p) const {
        return min_lat <= p.lat && p.lat <= max_lat && min_lon <= p.lon && p.lon <= max_lon;
    }
    void expand(const BBox& o);
};

/// Simple polygon with a closed exterior ring (first vertex repeated last).
/// Construction validates: >= 3 distinct vertices, no self-intersection,
/// non-zero area.
class Polygon {
public:
    Polygon() = default;

    /// Accepts an open or closed ring. Throws gal::Error(precondition) when
    /// the ring is degenerate or self-intersecting.
    static Polygon from_ring(std::vector<GeoPoint> ring);

    const std::vector<GeoPoint>& ring() const { return ring_; }
    const BBox& bbox() const { return bbox_; }
    bool empty() const { return ring_.empty(); }

    // Structure-of-arrays view of the ring (x = lon, y = lat), for kernels.
    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }

private:
    std::vector<GeoPoint> ring_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    BBox bbox_;
};

/// Haversine great-circle distance in meters.
double geodesic_distance(GeoPoint a, GeoPoint b);

/// Spherical-excess area of the polygon in square meters.
double geodesic_area_m2(const Polygon& poly);

/// Sum of great-circle edge lengths in meters.
double geodesic_perimeter_m(const Polygon& poly);

/// Even-odd test; vertices and edges count as inside.
bool point_in_polygon(GeoPoint p, const Polygon& poly);

/// Batch form of point_in_polygon over a structure-of-arrays point set.
void points_in_polygon(std::span<const double> lats, std::span<const double> lons,
                       const Polygon& poly, std::span<std::uint8_t> out);

/// True when the closed regions share at least one point.
bool polygons_intersect(const Polygon& a, const Polygon& b);

/// Minimum distance between the two boundaries in meters, 0 when the
/// polygons intersect. Evaluated in a local tangent plane, so only meaningful
/// for separations up to a few tens of kilometres.
double polygon_gap_m(const Polygon& a, const Polygon& b);

bool segments_intersect(GeoPoint a1, GeoPoint a2, GeoPoint b1, GeoPoint b2);

/// Equirectangular tangent plane around an origin, in meters.
class LocalFrame {
public:
    explicit LocalFrame(GeoPoint origin);

    struct Xy {
        double x = 0.0; // east
        double y = 0.0; // north
    };

    Xy to_xy(GeoPoint p) const;
    GeoPoint to_geo(Xy p) const;

private:
    GeoPoint origin_;
    double cos_lat_;
};

} // namespace gal
