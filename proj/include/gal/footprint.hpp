#pragma once

// Event detection and normalization: DBSCAN over a day's hotspots, then an
// FRP-weighted centroid and a polygonal footprint per cluster.

#include "gal/date.hpp"
#include "gal/geo.hpp"
#include "gal/ingest.hpp"

#include <iosfwd>
#include <vector>

namespace gal {

inline constexpr double kDefaultEpsM = 3000.0;
inline constexpr std::size_t kDefaultMinPts = 3;
/// Half-width / radius of degenerate footprints; one VIIRS pixel.
inline constexpr double kDegenerateBufferM = 375.0;
inline constexpr int kCircleSegments = 16;

struct Cluster {
    int cluster_id = 0;
    std::vector<Hotspot> members; // canonical member order, see canonical_less
    GeoPoint centroid;
    Polygon footprint;
    double area_acres = 0.0;
};

struct EventDayGeometry {
    Date date;
    std::vector<Cluster> clusters;
    std::vector<Hotspot> noise_points;
};

/// Index-level DBSCAN result. Clusters hold input indices, ascending; clusters
/// are ordered by their lowest input index.
struct Partition {
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> noise;
};

/// Core points have >= min_pts neighbours within eps_m (self included).
/// A border point joins the cluster of its nearest core neighbour; exact
/// distance ties go to the core point that sorts first under canonical_less,
/// so the partition does not depend on input order.
Partition dbscan_indices(const std::vector<Hotspot>& hotspots, double eps_m = kDefaultEpsM,
                         std::size_t min_pts = kDefaultMinPts);

struct Clustering {
    std::vector<std::vector<Hotspot>> clusters;
    std::vector<Hotspot> noise;
};

Clustering cluster_hotspots(const std::vector<Hotspot>& hotspots, double eps_m = kDefaultEpsM,
                            std::size_t min_pts = kDefaultMinPts);

/// Planar FRP-weighted mean of member coordinates; unweighted when every frp is 0.
GeoPoint frp_weighted_centroid(const std::vector<Hotspot>& members);

/// Convex hull for >= 3 non-collinear members. Two points, or collinear
/// members, get a square-capped 375 m buffer around the full extent; a single
/// location gets a 16-gon of radius 375 m around `center`.
Polygon footprint_polygon(const std::vector<Hotspot>& members, GeoPoint center);
Polygon footprint_polygon(const std::vector<Hotspot>& members);

/// Convex hull of planar points (x = lon, y = lat), counter-clockwise, without
/// collinear vertices. Fewer than 3 points come back when the input is degenerate.
std::vector<GeoPoint> convex_hull(std::vector<GeoPoint> points);

/// Cluster ids are 0..n-1 in canonical order of each cluster's first member;
/// noise points are canonically sorted.
EventDayGeometry normalize_event_day(Date date, const std::vector<Hotspot>& hotspots,
                                     double eps_m = kDefaultEpsM,
                                     std::size_t min_pts = kDefaultMinPts);

/// Strict weak order on hotspots by every field; used wherever a
/// permutation-independent order is needed.
bool canonical_less(const Hotspot& a, const Hotspot& b);

/// FeatureCollection with one Polygon feature per cluster.
void write_geometry_geojson(std::ostream& out, const EventDayGeometry& geometry);

} // namespace gal
