#include "gal/geo.hpp"

#include "gal/error.hpp"
#include "gal/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gal {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double cross(GeoPoint o, GeoPoint a, GeoPoint b) {
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool on_segment(GeoPoint p, GeoPoint a, GeoPoint b) {
    return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
           std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double wrap_pi(double rad) {
    while (rad > std::numbers::pi) rad -= 2.0 * std::numbers::pi;
    while (rad <= -std::numbers::pi) rad += 2.0 * std::numbers::pi;
    return rad;
}

double planar_signed_area(const std::vector<GeoPoint>& closed) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < closed.size(); ++i)
        s += closed[i].lon * closed[i + 1].lat - closed[i + 1].lon * closed[i].lat;
    return 0.5 * s;
}

double point_segment_distance(LocalFrame::Xy p, LocalFrame::Xy a, LocalFrame::Xy b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

} // namespace

bool valid_coordinates(double lat, double lon) {
    return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
           lon >= -180.0 && lon <= 180.0;
}

void BBox::expand(const BBox& o) {
    min_lat = std::min(min_lat, o.min_lat);
    min_lon = std::min(min_lon, o.min_lon);
    max_lat = std::max(max_lat, o.max_lat);
    max_lon = std::max(max_lon, o.max_lon);
}

Polygon Polygon::from_ring(std::vector<GeoPoint> ring) {
    require(!ring.empty(), "polygon ring is empty");
    if (ring.front() != ring.back()) ring.push_back(ring.front());

    for (const GeoPoint& p : ring)
        require(valid_coordinates(p.lat, p.lon), "polygon vertex outside WGS84 bounds");

    std::vector<GeoPoint> distinct(ring.begin(), ring.end() - 1);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    require(distinct.size() >= 3, "polygon needs at least 3 distinct vertices");
    require(planar_signed_area(ring) != 0.0, "polygon has zero area");

    // Non-adjacent edges must not touch.
    const std::size_t n = ring.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            require(!segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1]),
                    "polygon ring is self-intersecting");
        }
    }

    Polygon poly;
    poly.ring_ = std::move(ring);
    poly.xs_.reserve(poly.ring_.size());
    poly.ys_.reserve(poly.ring_.size());
    poly.bbox_ = {poly.ring_[0].lat, poly.ring_[0].lon, poly.ring_[0].lat, poly.ring_[0].lon};
    for (const GeoPoint& p : poly.ring_) {
        poly.xs_.push_back(p.lon);
        poly.ys_.push_back(p.lat);
        poly.bbox_.expand({p.lat, p.lon, p.lat, p.lon});
    }
    return poly;
}

double geodesic_distance(GeoPoint a, GeoPoint b) {
    const double phi1 = a.lat * kDegToRad, phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0), s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double geodesic_area_m2(const Polygon& poly) {
    // Sum the signed excess of the triangles (pole, v_i, v_{i+1}).
    const auto& r = poly.ring();
    double excess = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double t1 = std::tan(r[i].lat * kDegToRad / 2.0);
        const double t2 = std::tan(r[i + 1].lat * kDegToRad / 2.0);
        const double dl = wrap_pi((r[i + 1].lon - r[i].lon) * kDegToRad);
        excess += 2.0 * std::atan2(std::tan(dl / 2.0) * (t1 + t2), 1.0 + t1 * t2);
    }
    return std::abs(excess) * kEarthRadiusM * kEarthRadiusM;
}

double geodesic_perimeter_m(const Polygon& poly) {
    const auto& r = poly.ring();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) total += geodesic_distance(r[i], r[i + 1]);
    return total;
}

bool point_in_polygon(GeoPoint p, const Polygon& poly) {
    std::uint8_t inside = 0;
    kernels::scalar_table().ring_contains(poly.xs().data(), poly.ys().data(), poly.xs().size(),
                                          &p.lon, &p.lat, 1, &inside);
    return inside != 0;
}

void points_in_polygon(std::span<const double> lats, std::span<const double> lons,
                       const Polygon& poly, std::span<std::uint8_t> out) {
    kernels::ring_contains(poly.xs(), poly.ys(), lons, lats, out);
}

bool segments_intersect(GeoPoint a1, GeoPoint a2, GeoPoint b1, GeoPoint b2) {
    const int d1 = sign(cross(b1, b2, a1));
    const int d2 = sign(cross(b1, b2, a2));
    const int d3 = sign(cross(a1, a2, b1));
    const int d4 = sign(cross(a1, a2, b2));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on_segment(a1, b1, b2)) return true;
    if (d2 == 0 && on_segment(a2, b1, b2)) return true;
    if (d3 == 0 && on_segment(b1, a1, a2)) return true;
    if (d4 == 0 && on_segment(b2, a1, a2)) return true;
    return false;
}

bool polygons_intersect(const Polygon& a, const Polygon& b) {
    if (!a.bbox().intersects(b.bbox())) return false;
    const auto& ra = a.ring();
    const auto& rb = b.ring();
    for (std::size_t i = 0; i + 1 < ra.size(); ++i)
        for (std::size_t j = 0; j + 1 < rb.size(); ++j)
            if (segments_intersect(ra[i], ra[i + 1], rb[j], rb[j + 1])) return true;
    // No boundary crossings: either disjoint or one nested in the other.
    return point_in_polygon(ra[0], b) || point_in_polygon(rb[0], a);
}

double polygon_gap_m(const Polygon& a, const Polygon& b) {
    if (polygons_intersect(a, b)) return 0.0;
    const LocalFrame frame(a.ring()[0]);
    std::vector<LocalFrame::Xy> pa, pb;
    for (const GeoPoint& p : a.ring()) pa.push_back(frame.to_xy(p));
    for (const GeoPoint& p : b.ring()) pb.push_back(frame.to_xy(p));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pa.size(); ++i)
        for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
            best = std::min(best, point_segment_distance(pa[i], pb[j], pb[j + 1]));
            best = std::min(best, point_segment_distance(pb[j], pa[i], pa[i + 1]));
        }
    return best;
}

LocalFrame::LocalFrame(GeoPoint origin)
    : origin_(origin), cos_lat_(std::cos(origin.lat * kDegToRad)) {}

LocalFrame::Xy LocalFrame::to_xy(GeoPoint p) const {
    return {(p.lon - origin_.lon) * kDegToRad * kEarthRadiusM * cos_lat_,
            (p.lat - origin_.lat) * kDegToRad * kEarthRadiusM};
}

GeoPoint LocalFrame::to_geo(Xy p) const {
    return {origin_.lat + p.y / (kEarthRadiusM * kDegToRad),
            origin_.lon + p.x / (kEarthRadiusM * kDegToRad * cos_lat_)};
}

} // namespace gal
