#include "gal/footprint.hpp"

#include "gal/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <tuple>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace gal {

bool canonical_less(const Hotspot& a, const Hotspot& b) {
    return std::tie(a.lat, a.lon, a.acq_date, a.acq_time, a.frp, a.brightness, a.satellite) <
           std::tie(b.lat, b.lon, b.acq_date, b.acq_time, b.frp, b.brightness, b.satellite);
}

// ---------------------------------------------------------------- DBSCAN

namespace {

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Neighbour lists (self included) using a latitude sweep. The great-circle
// distance is never smaller than R * |dlat|, so the sweep window only
// discards points that cannot be neighbours.
std::vector<std::vector<std::size_t>> neighbour_lists(const std::vector<Hotspot>& pts,
                                                      double eps_m) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> by_lat(n);
    std::iota(by_lat.begin(), by_lat.end(), 0);
    std::sort(by_lat.begin(), by_lat.end(),
              [&](std::size_t a, std::size_t b) { return pts[a].lat < pts[b].lat; });

    const double window_deg = eps_m / kEarthRadiusM * 180.0 / std::numbers::pi * (1.0 + 1e-9);
    std::vector<std::vector<std::size_t>> out(n);
    std::size_t lo = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Hotspot& p = pts[by_lat[i]];
        while (pts[by_lat[lo]].lat < p.lat - window_deg) ++lo;
        for (std::size_t j = lo; j < n && pts[by_lat[j]].lat <= p.lat + window_deg; ++j) {
            if (geodesic_distance(p.position(), pts[by_lat[j]].position()) <= eps_m)
                out[by_lat[i]].push_back(by_lat[j]);
        }
    }
    for (auto& list : out) std::sort(list.begin(), list.end());
    return out;
}

} // namespace

Partition dbscan_indices(const std::vector<Hotspot>& hotspots, double eps_m, std::size_t min_pts) {
    require(eps_m > 0.0, "cluster_hotspots: eps_m must be positive");
    require(min_pts >= 1, "cluster_hotspots: min_pts must be >= 1");
    const std::size_t n = hotspots.size();
    Partition result;
    if (n == 0) return result;

    const auto nbrs = neighbour_lists(hotspots, eps_m);
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = nbrs[i].size() >= min_pts;

    DisjointSet sets(n);
    for (std::size_t i = 0; i < n; ++i)
        if (core[i])
            for (std::size_t j : nbrs[i])
                if (core[j]) sets.unite(i, j);

    constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
    std::vector<std::size_t> root(n, unassigned);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            root[i] = sets.find(i);
            continue;
        }
        std::size_t best = unassigned;
        double best_d = 0.0;
        for (std::size_t j : nbrs[i]) {
            if (!core[j]) continue;
            const double d = geodesic_distance(hotspots[i].position(), hotspots[j].position());
            if (best == unassigned || d < best_d ||
                (d == best_d && canonical_less(hotspots[j], hotspots[best]))) {
                best = j;
                best_d = d;
            }
        }
        if (best != unassigned) root[i] = sets.find(best);
    }

    // Roots are the lowest core index in each component, but a border point can
    // have a lower index than every core; order clusters by first member seen.
    std::vector<std::size_t> slot(n, unassigned);
    for (std::size_t i = 0; i < n; ++i) {
        if (root[i] == unassigned) {
            result.noise.push_back(i);
            continue;
        }
        if (slot[root[i]] == unassigned) {
            slot[root[i]] = result.clusters.size();
            result.clusters.emplace_back();
        }
        result.clusters[slot[root[i]]].push_back(i);
    }
    return result;
}

Clustering cluster_hotspots(const std::vector<Hotspot>& hotspots, double eps_m,
                            std::size_t min_pts) {
    const Partition p = dbscan_indices(hotspots, eps_m, min_pts);
    Clustering out;
    for (const auto& idx : p.clusters) {
        auto& members = out.clusters.emplace_back();
        for (std::size_t i : idx) members.push_back(hotspots[i]);
    }
    for (std::size_t i : p.noise) out.noise.push_back(hotspots[i]);
    return out;
}

// ---------------------------------------------------------------- geometry

GeoPoint frp_weighted_centroid(const std::vector<Hotspot>& members) {
    require(!members.empty(), "frp_weighted_centroid: no members");
    std::vector<const Hotspot*> ordered;
    for (const Hotspot& h : members) ordered.push_back(&h);
    std::sort(ordered.begin(), ordered.end(),
              [](const Hotspot* a, const Hotspot* b) { return canonical_less(*a, *b); });

    double w_sum = 0.0, lat_sum = 0.0, lon_sum = 0.0;
    for (const Hotspot* h : ordered) {
        w_sum += h->frp;
        lat_sum += h->frp * h->lat;
        lon_sum += h->frp * h->lon;
    }
    if (w_sum > 0.0) return {lat_sum / w_sum, lon_sum / w_sum};

    lat_sum = lon_sum = 0.0;
    for (const Hotspot* h : ordered) {
        lat_sum += h->lat;
        lon_sum += h->lon;
    }
    const double n = static_cast<double>(ordered.size());
    return {lat_sum / n, lon_sum / n};
}

std::vector<GeoPoint> convex_hull(std::vector<GeoPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](GeoPoint a, GeoPoint b) {
        return std::tie(a.lon, a.lat) < std::tie(b.lon, b.lat);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    auto turn = [](GeoPoint o, GeoPoint a, GeoPoint b) {
        return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
    };
    std::vector<GeoPoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const GeoPoint& p : pts) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

Polygon circle_polygon(GeoPoint center, double radius_m) {
    const LocalFrame frame(center);
    std::vector<GeoPoint> ring;
    for (int i = 0; i < kCircleSegments; ++i) {
        const double a = 2.0 * std::numbers::pi * i / kCircleSegments;
        ring.push_back(frame.to_geo({radius_m * std::cos(a), radius_m * std::sin(a)}));
    }
    return Polygon::from_ring(std::move(ring));
}

Polygon segment_buffer(GeoPoint a, GeoPoint b, GeoPoint center, double half_width_m) {
    const LocalFrame frame(center);
    const auto pa = frame.to_xy(a), pb = frame.to_xy(b);
    const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
    const double ux = (pb.x - pa.x) / len, uy = (pb.y - pa.y) / len;
    const double nx = -uy * half_width_m, ny = ux * half_width_m;
    const double ex = ux * half_width_m, ey = uy * half_width_m;
    std::vector<GeoPoint> ring{
        frame.to_geo({pa.x - ex - nx, pa.y - ey - ny}),
        frame.to_geo({pb.x + ex - nx, pb.y + ey - ny}),
        frame.to_geo({pb.x + ex + nx, pb.y + ey + ny}),
        frame.to_geo({pa.x - ex + nx, pa.y - ey + ny}),
    };
    return Polygon::from_ring(std::move(ring));
}

} // namespace

Polygon footprint_polygon(const std::vector<Hotspot>& members, GeoPoint center) {
    require(!members.empty(), "footprint_polygon: no members");
    std::vector<GeoPoint> pts;
    for (const Hotspot& h : members) pts.push_back(h.position());
    const std::vector<GeoPoint> hull = convex_hull(pts);

    if (hull.size() >= 3) return Polygon::from_ring(hull);
    if (hull.size() == 2) {
        // Collinear or two points: the hull keeps just the two extremes.
        if (geodesic_distance(hull[0], hull[1]) > 0.0)
            return segment_buffer(hull[0], hull[1], center, kDegenerateBufferM);
    }
    return circle_polygon(center, kDegenerateBufferM);
}

Polygon footprint_polygon(const std::vector<Hotspot>& members) {
    return footprint_polygon(members, frp_weighted_centroid(members));
}

EventDayGeometry normalize_event_day(Date date, const std::vector<Hotspot>& hotspots, double eps_m,
                                     std::size_t min_pts) {
    for (std::size_t i = 0; i < hotspots.size(); ++i)
        if (hotspots[i].acq_date != date)
            fail(ErrorKind::precondition,
                 fmt::format("normalize_event_day: hotspot {} dated {} on day {}", i,
                             hotspots[i].acq_date.iso(), date.iso()));

    EventDayGeometry g;
    g.date = date;
    Clustering c = cluster_hotspots(hotspots, eps_m, min_pts);
    g.noise_points = std::move(c.noise);
    std::sort(g.noise_points.begin(), g.noise_points.end(), canonical_less);
    for (auto& members : c.clusters) std::sort(members.begin(), members.end(), canonical_less);
    // Ids follow the canonical order of each cluster's first member, so they
    // do not depend on input row order.
    std::sort(c.clusters.begin(), c.clusters.end(),
              [](const auto& a, const auto& b) { return canonical_less(a.front(), b.front()); });
    for (std::size_t id = 0; id < c.clusters.size(); ++id) {
        Cluster cl;
        cl.cluster_id = static_cast<int>(id);
        cl.members = std::move(c.clusters[id]);
        cl.centroid = frp_weighted_centroid(cl.members);
        cl.footprint = footprint_polygon(cl.members, cl.centroid);
        cl.area_acres = geodesic_area_m2(cl.footprint) / kSqMetersPerAcre;
        g.clusters.push_back(std::move(cl));
    }
    return g;
}

void write_geometry_geojson(std::ostream& out, const EventDayGeometry& g) {
    using json = nlohmann::json;
    json features = json::array();
    for (const Cluster& c : g.clusters) {
        json ring = json::array();
        for (const GeoPoint& p : c.footprint.ring()) ring.push_back({p.lon, p.lat});
        double sum_frp = 0.0;
        for (const Hotspot& h : c.members) sum_frp += h.frp;
        features.push_back({
            {"type", "Feature"},
            {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
            {"properties",
             {{"cluster_id", c.cluster_id},
              {"member_count", c.members.size()},
              {"sum_frp", sum_frp},
              {"area_acres", c.area_acres},
              {"centroid", {c.centroid.lon, c.centroid.lat}}}},
        });
    }
    json doc{{"type", "FeatureCollection"},
             {"date", g.date.iso()},
             {"noise_points", g.noise_points.size()},
             {"features", features}};
    out << doc.dump(1) << '\n';
}

} // namespace gal
