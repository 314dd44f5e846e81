#include "gal/spatial_store.hpp"

#include "gal/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace gal {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

BBox point_box(GeoPoint p) { return {p.lat, p.lon, p.lat, p.lon}; }

double center_lon(const BBox& b) { return 0.5 * (b.min_lon + b.max_lon); }
double center_lat(const BBox& b) { return 0.5 * (b.min_lat + b.max_lat); }

// Sort-tile-recursive grouping of `items` (indices into `boxes`) into runs of
// at most `cap`.
std::vector<std::vector<std::size_t>> str_groups(std::vector<std::size_t> items,
                                                 const std::vector<BBox>& boxes, std::size_t cap) {
    const std::size_t n = items.size();
    const auto leaves = (n + cap - 1) / cap;
    const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));
    const std::size_t per_slice = slices * cap;

    std::stable_sort(items.begin(), items.end(), [&](std::size_t a, std::size_t b) {
        return center_lon(boxes[a]) < center_lon(boxes[b]);
    });
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < n; s += per_slice) {
        const auto end = items.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + per_slice));
        std::stable_sort(items.begin() + static_cast<std::ptrdiff_t>(s), end,
                         [&](std::size_t a, std::size_t b) {
                             return center_lat(boxes[a]) < center_lat(boxes[b]);
                         });
        for (std::size_t g = s; g < std::min(n, s + per_slice); g += cap)
            groups.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(g),
                                items.begin() + static_cast<std::ptrdiff_t>(std::min(n, g + cap)));
    }
    return groups;
}

double wrapped_lon_gap_rad(double lon, double edge) {
    double d = std::fmod(std::abs(lon - edge), 360.0);
    if (d > 180.0) d = 360.0 - d;
    return d * kDegToRad;
}

} // namespace

// ---------------------------------------------------------------- counties

std::vector<CountyFeature> parse_counties(std::istream& in) {
    using json = nlohmann::json;
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::format, fmt::format("counties GeoJSON: {}", e.what()));
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array())
        fail(ErrorKind::format, "counties GeoJSON: expected a FeatureCollection");

    std::vector<CountyFeature> out;
    std::set<std::string> seen;
    const json& features = doc["features"];
    for (std::size_t i = 0; i < features.size(); ++i) {
        const json& feat = features[i];
        const auto where = fmt::format("county feature {}", i);
        const json geom = feat.value("geometry", json::object());
        if (geom.value("type", "") != "Polygon")
            fail(ErrorKind::format, where + ": geometry must be a Polygon");
        const json rings = geom.value("coordinates", json::array());
        if (!rings.is_array() || rings.empty() || !rings[0].is_array())
            fail(ErrorKind::format, where + ": malformed Polygon coordinates");

        std::vector<GeoPoint> ring;
        for (const json& c : rings[0]) {
            if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number())
                fail(ErrorKind::format, where + ": malformed vertex");
            ring.push_back({c[1].get<double>(), c[0].get<double>()});
        }

        CountyFeature cf;
        const json props = feat.value("properties", json::object());
        if (!props.contains("county_id") || props["county_id"].is_null())
            fail(ErrorKind::format, where + ": missing county_id");
        cf.county_id = props["county_id"].is_string() ? props["county_id"].get<std::string>()
                                                      : props["county_id"].dump();
        cf.name = props.value("name", std::string{});
        const json pop = props.value("population", json(0));
        if (!pop.is_number() || pop.get<double>() < 0.0)
            fail(ErrorKind::format, where + ": population must be a non-negative number");
        cf.population = pop.get<double>();
        try {
            cf.boundary = Polygon::from_ring(std::move(ring));
        } catch (const Error& e) {
            fail(ErrorKind::format, fmt::format("{}: {}", where, e.what()));
        }
        if (!seen.insert(cf.county_id).second)
            fail(ErrorKind::conflict, fmt::format("{}: duplicate county_id '{}'", where, cf.county_id));
        out.push_back(std::move(cf));
    }
    return out;
}

std::vector<CountyFeature> read_counties_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::runtime, fmt::format("cannot open '{}'", path));
    try {
        return parse_counties(in);
    } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("{}: {}", path, e.what()));
    }
}

// ---------------------------------------------------------------- R-tree

PackedRTree::PackedRTree(const std::vector<BBox>& boxes) : boxes_(boxes), n_entries_(boxes.size()) {
    if (boxes.empty()) return;

    std::vector<std::size_t> all(boxes.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<BBox> level_boxes;
    std::vector<std::size_t> level;
    for (const auto& group : str_groups(all, boxes_, kNodeCapacity)) {
        Node node;
        node.leaf = true;
        node.first = order_.size();
        node.count = group.size();
        node.box = boxes_[group.front()];
        for (std::size_t e : group) {
            order_.push_back(e);
            node.box.expand(boxes_[e]);
        }
        level.push_back(nodes_.size());
        nodes_.push_back(node);
    }

    // Children of an internal node are stored contiguously, so each level is
    // re-emitted in grouped order before its parents are appended.
    while (level.size() > 1) {
        std::vector<BBox> child_boxes;
        for (std::size_t id : level) child_boxes.push_back(nodes_[id].box);
        std::vector<std::size_t> local(level.size());
        std::iota(local.begin(), local.end(), 0);

        std::vector<std::size_t> next;
        for (const auto& group : str_groups(local, child_boxes, kNodeCapacity)) {
            Node parent;
            parent.first = nodes_.size();
            parent.count = group.size();
            parent.box = child_boxes[group.front()];
            for (std::size_t g : group) {
                nodes_.push_back(nodes_[level[g]]);
                parent.box.expand(child_boxes[g]);
            }
            next.push_back(nodes_.size());
            nodes_.push_back(parent);
        }
        level = std::move(next);
    }
    // Move the root to the end so root() can find it.
    if (level.front() != nodes_.size() - 1) nodes_.push_back(nodes_[level.front()]);
}

std::vector<std::size_t> PackedRTree::search(const BBox& query) const {
    std::vector<std::size_t> out;
    if (nodes_.empty()) return out;
    std::vector<std::size_t> stack{root()};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (!node.box.intersects(query)) continue;
        for (std::size_t i = 0; i < node.count; ++i) {
            if (node.leaf) {
                if (boxes_[order_[node.first + i]].intersects(query))
                    out.push_back(order_[node.first + i]);
            } else {
                stack.push_back(node.first + i);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double min_distance_to_box(GeoPoint p, const BBox& box) {
    double dlat = 0.0;
    if (p.lat < box.min_lat) dlat = (box.min_lat - p.lat) * kDegToRad;
    else if (p.lat > box.max_lat) dlat = (p.lat - box.max_lat) * kDegToRad;

    double dlon = 0.0;
    const bool lon_inside = box.min_lon <= p.lon && p.lon <= box.max_lon;
    if (!lon_inside)
        dlon = std::min(wrapped_lon_gap_rad(p.lon, box.min_lon),
                        wrapped_lon_gap_rad(p.lon, box.max_lon));

    const double cos_box = std::max(
        0.0, std::min(std::cos(box.min_lat * kDegToRad), std::cos(box.max_lat * kDegToRad)));
    const double s1 = std::sin(dlat / 2.0), s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(p.lat * kDegToRad) * cos_box * s2 * s2;
    // Shave a relative epsilon so rounding can never push the bound above the
    // true distance.
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h))) * (1.0 - 1e-12);
}

// ---------------------------------------------------------------- stations

StationIndex::StationIndex(std::vector<FireStation> stations) : stations_(std::move(stations)) {
    std::vector<BBox> boxes;
    for (const FireStation& s : stations_) boxes.push_back(point_box(s.position()));
    tree_ = PackedRTree(boxes);
}

std::vector<StationHit> StationIndex::nearest(GeoPoint p, std::size_t k) const {
    require(k >= 1, "nearest_stations: k must be >= 1");
    std::vector<StationHit> best; // sorted by (distance, id), at most k
    if (stations_.empty()) return best;

    auto hit_less = [](const StationHit& a, const StationHit& b) {
        return a.distance_m != b.distance_m ? a.distance_m < b.distance_m
                                            : a.station->id < b.station->id;
    };

    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    const auto& nodes = tree_.nodes();
    frontier.emplace(min_distance_to_box(p, nodes[tree_.root()].box), tree_.root());

    while (!frontier.empty()) {
        const auto [bound, id] = frontier.top();
        frontier.pop();
        if (best.size() == k && bound > best.back().distance_m) break;
        const auto& node = nodes[id];
        for (std::size_t i = 0; i < node.count; ++i) {
            if (!node.leaf) {
                const std::size_t child = node.first + i;
                frontier.emplace(min_distance_to_box(p, nodes[child].box), child);
                continue;
            }
            const FireStation& s = stations_[tree_.entry(node.first + i)];
            StationHit hit{&s, geodesic_distance(p, s.position())};
            if (best.size() == k && !hit_less(hit, best.back())) continue;
            best.insert(std::upper_bound(best.begin(), best.end(), hit, hit_less), hit);
            if (best.size() > k) best.pop_back();
        }
    }
    return best;
}

std::vector<const FireStation*> StationIndex::within(GeoPoint p, double radius_m) const {
    require(radius_m > 0.0, "stations_within: radius must be positive");
    std::vector<const FireStation*> out;
    if (stations_.empty()) return out;
    const auto& nodes = tree_.nodes();
    std::vector<std::size_t> stack{tree_.root()};
    std::vector<std::size_t> hits;
    while (!stack.empty()) {
        const auto& node = nodes[stack.back()];
        stack.pop_back();
        if (min_distance_to_box(p, node.box) > radius_m) continue;
        for (std::size_t i = 0; i < node.count; ++i) {
            if (!node.leaf) {
                stack.push_back(node.first + i);
                continue;
            }
            const std::size_t e = tree_.entry(node.first + i);
            if (geodesic_distance(p, stations_[e].position()) <= radius_m) hits.push_back(e);
        }
    }
    std::sort(hits.begin(), hits.end());
    for (std::size_t e : hits) out.push_back(&stations_[e]);
    return out;
}

std::vector<StationHit> nearest_stations(GeoPoint p, const StationIndex& index, std::size_t k) {
    return index.nearest(p, k);
}

std::size_t stations_within(GeoPoint p, const StationIndex& index, double radius_m) {
    return index.count_within(p, radius_m);
}

// ---------------------------------------------------------------- counties index

CountyIndex::CountyIndex(std::vector<CountyFeature> counties) : counties_(std::move(counties)) {
    std::sort(counties_.begin(), counties_.end(),
              [](const auto& a, const auto& b) { return a.county_id < b.county_id; });
    std::vector<BBox> boxes;
    for (const CountyFeature& c : counties_) boxes.push_back(c.boundary.bbox());
    tree_ = PackedRTree(boxes);
}

std::vector<const CountyFeature*> CountyIndex::intersecting(const Polygon& poly) const {
    std::vector<const CountyFeature*> out;
    // Candidates come back in entry order, which is county_id order.
    for (std::size_t i : tree_.search(poly.bbox()))
        if (polygons_intersect(poly, counties_[i].boundary)) out.push_back(&counties_[i]);
    return out;
}

std::vector<const CountyFeature*> CountyIndex::within_buffer(const Polygon& poly,
                                                             double buffer_m) const {
    require(buffer_m >= 0.0, "county buffer must be non-negative");
    BBox q = poly.bbox();
    const double dlat = buffer_m / kEarthRadiusM / kDegToRad;
    const double max_abs_lat = std::min(89.0, std::max(std::abs(q.min_lat), std::abs(q.max_lat)) + dlat);
    const double dlon = dlat / std::cos(max_abs_lat * kDegToRad);
    q = {q.min_lat - dlat, q.min_lon - dlon, q.max_lat + dlat, q.max_lon + dlon};

    std::vector<const CountyFeature*> out;
    for (std::size_t i : tree_.search(q))
        if (polygon_gap_m(poly, counties_[i].boundary) <= buffer_m) out.push_back(&counties_[i]);
    return out;
}

std::vector<const CountyFeature*> counties_intersecting(const Polygon& poly,
                                                        const CountyIndex& index) {
    return index.intersecting(poly);
}

// ---------------------------------------------------------------- zonal

CoveredCells covered_cells(const RasterGrid& g, const Polygon& poly) {
    CoveredCells cc;
    const BBox& b = poly.bbox();
    // Candidate window, one cell wider than strictly needed on each side;
    // containment itself is decided per cell centre below.
    const double c_lo = std::floor((b.min_lon - g.west) / g.cell_size) - 1.0;
    const double c_hi = std::ceil((b.max_lon - g.west) / g.cell_size) + 1.0;
    const double r_lo = std::floor((g.north() - b.max_lat) / g.cell_size) - 1.0;
    const double r_hi = std::ceil((g.north() - b.min_lat) / g.cell_size) + 1.0;
    const double max_c = static_cast<double>(g.n_cols) - 1.0;
    const double max_r = static_cast<double>(g.n_rows) - 1.0;
    if (c_hi < 0.0 || r_hi < 0.0 || c_lo > max_c || r_lo > max_r) return cc;

    cc.col0 = static_cast<std::size_t>(std::max(0.0, c_lo));
    cc.row0 = static_cast<std::size_t>(std::max(0.0, r_lo));
    cc.cols = static_cast<std::size_t>(std::min(max_c, c_hi)) - cc.col0 + 1;
    cc.rows = static_cast<std::size_t>(std::min(max_r, r_hi)) - cc.row0 + 1;
    cc.mask.assign(cc.rows * cc.cols, 0);

    std::vector<double> lats(cc.cols), lons(cc.cols);
    for (std::size_t c = 0; c < cc.cols; ++c) lons[c] = g.cell_center(cc.row0, cc.col0 + c).lon;
    for (std::size_t r = 0; r < cc.rows; ++r) {
        const double lat = g.cell_center(cc.row0 + r, cc.col0).lat;
        std::fill(lats.begin(), lats.end(), lat);
        std::span<std::uint8_t> row_mask(cc.mask.data() + r * cc.cols, cc.cols);
        points_in_polygon(lats, lons, poly, row_mask);
        for (std::size_t c = 0; c < cc.cols; ++c) {
            if (row_mask[c] && g.is_nodata(g.at(cc.row0 + r, cc.col0 + c))) row_mask[c] = 0;
            cc.count += row_mask[c];
        }
    }
    return cc;
}

ZonalSum zonal_sum(const RasterGrid& g, const Polygon& poly) {
    const CoveredCells cc = covered_cells(g, poly);
    ZonalSum out;
    for (std::size_t r = 0; r < cc.rows; ++r)
        for (std::size_t c = 0; c < cc.cols; ++c)
            if (cc.covered(r, c)) out.value += g.at(cc.row0 + r, cc.col0 + c);
    out.cells = cc.count;
    out.coverage_warning = cc.count == 0;
    return out;
}

ZonalComposition zonal_composition(const RasterGrid& g, const Polygon& poly) {
    const CoveredCells cc = covered_cells(g, poly);
    ZonalComposition out;
    for (std::size_t r = 0; r < cc.rows; ++r)
        for (std::size_t c = 0; c < cc.cols; ++c)
            if (cc.covered(r, c))
                ++out.counts[static_cast<int>(std::lround(g.at(cc.row0 + r, cc.col0 + c)))];
    out.cells = cc.count;
    out.coverage_warning = cc.count == 0;
    for (const auto& [cls, n] : out.counts)
        out.proportions[cls] = static_cast<double>(n) / static_cast<double>(cc.count);
    return out;
}

} // namespace gal
