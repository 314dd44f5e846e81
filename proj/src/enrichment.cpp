#include "gal/enrichment.hpp"

#include "gal/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <fmt/format.h>

namespace gal {

std::string_view to_string(RiskTier tier) {
    switch (tier) {
    case RiskTier::high: return "high";
    case RiskTier::medium: return "medium";
    case RiskTier::low: return "low";
    case RiskTier::barrier: return "barrier";
    }
    return "unknown";
}

namespace {

std::optional<RiskTier> tier_from_string(std::string_view s) {
    if (s == "high") return RiskTier::high;
    if (s == "medium") return RiskTier::medium;
    if (s == "low") return RiskTier::low;
    if (s == "barrier") return RiskTier::barrier;
    return std::nullopt;
}

std::string strip(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

} // namespace

NlcdMapping NlcdMapping::defaults() {
    NlcdMapping m;
    for (int c : {41, 42, 43, 52}) m.tiers[c] = RiskTier::high;   // forest, shrub
    for (int c : {71, 81, 82}) m.tiers[c] = RiskTier::medium;     // grass, pasture, crops
    for (int c : {21, 22}) m.tiers[c] = RiskTier::low;            // open / low-intensity developed
    for (int c : {11, 12, 23, 24, 31}) m.tiers[c] = RiskTier::barrier; // water, ice, dense developed, barren
    return m;
}

NlcdMapping NlcdMapping::parse(std::istream& in) {
    NlcdMapping m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::format, fmt::format("NLCD mapping line {}: expected key = value", lineno));
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));

        if (key.rfind("value.", 0) == 0) {
            const auto t = tier_from_string(key.substr(6));
            double v = 0.0;
            std::istringstream vs(value);
            if (!t || !(vs >> v) || v < 0.0 || v > 1.0)
                fail(ErrorKind::format, fmt::format("NLCD mapping line {}: bad risk value", lineno));
            switch (*t) {
            case RiskTier::high: m.high_value = v; break;
            case RiskTier::medium: m.medium_value = v; break;
            case RiskTier::low: m.low_value = v; break;
            case RiskTier::barrier: m.barrier_value = v; break;
            }
            continue;
        }
        int code = 0;
        std::istringstream ks(key);
        const auto t = tier_from_string(value);
        if (!(ks >> code) || !ks.eof() || !t)
            fail(ErrorKind::format, fmt::format("NLCD mapping line {}: bad entry '{}'", lineno, line));
        if (!m.tiers.emplace(code, *t).second)
            fail(ErrorKind::conflict, fmt::format("NLCD mapping line {}: duplicate code {}", lineno, code));
    }
    return m;
}

NlcdMapping NlcdMapping::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::runtime, fmt::format("cannot open '{}'", path));
    return parse(in);
}

std::optional<RiskTier> NlcdMapping::tier(int code) const {
    if (auto it = tiers.find(code); it != tiers.end()) return it->second;
    return std::nullopt;
}

double NlcdMapping::risk_value(RiskTier t) const {
    switch (t) {
    case RiskTier::high: return high_value;
    case RiskTier::medium: return medium_value;
    case RiskTier::low: return low_value;
    case RiskTier::barrier: return barrier_value;
    }
    return 0.0;
}

double shannon_diversity(const std::map<int, double>& composition) {
    double h = 0.0;
    for (const auto& [cls, p] : composition)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

std::size_t count_patches(const RasterGrid& g, const CoveredCells& cc) {
    std::vector<std::uint8_t> seen(cc.mask.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t patches = 0;
    auto cls = [&](std::size_t r, std::size_t c) { return g.at(cc.row0 + r, cc.col0 + c); };

    for (std::size_t start = 0; start < cc.mask.size(); ++start) {
        if (!cc.mask[start] || seen[start]) continue;
        ++patches;
        seen[start] = 1;
        stack.push_back(start);
        const double label = cls(start / cc.cols, start % cc.cols);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            const std::size_t r = cur / cc.cols, c = cur % cc.cols;
            auto visit = [&](std::size_t rr, std::size_t c2) {
                const std::size_t idx = rr * cc.cols + c2;
                if (cc.mask[idx] && !seen[idx] && cls(rr, c2) == label) {
                    seen[idx] = 1;
                    stack.push_back(idx);
                }
            };
            if (r > 0) visit(r - 1, c);
            if (r + 1 < cc.rows) visit(r + 1, c);
            if (c > 0) visit(r, c - 1);
            if (c + 1 < cc.cols) visit(r, c + 1);
        }
    }
    return patches;
}

TerrainProfile classify_composition(const std::map<int, double>& composition,
                                    const NlcdMapping& mapping) {
    TerrainProfile t;
    t.composition = composition;
    t.shannon_diversity = shannon_diversity(composition);
    for (const auto& [code, p] : composition) {
        const auto tier = mapping.tier(code);
        if (!tier) {
            t.unclassified += p;
            continue;
        }
        switch (*tier) {
        case RiskTier::high: t.risk_high += p; break;
        case RiskTier::medium: t.risk_medium += p; break;
        case RiskTier::low: t.risk_low += p; break;
        case RiskTier::barrier: t.barriers += p; break;
        }
        t.spread_potential += p * mapping.risk_value(*tier);
    }
    t.continuous_fuels = t.risk_high + t.risk_medium;
    t.spread_potential = std::clamp(t.spread_potential, 0.0, 1.0);
    return t;
}

std::optional<TerrainProfile> terrain_profile(const RasterGrid& landcover, const Polygon& poly,
                                              const NlcdMapping& mapping) {
    const CoveredCells cc = covered_cells(landcover, poly);
    if (cc.count == 0) return std::nullopt;

    std::map<int, std::size_t> counts;
    for (std::size_t r = 0; r < cc.rows; ++r)
        for (std::size_t c = 0; c < cc.cols; ++c)
            if (cc.covered(r, c))
                ++counts[static_cast<int>(std::lround(landcover.at(cc.row0 + r, cc.col0 + c)))];
    std::map<int, double> composition;
    for (const auto& [cls, n] : counts)
        composition[cls] = static_cast<double>(n) / static_cast<double>(cc.count);

    TerrainProfile t = classify_composition(composition, mapping);
    t.covered_cells = cc.count;
    t.fragmentation = static_cast<double>(count_patches(landcover, cc)) /
                      static_cast<double>(cc.count);
    return t;
}

FusedWeather weather_fusion(const std::vector<Hotspot>& members, const WeatherDayGrids& grids) {
    require(!members.empty(), "weather_fusion: no members");
    std::vector<const Hotspot*> ordered;
    for (const Hotspot& h : members) ordered.push_back(&h);
    std::sort(ordered.begin(), ordered.end(),
              [](const Hotspot* a, const Hotspot* b) { return canonical_less(*a, *b); });

    auto fuse = [&](const RasterGrid& grid) -> std::optional<double> {
        double w_sum = 0.0, wv_sum = 0.0, v_sum = 0.0;
        std::size_t n = 0;
        for (const Hotspot* h : ordered) {
            const auto v = grid.sample(h->position());
            if (!v) continue;
            w_sum += h->frp;
            wv_sum += h->frp * *v;
            v_sum += *v;
            ++n;
        }
        if (n == 0) return std::nullopt;
        if (w_sum > 0.0) return wv_sum / w_sum;
        return v_sum / static_cast<double>(n);
    };

    return {fuse(grids.bi), fuse(grids.tmax), fuse(grids.tmin), fuse(grids.wind), fuse(grids.fm1)};
}

ExposureProfile exposure(const Polygon& poly, const RasterGrid* population,
                         const CountyIndex& counties, double county_buffer_m) {
    ExposureProfile e;
    if (population) {
        const ZonalSum z = zonal_sum(*population, poly);
        if (!z.coverage_warning) e.population = z.value;
    }
    const double area_km2 = geodesic_area_m2(poly) / 1e6;
    e.density = e.population && area_km2 > 0.0 ? *e.population / area_km2 : 0.0;
    for (const CountyFeature* c : counties.intersecting(poly)) {
        e.counties.push_back(c->county_id);
        e.county_names.push_back(c->name);
    }
    for (const CountyFeature* c : counties.within_buffer(poly, county_buffer_m))
        e.nearby_counties.push_back(c->county_id);
    return e;
}

StationCoverage station_coverage(GeoPoint centroid, const StationIndex& stations, double radius_m) {
    StationCoverage sc;
    for (const StationHit& h : stations.nearest(centroid, 3))
        sc.nearest.emplace_back(h.station->id, h.distance_m);
    for (const FireStation* s : stations.within(centroid, radius_m)) sc.within_ids.push_back(s->id);
    std::sort(sc.within_ids.begin(), sc.within_ids.end());
    sc.density_10km = sc.within_ids.size();
    return sc;
}

} // namespace gal
