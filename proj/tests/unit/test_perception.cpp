#include "gal/error.hpp"
#include "gal/perception.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <algorithm>

using namespace gal;
using galtest::cluster;

namespace {

const Date d0 = Date::from_ymd(2021, 8, 1);

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

ErrorKind lock_error(const EventDayContext& ctx, std::string* message = nullptr) {
    try {
        unit_lock(ctx);
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.kind();
    }
    return ErrorKind::runtime;
}

} // namespace

TEST_CASE("fixed-precision formatting") {
    CHECK(fixed(1.26, 1) == "1.3");
    CHECK(fixed(2.0, 0) == "2");
    CHECK(fixed(-0.04, 1) == "0.0");
    CHECK(fixed(-0.06, 1) == "-0.1");
    CHECK(na_policy("frp", 12.345) == "12.3");
    CHECK(na_policy("points", 12.0) == "12");
    CHECK(na_policy("fragmentation", 0.123456) == "0.1235");
    CHECK(na_policy("FM1", std::nullopt) == "NA");
    CHECK(na_default("points") == NaDefault::zero);
    CHECK(na_default("FM1") == NaDefault::omit);
    CHECK_THROWS_AS(na_policy("humidity", 1.0), Error);
    try {
        na_default("humidity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::schema);
    }
}

TEST_CASE("day-1 script layout") {
    auto a = cluster(0, 12, 40.0, 30.0);
    auto b = cluster(1, 4, 90.0, 10.0);
    const auto ctx = galtest::context("F", d0, {a, b});
    const PerceptionScript s = render_script(ctx);
    CHECK(s.text == s.head + s.cluster_block);
    CHECK(has(s.head, "## Fire Overview\n"));
    CHECK_FALSE(has(s.head, "vs Yesterday"));
    CHECK_FALSE(has(s.head, "Rolling Metrics"));
    CHECK(has(s.head, "- Current date: 08-01\n"));
    CHECK(has(s.head, "- Total Fire Points: 16\n"));
    CHECK(has(s.head, "- Total FRP: 130.0 MW\n"));
    CHECK(has(s.head, "- FRP per cluster: median=65.0 MW, p95=90.0 MW\n"));
    CHECK(has(s.head, "- Counties: {Alpha}; now 1\n"));
    CHECK(s.cluster_block.rfind("## Cluster Details\n", 0) == 0);
    // higher FRP first
    CHECK(s.cluster_block.find("- Cluster 1:") < s.cluster_block.find("- Cluster 0:"));
    CHECK(s.k_used == 2);
    CHECK(s.na_fields.empty());
}

TEST_CASE("top-k limits the cluster block") {
    std::vector<ClusterFeatures> cs;
    for (int i = 0; i < 8; ++i) cs.push_back(cluster(i, 3, 10.0 + i));
    const auto ctx = galtest::context("F", d0, cs);
    const PerceptionScript s = render_script(ctx, 3);
    CHECK(s.k_used == 3);
    CHECK(has(s.cluster_block, "- Cluster 7:"));
    CHECK(has(s.cluster_block, "- Cluster 5:"));
    CHECK_FALSE(has(s.cluster_block, "- Cluster 4:"));
    CHECK(has(s.head, "- Num Clusters: 8\n"));
}

TEST_CASE("missing values render as NA and are listed") {
    auto a = cluster(0, 5, 20.0);
    a.weather.fm1.reset();
    a.terrain.reset();
    a.access.nearest.resize(1);
    const auto ctx = galtest::context("F", d0, {a});
    const PerceptionScript s = render_script(ctx);
    CHECK(has(s.head, "FM1=NA%"));
    CHECK(has(s.cluster_block, "FM1=NA%"));
    CHECK(has(s.cluster_block, "spread_potential=NA"));
    CHECK(has(s.cluster_block, "land_cover=NA"));
    CHECK(std::count(s.na_fields.begin(), s.na_fields.end(), "global.FM1") == 1);
    CHECK(std::count(s.na_fields.begin(), s.na_fields.end(), "cluster 0.FM1") == 1);
    CHECK(std::count(s.na_fields.begin(), s.na_fields.end(), "cluster 0.station_2") == 1);
    CHECK(std::count(s.na_fields.begin(), s.na_fields.end(), "global.spread_potential") == 1);
}

TEST_CASE("quiet day") {
    const auto ctx = galtest::context("F", d0, {});
    const PerceptionScript s = render_script(ctx);
    CHECK(has(s.cluster_block, "none (no hotspots detected today)"));
    CHECK(has(s.head, "Max FRP/Brightness: 0.0 MW / NA K"));
    CHECK(s.k_used == 0);
}

TEST_CASE("incremental script carries deltas and rolling metrics") {
    auto y1 = cluster(0, 10, 100.0, 50.0);
    auto t1 = cluster(0, 14, 150.0, 50.0);
    t1.exposure.counties = {"06002"};
    t1.exposure.county_names = {"Bravo"};
    auto ctx = galtest::context("F", d0 + 1, {t1});
    std::vector<DayRecord> hist{{global_snapshot(d0, {y1}), 200.0, 1.0}};
    ctx.anchors = temporal_anchors(hist, ctx.snapshot);
    const PerceptionScript s = render_script(ctx);
    CHECK(has(s.head, "## Fire Overview vs Yesterday\n"));
    CHECK(has(s.head, "## Affected Areas vs Yesterday\n"));
    CHECK(has(s.head, "- Total Fire Points: 14 (up 4)\n"));
    CHECK(has(s.head, "- Total FRP: 150.0 MW (up 50.0, 50.0%)\n"));
    CHECK(has(s.head, "- Total area: 50.0 acres (no change)\n"));
    CHECK(has(s.head, "- Counties: added {Bravo}; removed {Alpha}; now 1\n"));
    CHECK(has(s.head, "## Fire Intensity Rolling Metrics\n"));
    CHECK(has(s.head, "- 3-day avg fire points: 12.0\n"));
    CHECK(has(s.head, "- Qualitative deltas: "));
    CHECK(has(s.head, "frp ↑"));
    CHECK(has(s.head, "area ≈"));
}

TEST_CASE("unit lock names the offending slot") {
    std::string msg;
    auto a = cluster(3, 5, 20.0);
    a.weather.tmax = 31.0; // celsius
    CHECK(lock_error(galtest::context("F", d0, {a}), &msg) == ErrorKind::unit);
    CHECK(has(msg, "Tmax"));

    auto b = cluster(3, 5, 20.0);
    b.weather.fm1 = 180.0;
    CHECK(lock_error(galtest::context("F", d0, {b}), &msg) == ErrorKind::unit);
    CHECK(has(msg, "FM1"));

    auto c = cluster(3, 5, 20.0);
    c.max_brightness = 45.0;
    CHECK(lock_error(galtest::context("F", d0, {c}), &msg) == ErrorKind::unit);
    CHECK(has(msg, ".brightness"));

    auto d = cluster(3, 5, 20.0);
    d.weather.wind = -1.0;
    CHECK(lock_error(galtest::context("F", d0, {d}), &msg) == ErrorKind::unit);
    CHECK(has(msg, "Wind"));

    auto e = cluster(3, 5, 20.0);
    e.terrain->spread_potential = 1.5;
    CHECK(lock_error(galtest::context("F", d0, {e}), &msg) == ErrorKind::unit);
    CHECK(has(msg, "spread_potential"));

    CHECK_THROWS_AS(render_script(galtest::context("F", d0, {a})), Error);
    CHECK_NOTHROW(unit_lock(galtest::context("F", d0, {cluster(0, 1, 1.0)})));
}

TEST_CASE("rendering is independent of cluster order") {
    galtest::Rng rng(61);
    std::vector<ClusterFeatures> cs;
    for (int i = 0; i < 7; ++i) cs.push_back(cluster(i, 1 + rng.index(20), std::round(rng.uniform(1, 300)), rng.uniform(1, 90)));
    cs[2].sum_frp = cs[5].sum_frp; // tie broken by id
    const std::string base = render_script(galtest::context("F", d0, cs)).text;
    for (int s = 0; s < 20; ++s) {
        rng.shuffle(cs);
        CHECK(render_script(galtest::context("F", d0, cs)).text == base);
    }
}
