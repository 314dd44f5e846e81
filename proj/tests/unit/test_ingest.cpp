#include "gal/error.hpp"
#include "gal/ingest.hpp"
#include "support/gen.hpp"

#include <doctest.h>

#include <sstream>

using namespace gal;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected gal::Error");
    return ErrorKind::runtime;
}

std::vector<Hotspot> hotspots_from(const std::string& text) {
    std::istringstream in(text);
    return parse_hotspots(in);
}

} // namespace

TEST_CASE("dates") {
    CHECK(Date::parse("1970-01-01").days() == 0);
    CHECK(Date::parse("2000-03-01") - Date::parse("2000-02-28") == 2);
    CHECK(Date::parse("2021-12-31").iso() == "2021-12-31");
    CHECK(Date::parse("2021-09-05").month_day() == "09-05");
    CHECK(kind_of([] { Date::parse("2021-02-29"); }) == ErrorKind::row);
    CHECK(kind_of([] { Date::parse("2021/02/01"); }) == ErrorKind::row);
    for (std::int64_t d = -1000; d < 30000; d += 37) CHECK(Date::parse(Date::from_days(d).iso()).days() == d);
}

TEST_CASE("acq_time accepts FIRMS HHMM with optional leading zeros") {
    CHECK(parse_acq_time("0") == 0);
    CHECK(parse_acq_time("5") == 5);
    CHECK(parse_acq_time("0930") == 570);
    CHECK(parse_acq_time("2359") == 1439);
    CHECK(kind_of([] { parse_acq_time("2460"); }) == ErrorKind::row);
    CHECK(kind_of([] { parse_acq_time("12a"); }) == ErrorKind::row);
    CHECK(kind_of([] { parse_acq_time(""); }) == ErrorKind::row);
}

TEST_CASE("hotspot CSV parses FIRMS columns in any order") {
    auto hs = hotspots_from("acq_date,frp,longitude,latitude,bright_ti4,acq_time,satellite\n"
                            "2021-08-01,12.5,-122.1,37.2,331.4,0915,N\n"
                            "\n"
                            "2021-08-02,0,-122.2,37.3,300,5,1\n");
    REQUIRE(hs.size() == 2);
    CHECK(hs[0].lat == 37.2);
    CHECK(hs[0].lon == -122.1);
    CHECK(hs[0].frp == 12.5);
    CHECK(hs[0].brightness == 331.4);
    CHECK(hs[0].acq_time == 555);
    CHECK(hs[1].acq_date == Date::from_ymd(2021, 8, 2));
    CHECK(hs[1].satellite == "1");
}

TEST_CASE("hotspot CSV round-trips") {
    galtest::Rng rng(7);
    auto hs = galtest::random_hotspots(rng, 200);
    for (auto& h : hs) h.satellite = rng.chance(0.5) ? "N" : "1";
    std::ostringstream out;
    write_hotspots(out, hs);
    CHECK(hotspots_from(out.str()) == hs);
}

TEST_CASE("hotspot CSV errors name the row") {
    const std::string head = "latitude,longitude,frp,brightness,acq_date,acq_time\n";
    auto row_of = [&](const std::string& body) -> std::size_t {
        try {
            hotspots_from(head + body);
        } catch (const RowError& e) {
            return e.row();
        }
        return 0;
    };
    CHECK(row_of("37,-122,1,300,2021-08-01,0100\n37,-122,x,300,2021-08-01,0100\n") == 2);
    CHECK(row_of("37,-122,1,300,2021-08-01\n") == 1);
    CHECK(row_of("95,-122,1,300,2021-08-01,0100\n") == 1);
    CHECK(row_of("37,-122,-1,300,2021-08-01,0100\n") == 1);
    CHECK(row_of("37,-122,1,0,2021-08-01,0100\n") == 1);
    CHECK(row_of("37,-122,1,300,2021-13-01,0100\n") == 1);
    CHECK(row_of("37,-122,1,300,2021-08-01,0100\n37,-122,1,300,2021-08-01,9999\n") == 2);
    CHECK(kind_of([] { hotspots_from("latitude,longitude,frp\n"); }) == ErrorKind::format);
    CHECK(kind_of([] { hotspots_from(""); }) == ErrorKind::format);
}

TEST_CASE("stations GeoJSON") {
    const std::string ok = R"({"type":"FeatureCollection","features":[
        {"type":"Feature","geometry":{"type":"Point","coordinates":[-122.0,37.0]},"properties":{"id":"A","name":"Alpha"}},
        {"type":"Feature","geometry":{"type":"Point","coordinates":[-121.5,37.5]},"properties":{"id":"B"}}]})";
    std::istringstream in(ok);
    auto st = parse_stations(in);
    REQUIRE(st.size() == 2);
    CHECK(st[0].lat == 37.0);
    CHECK(st[0].lon == -122.0);
    CHECK(st[0].name == "Alpha");

    std::ostringstream out;
    write_stations(out, st);
    std::istringstream back(out.str());
    CHECK(parse_stations(back) == st);

    auto bad = [](const std::string& s) {
        return kind_of([&] {
            std::istringstream i(s);
            parse_stations(i);
        });
    };
    CHECK(bad("{") == ErrorKind::format);
    CHECK(bad(R"({"type":"Feature"})") == ErrorKind::format);
    CHECK(bad(R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Point","coordinates":[-122,95]},"properties":{"id":"A"}}]})") ==
          ErrorKind::format);
    CHECK(bad(R"({"type":"FeatureCollection","features":[
        {"type":"Feature","geometry":{"type":"Point","coordinates":[-122,37]},"properties":{"id":"A"}},
        {"type":"Feature","geometry":{"type":"Point","coordinates":[-121,37]},"properties":{"id":"A"}}]})") ==
          ErrorKind::conflict);
}

TEST_CASE("ASCII rasters") {
    std::istringstream in("ncols 3\nnrows 2\nxllcorner -122\nyllcorner 37\ncellsize 0.5\nNODATA_value -1\n"
                          "1 2 3\n4 -1 6\n");
    RasterGrid g = load_raster(in);
    CHECK(g.n_rows == 2);
    CHECK(g.n_cols == 3);
    CHECK(g.north() == 38.0);
    CHECK(g.east() == -120.5);
    CHECK(g.at(1, 2) == 6.0);
    // row 0 is north
    CHECK(g.sample({37.9, -121.9}) == 1.0);
    CHECK(g.sample({37.1, -121.9}) == 4.0);
    CHECK_FALSE(g.sample({37.1, -121.4}).has_value()); // nodata
    CHECK_FALSE(g.sample({36.9, -121.9}).has_value()); // south of grid
    CHECK_FALSE(g.sample({37.5, -120.0}).has_value()); // east of grid
    CHECK(g.cell_center(0, 0) == GeoPoint{37.75, -121.75});

    std::ostringstream out;
    write_raster(out, g);
    std::istringstream back(out.str());
    CHECK(load_raster(back) == g);

    auto bad = [](const std::string& s) {
        return kind_of([&] {
            std::istringstream i(s);
            load_raster(i);
        });
    };
    std::istringstream no_nodata("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n");
    CHECK(load_raster(no_nodata).nodata == -9999.0);
    CHECK(bad("ncols 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n") == ErrorKind::format);
    CHECK(bad("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -1\n1 2 3\n") ==
          ErrorKind::format);
    CHECK(bad("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 0\nNODATA_value -1\n1 2\n") ==
          ErrorKind::format);
    CHECK(bad("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -1\n1 q\n") ==
          ErrorKind::format);
}

TEST_CASE("ground truth") {
    std::istringstream in("fire_id,date,personnel,daily_cost_musd\nF,2021-08-02,120,0.5\nF,2021-08-01,100,0.4\n"
                          "G,2021-08-01,10,0.01\n");
    GroundTruth t = parse_ground_truth(in);
    REQUIRE(t.size() == 2);
    REQUIRE(t["F"].size() == 2);
    CHECK(t["F"][0].date < t["F"][1].date);
    CHECK(t["F"][1].personnel == 120.0);

    std::ostringstream out;
    write_ground_truth(out, t);
    std::istringstream back(out.str());
    CHECK(parse_ground_truth(back) == t);

    auto bad = [](const std::string& body) {
        return kind_of([&] {
            std::istringstream i("fire_id,date,personnel,daily_cost_musd\n" + body);
            parse_ground_truth(i);
        });
    };
    CHECK(bad("F,2021-08-01,1,1\nF,2021-08-01,2,2\n") == ErrorKind::conflict);
    CHECK(bad("F,2021-08-01,-1,1\n") == ErrorKind::row);
    CHECK(bad(",2021-08-01,1,1\n") == ErrorKind::row);
}

TEST_CASE("weather day checks alignment and units") {
    const std::string grid = "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n";
    auto parse = [&](const std::string& tmax, const std::string& fm1, const std::string& wind_header) {
        std::istringstream bi(grid + "10 20\n"), tx(grid + tmax), tn(grid + "280 281\n"),
            wd(wind_header + "1 2\n"), fm(grid + fm1);
        return parse_weather_day({&bi, &tx, &tn, &wd, &fm}, Date::from_ymd(2021, 8, 1));
    };
    auto w = parse("300 301\n", "5 -9999\n", grid);
    CHECK(w.tmax.at(0, 1) == 301.0);
    CHECK(kind_of([&] { parse("30 31\n", "5 6\n", grid); }) == ErrorKind::unit);
    CHECK(kind_of([&] { parse("300 301\n", "5 160\n", grid); }) == ErrorKind::unit);
    CHECK(kind_of([&] {
              parse("300 301\n", "5 6\n", "ncols 2\nnrows 1\nxllcorner 1\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n");
          }) == ErrorKind::alignment);
    CHECK(kind_of([] { parse_weather_day({}, Date{}); }) == ErrorKind::precondition);
}

TEST_CASE("missing files are runtime errors") {
    CHECK(kind_of([] { read_hotspots_file("/nonexistent/x.csv"); }) == ErrorKind::runtime);
    CHECK(Error(ErrorKind::runtime, "x").exit_status() == 1);
    CHECK(Error(ErrorKind::row, "x").exit_status() == 2);
}
