#include "gal/error.hpp"
#include "gal/geo.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gal;

TEST_CASE("haversine distance") {
    CHECK(geodesic_distance({0, 0}, {0, 1}) == doctest::Approx(111195.08).epsilon(1e-7));
    CHECK(geodesic_distance({10, 20}, {10, 20}) == 0.0);
    // antipodes: half the circumference
    CHECK(geodesic_distance({0, 0}, {0, 180}) == doctest::Approx(std::numbers::pi * kEarthRadiusM));

    galtest::Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const GeoPoint a{rng.uniform(-89, 89), rng.uniform(-180, 180)};
        const GeoPoint b{rng.uniform(-89, 89), rng.uniform(-180, 180)};
        const double d = geodesic_distance(a, b);
        CHECK(d == geodesic_distance(b, a));
        CHECK(d == doctest::Approx(galtest::oracle::great_circle_m(a, b)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("polygon construction validates the ring") {
    auto kind = [](std::vector<GeoPoint> ring) {
        try {
            Polygon::from_ring(std::move(ring));
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::runtime;
    };
    CHECK(kind({}) == ErrorKind::precondition);
    CHECK(kind({{0, 0}, {0, 1}, {0, 0}}) == ErrorKind::precondition);
    CHECK(kind({{0, 0}, {0, 1}, {0, 2}}) == ErrorKind::precondition);          // collinear
    CHECK(kind({{0, 0}, {1, 1}, {1, 0}, {0, 1}}) == ErrorKind::precondition);  // bowtie
    CHECK(kind({{0, 0}, {0, 1}, {95, 1}}) == ErrorKind::precondition);

    Polygon open = Polygon::from_ring({{0, 0}, {0, 1}, {1, 1}});
    CHECK(open.ring().size() == 4);
    CHECK(open.ring().front() == open.ring().back());
    CHECK(open.bbox().max_lat == 1.0);
    CHECK(open.xs().size() == 4);
}

TEST_CASE("area and perimeter of a small square at the equator") {
    const double h = 0.05;
    Polygon sq = Polygon::from_ring({{-h, -h}, {-h, h}, {h, h}, {h, -h}});
    const double deg = std::numbers::pi / 180.0;
    const double exact = kEarthRadiusM * kEarthRadiusM * (2 * h * deg) * (2 * std::sin(h * deg));
    CHECK(geodesic_area_m2(sq) == doctest::Approx(exact).epsilon(1e-5));
    // orientation does not matter
    Polygon rev = Polygon::from_ring({{-h, -h}, {h, -h}, {h, h}, {-h, h}});
    CHECK(geodesic_area_m2(rev) == doctest::Approx(geodesic_area_m2(sq)).epsilon(1e-12));

    double per = 0;
    for (std::size_t i = 0; i + 1 < sq.ring().size(); ++i)
        per += galtest::oracle::great_circle_m(sq.ring()[i], sq.ring()[i + 1]);
    CHECK(geodesic_perimeter_m(sq) == doctest::Approx(per).epsilon(1e-9));
}

TEST_CASE("point in polygon: boundary is inside") {
    Polygon sq = Polygon::from_ring({{0, 0}, {0, 2}, {2, 2}, {2, 0}});
    CHECK(point_in_polygon({1, 1}, sq));
    CHECK(point_in_polygon({0, 0}, sq));
    CHECK(point_in_polygon({0, 1}, sq));
    CHECK(point_in_polygon({2, 1.5}, sq));
    CHECK_FALSE(point_in_polygon({2.0000001, 1}, sq));
    CHECK_FALSE(point_in_polygon({-1, -1}, sq));

    // concave: notch cut into the top
    Polygon u = Polygon::from_ring({{0, 0}, {0, 3}, {3, 3}, {3, 2}, {1, 2}, {1, 1}, {3, 1}, {3, 0}});
    CHECK_FALSE(point_in_polygon({2, 1.5}, u));
    CHECK(point_in_polygon({0.5, 1.5}, u));
    CHECK(point_in_polygon({2, 2}, u)); // notch edge
}

TEST_CASE("point in polygon agrees with the oracle on random stars") {
    galtest::Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const GeoPoint c{rng.uniform(-50, 50), rng.uniform(-150, 150)};
        Polygon poly = galtest::random_star_polygon(rng, c, 0.01, 0.2);
        std::vector<double> lats, lons;
        for (int i = 0; i < 200; ++i) {
            lats.push_back(c.lat + rng.uniform(-0.25, 0.25));
            lons.push_back(c.lon + rng.uniform(-0.25, 0.25));
        }
        // vertices are inside by definition
        for (const GeoPoint& v : poly.ring()) {
            lats.push_back(v.lat);
            lons.push_back(v.lon);
        }
        std::vector<std::uint8_t> batch(lats.size());
        points_in_polygon(lats, lons, poly, batch);
        for (std::size_t i = 0; i < lats.size(); ++i) {
            const bool want = galtest::oracle::point_in_ring({lats[i], lons[i]}, poly.ring());
            CHECK(point_in_polygon({lats[i], lons[i]}, poly) == want);
            CHECK((batch[i] != 0) == want);
        }
    }
}

TEST_CASE("segment and polygon intersection") {
    CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
    CHECK(segments_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));  // collinear overlap
    CHECK(segments_intersect({0, 0}, {1, 1}, {1, 1}, {2, 0}));  // shared endpoint
    CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {2, 0}, {3, 0}));

    Polygon a = Polygon::from_ring({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    Polygon inner = Polygon::from_ring({{0.2, 0.2}, {0.2, 0.4}, {0.4, 0.4}, {0.4, 0.2}});
    Polygon touching = Polygon::from_ring({{1, 0}, {1, 1}, {2, 1}, {2, 0}});
    Polygon apart = Polygon::from_ring({{0, 1.01}, {0, 2}, {1, 2}, {1, 1.01}});
    CHECK(polygons_intersect(a, inner));
    CHECK(polygons_intersect(inner, a));
    CHECK(polygons_intersect(a, touching));
    CHECK_FALSE(polygons_intersect(a, apart));
    CHECK(polygon_gap_m(a, inner) == 0.0);
    CHECK(polygon_gap_m(a, apart) == doctest::Approx(0.01 * 111195.08 * std::cos(0.0)).epsilon(1e-3));
}

TEST_CASE("local frame round trip") {
    const LocalFrame f({37.0, -122.0});
    const GeoPoint p{37.05, -121.93};
    const auto xy = f.to_xy(p);
    CHECK(xy.x > 0);
    CHECK(xy.y == doctest::Approx(0.05 * 111195.08).epsilon(1e-6));
    const GeoPoint back = f.to_geo(xy);
    CHECK(back.lat == doctest::Approx(p.lat).epsilon(1e-12));
    CHECK(back.lon == doctest::Approx(p.lon).epsilon(1e-12));
}
