#include "gal/analogs.hpp"
#include "gal/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

using namespace gal;

namespace {

const Date d0 = Date::from_ymd(2021, 7, 1);

EventDayContext snap_day(const std::string& fire, Date d, std::size_t points, double frp, double area,
                         std::size_t clusters) {
    EventDayContext c;
    c.fire_id = fire;
    c.snapshot.date = d;
    c.snapshot.total_points = points;
    c.snapshot.total_frp = frp;
    c.snapshot.total_area_acres = area;
    c.snapshot.n_clusters = clusters;
    return c;
}

FeatureWeights random_weights(galtest::Rng& rng) {
    FeatureWeights w;
    const double choices[] = {0.5, 1.0, 2.0};
    for (double& x : w) x = choices[rng.index(3)];
    return w;
}

} // namespace

TEST_CASE("weighted cosine") {
    galtest::Rng rng(71);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> a(12), b(12), w(12);
        for (int i = 0; i < 12; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
            w[i] = rng.uniform(0.1, 3);
        }
        CHECK(std::abs(weighted_cosine(a, b, w) - static_cast<double>(galtest::oracle::cosine(a, b, w))) <= 1e-13);
        CHECK(std::abs(weighted_cosine(a, a, w) - 1.0) <= 1e-12);
    }
    const std::vector<double> zero(3, 0.0), one{1, 2, 3}, w{1, 1, 1};
    CHECK(weighted_cosine(zero, one, w) == 0.0);
    CHECK(weighted_cosine(one, one, std::vector<double>{1, 0, 0}) == 1.0);
    CHECK_THROWS_AS(weighted_cosine(one, one, std::vector<double>{0, 0, 0}), Error);
    CHECK_THROWS_AS(weighted_cosine(one, one, std::vector<double>{1, -1, 1}), Error);
    CHECK_THROWS_AS(weighted_cosine(one, std::vector<double>{1, 2}, w), Error);
}

TEST_CASE("retrieval matches a brute-force rank and dedup") {
    galtest::Rng rng(72);
    for (int t = 0; t < 60; ++t) {
        const auto corpus = galtest::random_corpus(rng, rng.index(600), 1 + rng.index(40));
        FeatureVector q;
        for (std::size_t k = 0; k < kFeatureDims; ++k) q.x[k] = rng.integer(-12, 12) / 4.0;
        const FeatureWeights w = t % 2 ? uniform_weights() : random_weights(rng);
        const std::size_t k = 1 + rng.index(8);
        const auto got = retrieve_analogs(q, corpus, k, w);
        const auto want = galtest::oracle::retrieve(q, corpus, k, w);
        REQUIRE(got.size() == want.size());
        std::set<std::string> ids;
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].fire_id == want[i].fire_id);
            CHECK(got[i].date == want[i].date);
            CHECK(got[i].similarity == want[i].similarity);
            CHECK(got[i].personnel == want[i].personnel);
            ids.insert(got[i].fire_id);
        }
        CHECK(ids.size() == got.size());
    }
    CHECK(retrieve_analogs(FeatureVector{}, {}, 5, uniform_weights()).empty());
}

TEST_CASE("a corpus day retrieves itself first") {
    galtest::Rng rng(73);
    auto corpus = galtest::random_corpus(rng, 200, 200);
    for (std::size_t i = 0; i < corpus.size(); ++i) corpus[i].record.fire_id = "F" + std::to_string(i);
    for (std::size_t i = 0; i < corpus.size(); i += 7) {
        const auto got = retrieve_analogs(corpus[i].z, corpus, 1, uniform_weights());
        REQUIRE(got.size() == 1);
        CHECK(std::abs(got[0].similarity - 1.0) <= 1e-12);
    }
}

TEST_CASE("standardization") {
    std::vector<RawFeatures> raws(3);
    for (int i = 0; i < 3; ++i) {
        raws[i].values[0] = 10.0 * (i + 1);
        raws[i].values[1] = 7.0;
    }
    raws[2].values[2] = 5.0;
    const CorpusStats st = corpus_stats(raws);
    const auto [m, s] = galtest::oracle::mean_std({10, 20, 30});
    CHECK(st.mean[0] == doctest::Approx(m).epsilon(1e-15));
    CHECK(st.std[0] == doctest::Approx(s).epsilon(1e-15));
    CHECK(st.constant[1]);
    CHECK(st.constant[2]); // one value has no spread
    CHECK(st.constant[3]); // no values at all
    CHECK(st.unz(0, st.z(0, 17.5)) == doctest::Approx(17.5));
    CHECK(st.unz(1, 3.0) == 7.0);

    RawFeatures r = raws[0];
    r.flags = {true, false};
    const FeatureVector v = standardize(r, st);
    CHECK(v.x[0] == doctest::Approx((10 - m) / s));
    CHECK(v.x[1] == 0.0);
    CHECK(v.x[2] == 0.0);
    CHECK(v.x[kNumericFeatures] == 1.0);
    CHECK(v.x[kNumericFeatures + 1] == 0.0);
    CHECK_THROWS_AS(corpus_stats(std::vector<RawFeatures>{}), Error);

    const CorpusStats back = stats_from_json(stats_to_json(st));
    CHECK(back.mean == st.mean);
    CHECK(back.std == st.std);
    CHECK(back.constant == st.constant);
    CHECK(back.n_days == 3);
    auto bad = stats_to_json(st);
    bad["features"][0]["name"] = "nope";
    CHECK_THROWS_AS(stats_from_json(bad), Error);
}

TEST_CASE("quiet-day activity comes from the 3-day tail, else the 7-day tail") {
    std::vector<EventDayContext> prior;
    const std::size_t pts[] = {40, 10, 5, 3, 0, 0, 0};
    for (int i = 0; i < 7; ++i) prior.push_back(snap_day("F", d0 + i, pts[i], 2.0 * pts[i], 100.0, pts[i] ? 1 : 0));
    const EventDayContext today = snap_day("F", d0 + 7, 0, 0, 0, 0);

    // last three days are all zero: fall back to seven
    const RawFeatures r7 = quiet_raw_features(prior, today);
    CHECK(*r7.values[0] == doctest::Approx(58.0 / 7));
    CHECK(*r7.values[1] == doctest::Approx(116.0 / 7));
    CHECK(*r7.values[2] == 100.0); // area never zero, so its 3-day mean stands
    CHECK(*r7.values[3] == doctest::Approx(4.0 / 7));
    CHECK(r7.flags[0]);

    prior[6].snapshot.total_points = 6;
    const RawFeatures r3 = quiet_raw_features(prior, today);
    CHECK(*r3.values[0] == doctest::Approx(2.0));
    CHECK(*r3.values[1] == doctest::Approx(116.0 / 7)); // FRP still zero over three days

    const std::vector<EventDayContext> short_prior(prior.begin(), prior.begin() + 2);
    CHECK(*quiet_raw_features(short_prior, today).values[0] == doctest::Approx(25.0));
    CHECK_THROWS_AS(quiet_raw_features({}, today), Error);
    CHECK_THROWS_AS(vectorize_day(today, CorpusStats{}), Error);
}

TEST_CASE("raw features of an active day") {
    auto a = galtest::cluster(0, 10, 30.0, 50.0);
    auto b = galtest::cluster(1, 5, 10.0, 20.0);
    b.exposure.counties = {"06002"};
    b.exposure.county_names = {"Bravo"};
    const RawFeatures r = raw_features(galtest::context("F", d0, {a, b}));
    CHECK(*r.values[0] == 15.0);
    CHECK(*r.values[1] == 40.0);
    CHECK(*r.values[3] == 2.0);
    CHECK(*r.values[7] == 305.0);
    CHECK_FALSE(r.flags[0]);
    CHECK(r.flags[1]);
}

TEST_CASE("analog bounds") {
    std::vector<AnalogRecord> a(3);
    a[0].personnel = 100;
    a[0].daily_cost = 0.4;
    a[1].personnel = 400;
    a[1].daily_cost = 2.0;
    a[2].personnel = 250;
    a[2].daily_cost = 1.0;
    const AnalogBounds b = analog_bounds(a);
    REQUIRE(b.personnel.has_value());
    CHECK(b.personnel->lo == 25.0);
    CHECK(b.personnel->hi == 1600.0);
    CHECK(b.cost_musd->lo == 0.1);
    CHECK(b.cost_musd->hi == 8.0);
    const AnalogBounds tight = analog_bounds(a, {1.0, 1.0});
    CHECK(tight.personnel->lo == 100.0);
    CHECK(tight.personnel->hi == 400.0);
    const AnalogBounds none = analog_bounds({});
    CHECK_FALSE(none.personnel.has_value());
    CHECK_FALSE(none.cost_musd.has_value());
}

TEST_CASE("corpus directory round trip") {
    galtest::TempDir dir;
    std::vector<EventDayContext> ctxs;
    GroundTruth truth;
    for (int f = 0; f < 3; ++f) {
        const std::string id = "T" + std::to_string(f);
        for (int d = 0; d < 5; ++d) {
            std::vector<ClusterFeatures> cs;
            if (d != 3) cs.push_back(galtest::cluster(0, 3 + d + f, 10.0 * (d + 1) + f, 5.0 + d));
            ctxs.push_back(galtest::context(id, d0 + d, cs));
            if (!(f == 2 && d == 4)) truth[id].push_back({id, d0 + d, 100.0 + d, 0.5 + 0.1 * f});
        }
    }
    const std::string root = (dir / "corpus").string();
    write_corpus_dir(root, ctxs, truth);
    CHECK(std::filesystem::exists(dir / "corpus" / "stats.json"));
    CHECK(std::filesystem::exists(dir / "corpus" / "contexts" / "T1__2021-07-03.json"));

    const Corpus direct = build_corpus(ctxs, truth);
    const Corpus loaded = load_corpus_dir(root);
    const Corpus cached = load_corpus_dir(root);
    REQUIRE(direct.days.size() == 14);
    REQUIRE(loaded.days.size() == direct.days.size());
    for (std::size_t i = 0; i < direct.days.size(); ++i) {
        CHECK(loaded.days[i].record.fire_id == direct.days[i].record.fire_id);
        CHECK(loaded.days[i].record.date == direct.days[i].record.date);
        CHECK(cached.days[i].z.x == loaded.days[i].z.x);
    }
    // the quiet day looked back within its own fire
    const auto& quiet = direct.days[3];
    CHECK(quiet.record.date == d0 + 3);
    CHECK(quiet.raw.flags[0]);
    CHECK(*quiet.raw.values[0] == doctest::Approx((3 + 4 + 5) / 3.0));

    std::vector<EventDayContext> bad{galtest::context("bad id", d0, {})};
    CHECK_THROWS_AS(write_corpus_dir((dir / "bad").string(), bad, truth), Error);
    CHECK_THROWS_AS(build_corpus(ctxs, GroundTruth{}), Error);
    CHECK_THROWS_AS(load_corpus_dir((dir / "missing").string()), Error);
}
