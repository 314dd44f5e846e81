#include "gal/config.hpp"
#include "gal/error.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <sstream>

using namespace gal;

namespace {

ErrorKind parse_error(const std::string& text) {
    std::istringstream in(text);
    try {
        validate_config(parse_config(in, "/base"));
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::runtime;
}

} // namespace

TEST_CASE("client kinds") {
    CHECK(parse_client_kind("replay") == ClientKind::replay);
    CHECK(to_string(ClientKind::live) == "live");
    CHECK_THROWS_AS(parse_client_kind("Mock"), Error);
}

TEST_CASE("parsing resolves relative paths and reads every section") {
    std::istringstream in("[data]\nhotspots_dir = hs\nstations = /abs/st.geojson\n"
                          "[fires]\neval = A, B ,C\ntraining =\n"
                          "[params]\neps_m = 2500\nmin_pts = 4\nbound_slack_low = 0.5\n"
                          "weights = 1,1,1,1,1,1,1,1,1,1,0,2\n"
                          "[physical]\nbyram_exponent = 0.5\n"
                          "[client]\nkind = live\nmodel = m1\nmax_concurrency = 2\n");
    const RunConfig c = parse_config(in, "/base/dir");
    CHECK(c.hotspots_dir == "/base/dir/hs");
    CHECK(c.stations == "/abs/st.geojson");
    CHECK(c.out_dir == "/base/dir/runs");
    CHECK(c.eval_fires == std::vector<std::string>{"A", "B", "C"});
    CHECK(c.training_fires.empty());
    CHECK(c.eps_m == 2500.0);
    CHECK(c.min_pts == 4);
    CHECK(c.slack.low == 0.5);
    CHECK(c.weights[10] == 0.0);
    CHECK(c.weights[11] == 2.0);
    CHECK(c.physical.byram_exponent == 0.5);
    CHECK(c.client == ClientKind::live);
    CHECK(c.live.model == "m1");
    CHECK(c.agent_params().slack.low == 0.5);
    CHECK(c.agent_params().weights == c.weights);
}

TEST_CASE("dump_config round trips") {
    galtest::TempDir dir;
    const RunConfig a = load_config(galtest::synthetic_config(dir.path(), "eps_m = 3500\nanalog_k = 3\n").string());
    CHECK(a.eps_m == 3500.0);
    CHECK(a.analog_k == 3);
    CHECK_NOTHROW(validate_config(a));
    const std::string dumped = dump_config(a);
    std::istringstream in(dumped);
    const RunConfig b = parse_config(in, "/elsewhere");
    CHECK(dump_config(b) == dumped);
    CHECK(b.corpus_dir == a.corpus_dir);
}

TEST_CASE("configuration errors") {
    CHECK(parse_error("[data]\nhotspot_dir = x\n") == ErrorKind::schema);
    CHECK(parse_error("[extras]\nfoo = 1\n") == ErrorKind::schema);
    CHECK(parse_error("loose = 1\n") == ErrorKind::schema);
    CHECK(parse_error("[params]\neps_m = wide\n") == ErrorKind::precondition);
    CHECK(parse_error("[params]\nmin_pts = 2.5\n") == ErrorKind::precondition);
    CHECK(parse_error("[params]\nmin_pts = -1\n") == ErrorKind::precondition);
    CHECK(parse_error("[params]\nweights = 1,2\n") == ErrorKind::precondition);
    CHECK(parse_error("[params]\neps_m = 0\n") == ErrorKind::precondition);
    CHECK(parse_error("[params]\ndelta_threshold = 1\n") == ErrorKind::precondition);
    CHECK(parse_error("[params]\nbound_slack_high = 0.5\n") == ErrorKind::precondition);
    CHECK(parse_error("[params]\nweights = 0,0,0,0,0,0,0,0,0,0,0,0\n") == ErrorKind::precondition);
    CHECK(parse_error("[client]\nkind = oracle\n") == ErrorKind::precondition);
    CHECK(parse_error("[data\n") == ErrorKind::format);
    // parameters are fine; the data paths are not set
    CHECK(parse_error("[params]\neps_m = 3000\n") == ErrorKind::precondition);

    galtest::TempDir dir;
    RunConfig c = load_config(galtest::synthetic_config(dir.path()).string());
    c.population = (dir / "nope.asc").string();
    CHECK_THROWS_AS(validate_config(c), Error);
    c = load_config(galtest::synthetic_config(dir.path()).string());
    c.client = ClientKind::replay;
    CHECK_THROWS_AS(validate_config(c), Error);
    CHECK_THROWS_AS(load_config((dir / "missing.ini").string()), Error);
}
