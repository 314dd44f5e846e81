#include "gal/agent.hpp"
#include "gal/clients.hpp"
#include "gal/error.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cstdlib>
#include <thread>

using namespace gal;

namespace {

std::string day_prompt(double frp, const std::vector<AnalogRecord>& analogs) {
    const auto ctx = galtest::context("F", Date::from_ymd(2021, 8, 1), {galtest::cluster(0, 12, frp)});
    return build_day1_prompt(render_script(ctx), analogs).user_text;
}

Recommendation parse(const std::string& raw) {
    const auto v = validate_output(raw, {});
    REQUIRE(std::holds_alternative<Recommendation>(v));
    return std::get<Recommendation>(v);
}

AnalogRecord analog(const std::string& fire, double personnel, double cost) {
    AnalogRecord a;
    a.fire_id = fire;
    a.date = Date::from_ymd(2020, 8, 1);
    a.personnel = personnel;
    a.daily_cost = cost;
    return a;
}

} // namespace

TEST_CASE("mock client is a pure function of the prompt") {
    MockClient a, b;
    const std::string user = day_prompt(250.0, {analog("X", 200, 1.0), analog("Y", 400, 3.0)});
    const std::string r1 = a.complete(system_prompt(), user);
    CHECK(a.complete(system_prompt(), user) == r1);
    CHECK(b.complete(system_prompt(), user) == r1);
    CHECK(b.complete("other system text", user) == r1);

    // f = 0.5 + 1.5 * 250 / 750 = 1.0, base = analog medians
    const Recommendation rec = parse(r1);
    CHECK(rec.personnel == 300);
    CHECK(rec.daily_budget_usd == 2000000);
    CHECK(rec.confidence == 2);
    CHECK(rec.indicators[0] == Level::moderate); // 250 MW sits in [200, 1000)
}

TEST_CASE("mock client without analogs and with a previous day") {
    MockClient m;
    // 12 points, FRP 0 -> f = 0.5, base personnel 25 + 48 = 73
    const Recommendation day1 = parse(m.complete(system_prompt(), day_prompt(0.0, {})));
    CHECK(day1.personnel == 37); // llround(36.5)
    CHECK(day1.daily_budget_usd == 91250);

    const std::string user = "## Previous Analysis Context\n- Previous personnel: 100 people\n"
                             "- Previous daily budget: 400000\n" +
                             day_prompt(0.0, {});
    const Recommendation inc = parse(m.complete(system_prompt(), user));
    CHECK(inc.personnel == 68); // (36.5 + 100) / 2 = 68.25
    CHECK(inc.confidence == 3);
}

TEST_CASE("mock client honours a correction block") {
    MockClient m;
    const std::string user = day_prompt(250.0, {analog("X", 200, 1.0)}) +
                             correction_block({FailureCategory::range_violation, "x", "y"},
                                              AnalogBounds{Range{10, 150}, Range{0.1, 0.5}});
    const Recommendation r = parse(m.complete(system_prompt(), user));
    CHECK(r.personnel == 150);
    CHECK(r.daily_budget_usd == 500000);
}

TEST_CASE("replay client") {
    const PromptPair p{system_prompt(), "hello"};
    ReplayClient from_map({{prompt_hash(p), "{\"ok\":1}"}});
    CHECK(from_map.complete(p.system_text, p.user_text) == "{\"ok\":1}");
    CHECK_THROWS_AS(from_map.complete(p.system_text, "other"), Error);

    galtest::TempDir dir;
    const PromptPair q{system_prompt(), "second"};
    nlohmann::json audit{{"attempts", {{{"prompt_hash", prompt_hash(q)}, {"raw", "R2"}, {"failure", nullptr}}}}};
    galtest::write_file(dir / "t.jsonl", nlohmann::json{{"prompt_hash", prompt_hash(p)}, {"response", "R1"}}.dump() +
                                             "\n\n" + audit.dump() + "\n");
    ReplayClient file((dir / "t.jsonl").string());
    CHECK(file.size() == 2);
    CHECK(file.complete(p.system_text, p.user_text) == "R1");
    CHECK(file.complete(q.system_text, q.user_text) == "R2");

    galtest::write_file(dir / "bad.jsonl", "{\"x\":1}\n");
    CHECK_THROWS_AS(ReplayClient((dir / "bad.jsonl").string()), Error);
    galtest::write_file(dir / "worse.jsonl", "not json\n");
    CHECK_THROWS_AS(ReplayClient((dir / "worse.jsonl").string()), Error);
    CHECK_THROWS_AS(ReplayClient((dir / "missing.jsonl").string()), Error);
}

TEST_CASE("live client against a local server") {
    httplib::Server server;
    std::string seen_auth, seen_body;
    int calls = 0;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        seen_auth = req.get_header_value("Authorization");
        seen_body = req.body;
        if (calls == 1) {
            res.status = 503;
            return;
        }
        nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "ANSWER"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"choices\": []}", "application/json");
    });
    server.Post("/denied", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    LiveSettings s;
    s.base_url = "http://127.0.0.1:" + std::to_string(port);
    s.model = "test-model";
    s.api_key_env = "GAL_TEST_KEY_FOR_LIVE_CLIENT";
    s.timeout_s = 5;
    s.retries = 1;
    ::setenv(s.api_key_env.c_str(), "sekrit", 1);
    LiveClient client(s);
    CHECK(client.complete("SYS", "USER") == "ANSWER");
    CHECK(calls == 2); // one retry after the 503
    CHECK(seen_auth == "Bearer sekrit");
    const auto body = nlohmann::json::parse(seen_body);
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["messages"][0]["content"] == "SYS");
    CHECK(body["messages"][1]["role"] == "user");
    CHECK(client.settings()["model"] == "test-model");
    CHECK_FALSE(client.settings().contains("api_key_env"));

    ::unsetenv(s.api_key_env.c_str());
    CHECK(client.complete("SYS", "USER") == "ANSWER");
    CHECK(seen_auth.empty());

    LiveSettings broken = s;
    broken.path = "/broken";
    CHECK_THROWS_AS(LiveClient(broken).complete("a", "b"), Error);
    LiveSettings denied = s;
    denied.path = "/denied";
    CHECK_THROWS_AS(LiveClient(denied).complete("a", "b"), Error);

    server.stop();
    t.join();

    LiveSettings down = s;
    down.retries = 0;
    down.timeout_s = 1;
    try {
        LiveClient(down).complete("a", "b");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::runtime);
    }
    LiveSettings bad = s;
    bad.max_concurrency = 0;
    CHECK_THROWS_AS(LiveClient{bad}, Error);
}
