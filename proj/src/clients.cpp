#include "gal/clients.hpp"

#include "gal/agent.hpp"
#include "gal/error.hpp"
#include "gal/hash.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <thread>

namespace gal {

namespace {

std::optional<double> find_number(const std::string& text, const std::regex& re) {
    std::smatch m;
    if (!std::regex_search(text, m, re)) return std::nullopt;
    const std::string v = m[1].str();
    if (v == "NA") return std::nullopt;
    return std::stod(v);
}

Level bucket(std::optional<double> v, std::initializer_list<double> cuts, Level missing) {
    if (!v) return missing;
    int i = 0;
    for (double c : cuts) {
        if (*v < c) return static_cast<Level>(i);
        ++i;
    }
    return Level::critical;
}

Level reverse_bucket(std::optional<double> v, std::initializer_list<double> cuts, Level missing) {
    // Larger values mean better coverage, so they map to lower concern.
    if (!v) return missing;
    int i = 4;
    for (double c : cuts) {
        if (*v < c) return static_cast<Level>(i);
        --i;
    }
    return Level::minimal;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return median_sorted(v);
}

} // namespace

std::string MockClient::complete(const std::string&, const std::string& user) {
    static const std::regex re_points(R"(- Total Fire Points: (\d+))");
    static const std::regex re_frp(R"(- Total FRP: ([0-9.]+|NA) MW)");
    static const std::regex re_rag(R"(Personnel=([0-9.]+), Daily_Budget=\$([0-9.]+))");
    static const std::regex re_prev_p(R"(- Previous personnel: (\d+) people)");
    static const std::regex re_prev_c(R"(- Previous daily budget: (\d+))");
    static const std::regex re_wind(R"(Wind=([0-9.]+|NA) m/s)");
    static const std::regex re_spread(R"(- Mean spread potential: ([0-9.]+|NA))");
    static const std::regex re_pop(R"(- Total Population Affected: ([0-9]+|NA))");
    static const std::regex re_stations(R"(- Fire stations in area: (\d+))");
    static const std::regex re_nearest(R"(- Nearest station: ([0-9.]+|NA) mile)");
    static const std::regex re_allow_p(R"(Allowed daily_personnel range: \[([0-9.]+), ([0-9.]+)\])");
    static const std::regex re_allow_c(R"(Allowed daily_budget range: \[([0-9.]+), ([0-9.]+)\])");

    const double points = find_number(user, re_points).value_or(0.0);
    const double frp = find_number(user, re_frp).value_or(0.0);

    std::vector<double> ap, ac;
    for (auto it = std::sregex_iterator(user.begin(), user.end(), re_rag); it != std::sregex_iterator(); ++it) {
        ap.push_back(std::stod((*it)[1].str()));
        ac.push_back(std::stod((*it)[2].str()));
    }

    double base_p = ap.empty() ? 25.0 + 4.0 * points : median(ap);
    double base_c = ac.empty() ? 2500.0 * base_p : median(ac);
    const double f = 0.5 + 1.5 * frp / (frp + 500.0);
    double p = base_p * f;
    double c = base_c * f;

    const auto prev_p = find_number(user, re_prev_p);
    const auto prev_c = find_number(user, re_prev_c);
    if (prev_p) p = 0.5 * p + 0.5 * *prev_p;
    if (prev_c) c = 0.5 * c + 0.5 * *prev_c;

    auto clamp_to = [](double v, double lo, double hi) {
        lo = std::ceil(lo);
        hi = std::floor(hi);
        return lo <= hi ? std::clamp(v, lo, hi) : v;
    };
    if (!ap.empty()) {
        p = clamp_to(p, 0.25 * *std::min_element(ap.begin(), ap.end()), 4.0 * *std::max_element(ap.begin(), ap.end()));
        c = clamp_to(c, 0.25 * *std::min_element(ac.begin(), ac.end()), 4.0 * *std::max_element(ac.begin(), ac.end()));
    }
    std::smatch m;
    if (std::regex_search(user, m, re_allow_p)) p = clamp_to(p, std::stod(m[1].str()), std::stod(m[2].str()));
    if (std::regex_search(user, m, re_allow_c)) c = clamp_to(c, std::stod(m[1].str()), std::stod(m[2].str()));

    const auto wind = find_number(user, re_wind);
    const auto spread = find_number(user, re_spread);
    const auto pop = find_number(user, re_pop);
    const auto stations = find_number(user, re_stations);
    const auto nearest = find_number(user, re_nearest);

    Recommendation rec;
    rec.personnel = std::max(0LL, std::llround(p));
    rec.daily_budget_usd = std::max(0LL, std::llround(c));
    rec.confidence = 2 + (ap.size() >= 3 ? 1 : 0) + (prev_p ? 1 : 0);
    rec.indicators = {bucket(frp, {50, 200, 1000, 3000}, Level::moderate),
                      bucket(nearest, {2, 5, 10, 20}, Level::critical),
                      bucket(wind, {2, 4, 6, 9}, Level::moderate),
                      bucket(spread, {0.2, 0.4, 0.6, 0.8}, Level::moderate),
                      bucket(pop, {100, 1000, 10000, 50000}, Level::moderate),
                      reverse_bucket(stations, {1, 2, 4, 6}, Level::critical)};
    rec.reasoning = {
        fmt::format("{} fire points and {:.1f} MW total FRP today{}.", points, frp,
                    prev_p ? " compared with the previous analysis" : ""),
        fmt::format("Personnel scaled from {} analog days by intensity factor {:.3f}.", ap.size(), f),
        fmt::format("Budget scaled from the analog median by the same factor{}.",
                    prev_c ? ", smoothed toward yesterday" : ""),
        "Deterministic mock estimate for pipeline testing."};
    return to_json(rec).dump();
}

ReplayClient::ReplayClient(std::map<std::string, std::string> responses) : responses_(std::move(responses)) {}

ReplayClient::ReplayClient(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::runtime, fmt::format("cannot open replay transcript {}", path));
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(ErrorKind::format, fmt::format("{}: line {}: {}", path, row, e.what()));
        }
        if (j.contains("attempts")) {
            for (const auto& a : j["attempts"])
                if (a.contains("prompt_hash") && a.contains("raw"))
                    responses_.emplace(a["prompt_hash"].get<std::string>(), a["raw"].get<std::string>());
        } else if (j.contains("prompt_hash") && j.contains("response")) {
            responses_.emplace(j["prompt_hash"].get<std::string>(), j["response"].get<std::string>());
        } else {
            fail(ErrorKind::format, fmt::format("{}: line {}: not a transcript record", path, row));
        }
    }
}

std::string ReplayClient::complete(const std::string& system_text, const std::string& user_text) {
    const std::string h = prompt_hash({system_text, user_text});
    auto it = responses_.find(h);
    if (it == responses_.end()) fail(ErrorKind::runtime, fmt::format("replay: no transcript for prompt {}", h));
    return it->second;
}

LiveClient::LiveClient(LiveSettings settings)
    : settings_(std::move(settings)), slots_(std::max(1, settings_.max_concurrency)) {
    require(settings_.max_concurrency >= 1 && settings_.max_concurrency <= 1024,
            "live client: max_concurrency must be in [1, 1024]");
}

nlohmann::json LiveClient::settings() const {
    return {{"base_url", settings_.base_url}, {"path", settings_.path}, {"model", settings_.model},
            {"temperature", settings_.temperature}};
}

std::string LiveClient::complete(const std::string& system_text, const std::string& user_text) {
    const nlohmann::json body{{"model", settings_.model},
                              {"temperature", settings_.temperature},
                              {"messages",
                               {{{"role", "system"}, {"content", system_text}},
                                {{"role", "user"}, {"content", user_text}}}}};
    httplib::Headers headers;
    if (const char* key = std::getenv(settings_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};

    httplib::Client client(settings_.base_url);
    client.set_connection_timeout(settings_.timeout_s, 0);
    client.set_read_timeout(settings_.timeout_s, 0);
    client.set_write_timeout(settings_.timeout_s, 0);

    std::string last_error;
    for (int attempt = 0; attempt <= settings_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 * attempt));
        auto res = client.Post(settings_.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = fmt::format("HTTP {}", res->status);
            continue;
        }
        if (res->status != 200)
            fail(ErrorKind::runtime, fmt::format("live client: HTTP {}: {}", res->status, res->body));
        try {
            const auto j = nlohmann::json::parse(res->body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::runtime, fmt::format("live client: unexpected response body: {}", e.what()));
        }
    }
    fail(ErrorKind::runtime, fmt::format("live client: request failed after {} attempts: {}",
                                         settings_.retries + 1, last_error));
}

} // namespace gal
