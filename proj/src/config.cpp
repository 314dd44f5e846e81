#include "gal/config.hpp"

#include "gal/csv.hpp"
#include "gal/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace gal {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

std::string_view to_string(ClientKind k) {
    switch (k) {
    case ClientKind::mock: return "mock";
    case ClientKind::replay: return "replay";
    case ClientKind::live: return "live";
    }
    return "?";
}

ClientKind parse_client_kind(std::string_view text) {
    if (text == "mock") return ClientKind::mock;
    if (text == "replay") return ClientKind::replay;
    if (text == "live") return ClientKind::live;
    fail(ErrorKind::precondition, fmt::format("unknown client '{}' (expected mock|replay|live)", text));
}

AgentParams RunConfig::agent_params() const {
    AgentParams p;
    p.top_k = top_k_clusters;
    p.analog_k = analog_k;
    p.weights = weights;
    p.slack = slack;
    p.max_attempts = max_attempts;
    return p;
}

namespace {

struct Key {
    const char* section;
    const char* name;
    std::function<void(RunConfig&, const std::string&, const std::string& base)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string resolve(const std::string& value, const std::string& base) {
    if (value.empty()) return value;
    fs::path p(value);
    if (p.is_relative()) p = fs::path(base) / p;
    return p.lexically_normal().string();
}

double parse_double(const std::string& key, const std::string& v) {
    double d = 0.0;
    if (!csv::to_double(v, d)) fail(ErrorKind::precondition, fmt::format("config {}: '{}' is not a number", key, v));
    return d;
}

long long parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d != std::floor(d)) fail(ErrorKind::precondition, fmt::format("config {}: '{}' is not an integer", key, v));
    return static_cast<long long>(d);
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    const long long n = parse_int(key, v);
    if (n < 0) fail(ErrorKind::precondition, fmt::format("config {}: must be non-negative", key));
    return static_cast<std::size_t>(n);
}

std::vector<std::string> parse_list(const std::string& v) {
    std::vector<std::string> out;
    for (const std::string& item : csv::split_csv(v))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
}

std::string num(double v) { return csv::shortest(v); }

#define PATH_KEY(sec, key, field)                                                                   \
    Key{sec, key, [](RunConfig& c, const std::string& v, const std::string& b) { c.field = resolve(v, b); }, \
        [](const RunConfig& c) { return c.field; }}
#define DOUBLE_KEY(sec, key, field)                                                                 \
    Key{sec, key, [](RunConfig& c, const std::string& v, const std::string&) { c.field = parse_double(key, v); }, \
        [](const RunConfig& c) { return num(c.field); }}
#define COUNT_KEY(sec, key, field)                                                                  \
    Key{sec, key, [](RunConfig& c, const std::string& v, const std::string&) { c.field = parse_count(key, v); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }}
#define INT_KEY(sec, key, field)                                                                    \
    Key{sec, key,                                                                                   \
        [](RunConfig& c, const std::string& v, const std::string&) { c.field = static_cast<int>(parse_int(key, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }}
#define STRING_KEY(sec, key, field)                                                                 \
    Key{sec, key, [](RunConfig& c, const std::string& v, const std::string&) { c.field = v; },       \
        [](const RunConfig& c) { return c.field; }}

const std::vector<Key>& keys() {
    static const std::vector<Key> table{
        PATH_KEY("data", "hotspots_dir", hotspots_dir),
        PATH_KEY("data", "stations", stations),
        PATH_KEY("data", "counties", counties),
        PATH_KEY("data", "landcover", landcover),
        PATH_KEY("data", "population", population),
        PATH_KEY("data", "weather_dir", weather_dir),
        PATH_KEY("data", "ground_truth", ground_truth),
        PATH_KEY("data", "corpus_dir", corpus_dir),
        PATH_KEY("data", "nlcd_mapping", nlcd_mapping),
        Key{"fires", "eval", [](RunConfig& c, const std::string& v, const std::string&) { c.eval_fires = parse_list(v); },
            [](const RunConfig& c) { return join(c.eval_fires); }},
        Key{"fires", "training",
            [](RunConfig& c, const std::string& v, const std::string&) { c.training_fires = parse_list(v); },
            [](const RunConfig& c) { return join(c.training_fires); }},
        DOUBLE_KEY("params", "eps_m", eps_m),
        COUNT_KEY("params", "min_pts", min_pts),
        COUNT_KEY("params", "top_k_clusters", top_k_clusters),
        COUNT_KEY("params", "analog_k", analog_k),
        DOUBLE_KEY("params", "delta_threshold", delta_threshold),
        DOUBLE_KEY("params", "bound_slack_low", slack.low),
        DOUBLE_KEY("params", "bound_slack_high", slack.high),
        Key{"params", "weights",
            [](RunConfig& c, const std::string& v, const std::string&) {
                const auto items = parse_list(v);
                if (items.size() != kFeatureDims)
                    fail(ErrorKind::precondition,
                         fmt::format("config weights: expected {} values, got {}", kFeatureDims, items.size()));
                for (std::size_t i = 0; i < kFeatureDims; ++i) c.weights[i] = parse_double("weights", items[i]);
            },
            [](const RunConfig& c) {
                std::vector<std::string> parts;
                for (double w : c.weights) parts.push_back(num(w));
                return join(parts);
            }},
        DOUBLE_KEY("params", "county_buffer_m", county_buffer_m),
        DOUBLE_KEY("params", "station_radius_m", station_radius_m),
        INT_KEY("params", "max_attempts", max_attempts),
        DOUBLE_KEY("physical", "radiative_fraction_correction", physical.radiative_fraction_correction),
        DOUBLE_KEY("physical", "byram_coefficient", physical.byram_coefficient),
        DOUBLE_KEY("physical", "byram_exponent", physical.byram_exponent),
        DOUBLE_KEY("physical", "cluster_adjustment", physical.cluster_adjustment),
        Key{"client", "kind",
            [](RunConfig& c, const std::string& v, const std::string&) { c.client = parse_client_kind(v); },
            [](const RunConfig& c) { return std::string(to_string(c.client)); }},
        PATH_KEY("client", "replay_path", replay_path),
        STRING_KEY("client", "base_url", live.base_url),
        STRING_KEY("client", "path", live.path),
        STRING_KEY("client", "model", live.model),
        STRING_KEY("client", "api_key_env", live.api_key_env),
        DOUBLE_KEY("client", "temperature", live.temperature),
        INT_KEY("client", "timeout_s", live.timeout_s),
        INT_KEY("client", "retries", live.retries),
        INT_KEY("client", "max_concurrency", live.max_concurrency),
        PATH_KEY("output", "out_dir", out_dir),
    };
    return table;
}

#undef PATH_KEY
#undef DOUBLE_KEY
#undef COUNT_KEY
#undef INT_KEY
#undef STRING_KEY

void need_path(const std::string& key, const std::string& path, bool required) {
    if (path.empty()) {
        if (required) fail(ErrorKind::precondition, fmt::format("config: {} is not set", key));
        return;
    }
    if (!fs::exists(path)) fail(ErrorKind::precondition, fmt::format("config: {} '{}' does not exist", key, path));
}

} // namespace

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::format, fmt::format("config: {}", e.what()));
    }
    RunConfig cfg;
    cfg.out_dir = resolve(cfg.out_dir, base_dir);
    for (const auto& [section, body] : tree) {
        if (!body.data().empty() && body.empty())
            fail(ErrorKind::schema, fmt::format("config: key '{}' outside a section", section));
        for (const auto& [name, value] : body) {
            const Key* key = nullptr;
            for (const Key& k : keys())
                if (section == k.section && name == k.name) key = &k;
            if (!key) fail(ErrorKind::schema, fmt::format("config: unknown key [{}] {}", section, name));
            key->set(cfg, std::string(csv::trim(value.data())), base_dir);
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::precondition, fmt::format("cannot open config {}", path));
    const std::string base = fs::absolute(fs::path(path)).parent_path().string();
    try {
        return parse_config(in, base);
    } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("{}: {}", path, e.what()));
    }
}

void validate_config(const RunConfig& c) {
    require(c.eps_m > 0.0, "config eps_m must be positive");
    require(c.min_pts >= 1, "config min_pts must be >= 1");
    require(c.top_k_clusters >= 1, "config top_k_clusters must be >= 1");
    require(c.analog_k >= 1, "config analog_k must be >= 1");
    require(c.delta_threshold > 0.0 && c.delta_threshold < 1.0, "config delta_threshold must be in (0, 1)");
    require(c.slack.low > 0.0 && c.slack.low <= 1.0, "config bound_slack_low must be in (0, 1]");
    require(c.slack.high >= 1.0, "config bound_slack_high must be >= 1");
    bool any = false;
    for (double w : c.weights) {
        require(w >= 0.0, "config weights must be non-negative");
        any = any || w > 0.0;
    }
    require(any, "config weights must not all be zero");
    require(c.county_buffer_m >= 0.0, "config county_buffer_m must be non-negative");
    require(c.station_radius_m > 0.0, "config station_radius_m must be positive");
    require(c.max_attempts >= 1, "config max_attempts must be >= 1");
    require(c.physical.radiative_fraction_correction > 0.0, "config radiative_fraction_correction must be positive");
    require(c.physical.byram_coefficient > 0.0 && c.physical.byram_exponent > 0.0,
            "config Byram constants must be positive");
    require(c.physical.cluster_adjustment >= 0.0, "config cluster_adjustment must be non-negative");
    require(c.live.max_concurrency >= 1 && c.live.max_concurrency <= 1024, "config max_concurrency must be in [1, 1024]");
    require(c.live.retries >= 0 && c.live.timeout_s > 0, "config retries/timeout_s out of range");

    need_path("hotspots_dir", c.hotspots_dir, true);
    need_path("stations", c.stations, true);
    need_path("counties", c.counties, true);
    need_path("landcover", c.landcover, true);
    need_path("population", c.population, false);
    need_path("weather_dir", c.weather_dir, false);
    need_path("ground_truth", c.ground_truth, false);
    need_path("nlcd_mapping", c.nlcd_mapping, false);
    if (c.client == ClientKind::replay) need_path("replay_path", c.replay_path, true);
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const Key& k : keys()) {
        if (section != k.section) {
            if (!section.empty()) out << '\n';
            section = k.section;
            out << '[' << section << "]\n";
        }
        out << k.name << " = " << k.get(cfg) << '\n';
    }
    return out.str();
}

} // namespace gal
