#pragma once

// Run configuration: an INI-style file with [data], [fires], [params],
// [physical], [client] and [output] sections. Relative paths resolve against
// the config file's directory.

#include "gal/agent.hpp"
#include "gal/baselines.hpp"
#include "gal/clients.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gal {

enum class ClientKind { mock, replay, live };

std::string_view to_string(ClientKind k);
ClientKind parse_client_kind(std::string_view text);

struct RunConfig {
    // [data]
    std::string hotspots_dir; // <fire_id>.csv per fire
    std::string stations;
    std::string counties;
    std::string landcover;
    std::string population;   // optional
    std::string weather_dir;  // optional; <YYYY-MM-DD>/{bi,tmax,tmin,wind,fm1}.asc
    std::string ground_truth; // optional for run, required for corpus-build and evaluate
    std::string corpus_dir;
    std::string nlcd_mapping; // optional

    // [fires]
    std::vector<std::string> eval_fires;
    std::vector<std::string> training_fires;

    // [params]
    double eps_m = kDefaultEpsM;
    std::size_t min_pts = kDefaultMinPts;
    std::size_t top_k_clusters = kDefaultTopK;
    std::size_t analog_k = kDefaultAnalogK;
    double delta_threshold = kDefaultDeltaThreshold;
    BoundSlack slack;
    FeatureWeights weights = uniform_weights();
    double county_buffer_m = 10000.0;
    double station_radius_m = 10000.0;
    int max_attempts = kDefaultMaxAttempts;

    PhysicalParams physical;

    // [client]
    ClientKind client = ClientKind::mock;
    std::string replay_path;
    LiveSettings live;

    // [output]
    std::string out_dir = "runs";

    AgentParams agent_params() const;
};

/// Throws Error(schema) on unknown sections or keys, Error(precondition) on
/// out-of-range parameters or missing referenced paths.
RunConfig parse_config(std::istream& in, const std::string& base_dir);
RunConfig load_config(const std::string& path);

/// Checks parameter ranges and that every configured path exists.
void validate_config(const RunConfig& cfg);

/// Every key with its effective value, in a fixed order; parses back to an
/// equivalent RunConfig.
std::string dump_config(const RunConfig& cfg);

} // namespace gal
