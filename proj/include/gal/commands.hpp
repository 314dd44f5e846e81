#pragma once

// Subcommand implementations behind the `gal` binary. Each returns a process
// exit status (0 ok, 1 runtime failure, 2 input or validation failure) and
// writes diagnostics to `err`.

#include "gal/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gal {

struct GlobalOptions {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<ClientKind> client;
};

/// Loads the config, applies command-line overrides and validates it.
RunConfig effective_config(const GlobalOptions& opts);

struct FootprintArgs {
    std::string fire_id;
    std::string hotspots_path; // overrides the configured per-fire file
    std::string date;
};

struct PerceiveArgs {
    std::string fire_id;
    std::string date;
    bool json = false;
};

struct RunArgs {
    std::vector<std::string> fires; // empty: the configured eval fires
};

struct EvaluateArgs {
    std::string predictions_path;
};

int cmd_footprint(const GlobalOptions& opts, const FootprintArgs& args, std::ostream& out, std::ostream& err);
int cmd_perceive(const GlobalOptions& opts, const PerceiveArgs& args, std::ostream& out, std::ostream& err);
int cmd_corpus_build(const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const GlobalOptions& opts, const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const GlobalOptions& opts, const EvaluateArgs& args, std::ostream& out, std::ostream& err);

/// `<prefix>_<UTC %Y%m%dT%H%M%SZ>_<first 8 hex of the config hash>`, with a
/// numeric suffix when that directory already exists. Created on return.
std::string make_run_dir(const std::string& out_dir, const std::string& prefix, const RunConfig& cfg);

} // namespace gal
