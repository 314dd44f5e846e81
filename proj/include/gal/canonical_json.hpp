#pragma once

// Canonical JSON: sorted keys, floats with exactly four fractional digits,
// integers verbatim, missing values as null. Dumping, parsing and dumping
// again yields the same bytes.

#include "gal/consolidation.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace gal {

using json = nlohmann::json;

/// indent < 0 gives a single line.
std::string dump_canonical(const json& j, int indent = 2);

json to_json(const FusedWeather& w);
json to_json(const GlobalSnapshot& s);
json to_json(const ClusterFeatures& c);
json to_json(const TemporalAnchors& a);
json to_json(const EventDayContext& ctx);

FusedWeather weather_from_json(const json& j);
GlobalSnapshot snapshot_from_json(const json& j);
ClusterFeatures cluster_from_json(const json& j);
TemporalAnchors anchors_from_json(const json& j);

/// Throws Error(format) naming the missing or mistyped key.
EventDayContext context_from_json(const json& j);

void write_context_file(const std::string& path, const EventDayContext& ctx);
EventDayContext read_context_file(const std::string& path);

} // namespace gal
