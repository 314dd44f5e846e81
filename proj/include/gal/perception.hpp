#pragma once

// Perception script: a fixed-slot, unit-annotated text rendering of one
// event day. Sections use `##` headers so prompts can splice them.

#include "gal/consolidation.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gal {

inline constexpr std::size_t kDefaultTopK = 5;

struct PerceptionScript {
    std::string text;          // head + cluster_block
    std::string head;          // overview, affected areas, rolling metrics
    std::string cluster_block; // "## Cluster Details" section
    std::size_t k_used = 0;
    std::vector<std::string> na_fields; // "<scope>.<slot>", in render order
};

/// How a missing value feeds later arithmetic.
enum class NaDefault { zero, omit };

/// Checks canonical units on every slot (temperatures and brightness in
/// kelvin, wind >= 0 m/s, FM1 in percent, non-negative magnitudes). Throws
/// Error(unit) naming the offending slot.
const EventDayContext& unit_lock(const EventDayContext& ctx);

/// "NA" for an absent value, else the value at the slot's fixed precision.
/// Unknown slot names throw Error(schema).
std::string na_policy(std::string_view slot, std::optional<double> value);
NaDefault na_default(std::string_view slot);

PerceptionScript render_script(const EventDayContext& ctx, std::size_t top_k = kDefaultTopK);

/// Fixed-precision decimal without a negative zero.
std::string fixed(double v, int precision);

} // namespace gal
