#pragma once

// Prompt assembly, strict output validation and the bounded re-prompt loop.

#include "gal/analogs.hpp"
#include "gal/perception.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gal {

class CompletionClient;

enum class Level { minimal, low, moderate, high, critical };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

inline constexpr std::array<std::string_view, 6> kIndicatorNames{
    "spread_containment_difficulty", "resource_access_deployment", "weather_escalation_risk",
    "terrain_operational_complexity", "population_exposure_density", "fire_station_coverage"};

inline constexpr std::array<std::string_view, 4> kReasoningNames{
    "situation_comparison", "personnel_reasoning", "budget_reasoning", "overall_reasoning"};

struct Recommendation {
    long long personnel = 0;        // people
    long long daily_budget_usd = 0; // USD, today's new cost only
    int confidence = 1;             // 1..5
    std::array<Level, 6> indicators{};
    std::array<std::string, 4> reasoning; // in kReasoningNames order

    friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

/// The output-schema document for a recommendation.
nlohmann::json to_json(const Recommendation& rec);

struct PromptPair {
    std::string system_text;
    std::string user_text;
};

const std::string& system_prompt();

/// SHA-256 over system text, a blank line, then user text.
std::string prompt_hash(const PromptPair& prompt);

std::string render_rag_block(const std::vector<AnalogRecord>& analogs);

PromptPair build_day1_prompt(const PerceptionScript& script, const std::vector<AnalogRecord>& analogs);

struct CumulativeTotals {
    double cost_usd = 0.0;      // sum of prior daily budgets
    double personnel_days = 0.0;
};

PromptPair build_incremental_prompt(const PerceptionScript& script, const std::vector<AnalogRecord>& analogs,
                                    const Recommendation& prev, const TemporalAnchors& anchors,
                                    const CumulativeTotals& cumulative);

enum class FailureCategory { not_json, schema_violation, unit_violation, range_violation };

std::string_view to_string(FailureCategory c);

struct ValidationFailure {
    FailureCategory category = FailureCategory::not_json;
    std::string path; // dotted, "$" for the document root
    std::string message;
};

using ValidationResult = std::variant<Recommendation, ValidationFailure>;

/// Checks run in a fixed order: JSON syntax, key structure, unit strings,
/// value types and enums, then ranges. The first failure is returned.
/// Type and enum failures are reported as schema violations.
ValidationResult validate_output(std::string_view raw, const AnalogBounds& bounds);

/// Appended to the user text after a rejected response.
std::string correction_block(const ValidationFailure& failure, const AnalogBounds& bounds);

inline constexpr int kDefaultMaxAttempts = 3;

struct Attempt {
    std::string prompt_hash;
    std::string raw;
    std::optional<ValidationFailure> failure;
};

struct LoopResult {
    Recommendation recommendation;
    std::vector<Attempt> attempts;
    bool fallback = false;
};

/// Median analog personnel and cost (midpoint for even counts), confidence 1,
/// every indicator moderate. Throws Error(precondition) without analogs.
Recommendation fallback_recommendation(const std::vector<AnalogRecord>& analogs);

LoopResult reprompt_loop(const PromptPair& prompt, CompletionClient& client, const AnalogBounds& bounds,
                         const std::vector<AnalogRecord>& analogs, int max_attempts = kDefaultMaxAttempts);

enum class Mode { day1, incremental };

struct AgentParams {
    std::size_t top_k = kDefaultTopK;
    std::size_t analog_k = kDefaultAnalogK;
    FeatureWeights weights = uniform_weights();
    BoundSlack slack;
    int max_attempts = kDefaultMaxAttempts;
};

struct DayInputs {
    const EventDayContext* context = nullptr;
    std::span<const EventDayContext> prior; // same event, time-ordered
    Mode mode = Mode::day1;
    const Recommendation* previous = nullptr; // required for incremental
    CumulativeTotals cumulative;
};

struct DayResult {
    Recommendation recommendation;
    PerceptionScript script;
    PromptPair prompt;
    std::vector<AnalogRecord> analogs;
    LoopResult loop;
    nlohmann::json audit; // one audit-log record
};

DayResult recommend_day(const DayInputs& in, const Corpus& corpus, CompletionClient& client,
                        const AgentParams& params = {});

} // namespace gal
