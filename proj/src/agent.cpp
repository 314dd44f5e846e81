#include "gal/agent.hpp"

#include "gal/canonical_json.hpp"
#include "gal/clients.hpp"
#include "gal/error.hpp"
#include "gal/hash.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace gal {

namespace {

constexpr std::array<std::string_view, 5> kLevelNames{"minimal", "low", "moderate", "high", "critical"};

const char* const kSystemPrompt = R"(You are a wildfire analysis and resource management expert. You must return ONLY a valid JSON object following the exact schema provided below.

### Global Guidelines
- The task is to estimate TODAY's required daily_personnel and daily_budget.
- reasoning must explain how terrain, weather, fire intensity, population exposure, and resource accessibility shape your judgment, considering both current conditions and previous analysis context.
- daily_personnel is the total integer headcount assigned today (all crews/engines/aviation modules plus command/overhead/support).
- daily_budget is the **new cost incurred today only**, in USD.

### Resource Estimation Principles
- If the fire surges, remember resources are finite-do not assume cost and personnel can scale proportionally.
- When the fire eases, non-suppression needs persist (patrol, mop-up, rehab, logistics); budget and staffing may still be required.
- In "stable" periods, account for cumulative costs and crew fatigue-budgets and crews are not unlimited.
- No detected hotspots ≠ full extinguishment; avoid indiscriminate cuts and maintain a prudent baseline.
- Weigh these trade-offs and produce a balanced, defensible recommendation for today's personnel and today's spend. Include any key assumptions and risks.
- **Common pitfall**: after you've committed resources and the fire is "under control" but not yet stable, that actually signals under-resourcing-maintain or increase resources until true stability is confirmed.

### Analysis Approach
- Analyze the fire situation holistically, considering today's conditions and changes from the previous analysis.
- Provide updated estimates for required daily_personnel and daily_budget based on your professional judgment.

### Output Schema (STRICT JSON; no extra keys; no comments)
{
  "analysis_reasoning": {
    "situation_comparison": "<2-3 sentences comparing today vs yesterday>",
    "personnel_reasoning": "<2-3 sentences explaining daily_personnel changes>",
    "budget_reasoning": "<2-3 sentences explaining daily_budget changes>",
    "overall_reasoning": "<2-3 sentences with overall change assessment>"
  },
  "resource_requirements": {
    "daily_personnel": {
      "value": "<integer>",
      "unit": "people"
    },
    "daily_budget": {
      "value": "<integer>",
      "unit": "USD"
    }
  },
  "confidence": {
    "score": "<1-5 integer>"
  },
  "intermediate_indicators": {
    "spread_containment_difficulty": "<minimal|low|moderate|high|critical>",
    "resource_access_deployment": "<minimal|low|moderate|high|critical>",
    "weather_escalation_risk": "<minimal|low|moderate|high|critical>",
    "terrain_operational_complexity": "<minimal|low|moderate|high|critical>",
    "population_exposure_density": "<minimal|low|moderate|high|critical>",
    "fire_station_coverage": "<minimal|low|moderate|high|critical>"
  }
})";

std::string usd_int(double usd) { return fmt::format("{}", std::llround(usd)); }

std::string opt_usd(const std::optional<WindowStats>& w, double WindowStats::*f) {
    return w ? "$" + usd_int((*w).*f * 1e6) : "NA";
}

std::string opt_int(const std::optional<WindowStats>& w, double WindowStats::*f) {
    return w ? usd_int((*w).*f) : "NA";
}

std::string trend_text(const TemporalAnchors& a, const char* key) {
    auto it = a.trends.find(key);
    return it == a.trends.end() ? "NA" : std::string(trend_word(it->second));
}

ValidationFailure failure(FailureCategory c, std::string path, std::string message) {
    return {c, std::move(path), std::move(message)};
}

// Exact key set of an object. Missing keys are reported in schema order,
// then unexpected keys in sorted order.
std::optional<ValidationFailure> check_keys(const nlohmann::json& j, const std::string& path,
                                            std::span<const std::string_view> keys) {
    const std::string where = path.empty() ? "$" : path;
    if (!j.is_object())
        return failure(FailureCategory::schema_violation, where, "expected an object");
    auto child = [&](std::string_view k) { return path.empty() ? std::string(k) : path + "." + std::string(k); };
    for (std::string_view k : keys)
        if (!j.contains(std::string(k))) return failure(FailureCategory::schema_violation, child(k), "missing key");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            return failure(FailureCategory::schema_violation, child(it.key()), "unexpected key");
    return std::nullopt;
}

constexpr std::array<std::string_view, 4> kTopKeys{"analysis_reasoning", "resource_requirements", "confidence",
                                                   "intermediate_indicators"};
constexpr std::array<std::string_view, 2> kResourceKeys{"daily_personnel", "daily_budget"};
constexpr std::array<std::string_view, 2> kQuantityKeys{"value", "unit"};
constexpr std::array<std::string_view, 1> kConfidenceKeys{"score"};

std::optional<ValidationFailure> check_schema(const nlohmann::json& j) {
    if (auto f = check_keys(j, "", kTopKeys)) return f;
    if (auto f = check_keys(j["analysis_reasoning"], "analysis_reasoning", kReasoningNames)) return f;
    const auto& rr = j["resource_requirements"];
    if (auto f = check_keys(rr, "resource_requirements", kResourceKeys)) return f;
    for (std::string_view k : kResourceKeys)
        if (auto f = check_keys(rr[std::string(k)], "resource_requirements." + std::string(k), kQuantityKeys))
            return f;
    if (auto f = check_keys(j["confidence"], "confidence", kConfidenceKeys)) return f;
    if (auto f = check_keys(j["intermediate_indicators"], "intermediate_indicators", kIndicatorNames)) return f;
    return std::nullopt;
}

std::optional<ValidationFailure> check_units(const nlohmann::json& j) {
    const auto& rr = j["resource_requirements"];
    const std::pair<const char*, const char*> expected[] = {{"daily_personnel", "people"},
                                                            {"daily_budget", "USD"}};
    for (const auto& [key, unit] : expected) {
        const auto& u = rr[key]["unit"];
        if (!u.is_string() || u.get<std::string>() != unit)
            return failure(FailureCategory::unit_violation, fmt::format("resource_requirements.{}.unit", key),
                           fmt::format("unit must be \"{}\", got {}", unit, u.dump()));
    }
    return std::nullopt;
}

} // namespace

std::string_view to_string(Level level) { return kLevelNames[static_cast<std::size_t>(level)]; }

std::optional<Level> parse_level(std::string_view text) {
    for (std::size_t i = 0; i < kLevelNames.size(); ++i)
        if (kLevelNames[i] == text) return static_cast<Level>(i);
    return std::nullopt;
}

std::string_view to_string(FailureCategory c) {
    switch (c) {
    case FailureCategory::not_json: return "not_json";
    case FailureCategory::schema_violation: return "schema_violation";
    case FailureCategory::unit_violation: return "unit_violation";
    case FailureCategory::range_violation: return "range_violation";
    }
    return "?";
}

nlohmann::json to_json(const Recommendation& rec) {
    nlohmann::json reasoning = nlohmann::json::object();
    for (std::size_t i = 0; i < kReasoningNames.size(); ++i) reasoning[std::string(kReasoningNames[i])] = rec.reasoning[i];
    nlohmann::json indicators = nlohmann::json::object();
    for (std::size_t i = 0; i < kIndicatorNames.size(); ++i)
        indicators[std::string(kIndicatorNames[i])] = to_string(rec.indicators[i]);
    return {{"analysis_reasoning", reasoning},
            {"resource_requirements",
             {{"daily_personnel", {{"value", rec.personnel}, {"unit", "people"}}},
              {"daily_budget", {{"value", rec.daily_budget_usd}, {"unit", "USD"}}}}},
            {"confidence", {{"score", rec.confidence}}},
            {"intermediate_indicators", indicators}};
}

const std::string& system_prompt() {
    static const std::string text = kSystemPrompt;
    return text;
}

std::string prompt_hash(const PromptPair& prompt) {
    return sha256_hex(prompt.system_text + "\n\n" + prompt.user_text);
}

std::string render_rag_block(const std::vector<AnalogRecord>& analogs) {
    std::string out = "## Historical Context (RAG)\n";
    if (analogs.empty()) return out + "- no analogs available\n";
    for (const AnalogRecord& a : analogs)
        out += fmt::format("- [{} {}] sim={} | Personnel={}, Daily_Budget=${}\n", a.fire_id, a.date.iso(),
                           fixed(a.similarity, 4), fixed(a.personnel, 1), fixed(a.daily_cost * 1e6, 1));
    return out;
}

PromptPair build_day1_prompt(const PerceptionScript& script, const std::vector<AnalogRecord>& analogs) {
    PromptPair p;
    p.system_text = system_prompt();
    p.user_text = script.head + render_rag_block(analogs) + "\n" + script.cluster_block;
    return p;
}

PromptPair build_incremental_prompt(const PerceptionScript& script, const std::vector<AnalogRecord>& analogs,
                                    const Recommendation& prev, const TemporalAnchors& a,
                                    const CumulativeTotals& cumulative) {
    const std::string& prev_reasoning = prev.reasoning[3];
    std::string u;
    u += "## Previous Analysis Context\n";
    u += fmt::format("- Previous personnel: {} people\n", prev.personnel);
    u += fmt::format("- Previous daily budget: {}\n", prev.daily_budget_usd);
    u += fmt::format("- Total cumulative cost: ${}\n", usd_int(cumulative.cost_usd));
    u += fmt::format("- Previous reasoning: {}\n", prev_reasoning.empty() ? "NA" : prev_reasoning);
    u += '\n';
    u += "## Cumulative Context\n";
    u += fmt::format("- Total cumulative cost: ${}\n", usd_int(cumulative.cost_usd));
    u += fmt::format("- Total cumulative personnel-days: {}\n", usd_int(cumulative.personnel_days));
    u += fmt::format("- Days since fire start: {}\n", a.days_since_start);
    u += fmt::format("- 3-day rolling avg daily cost: {}\n", opt_usd(a.cost, &WindowStats::avg3));
    u += fmt::format("- 3-day rolling avg daily personnel: {}\n", opt_int(a.personnel, &WindowStats::avg3));
    u += fmt::format("- 7-day rolling avg daily cost: {}\n", opt_usd(a.cost, &WindowStats::avg7));
    u += fmt::format("- 7-day rolling avg daily personnel: {}\n", opt_int(a.personnel, &WindowStats::avg7));
    u += fmt::format("- Recent cost trend: {}\n", trend_text(a, "cost"));
    u += fmt::format("- Recent personnel trend: {}\n", trend_text(a, "personnel"));
    u += '\n';

    PromptPair p;
    p.system_text = system_prompt();
    p.user_text = u + script.head + render_rag_block(analogs) + "\n" + script.cluster_block;
    return p;
}

ValidationResult validate_output(std::string_view raw, const AnalogBounds& bounds) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
        return failure(FailureCategory::not_json, "$", e.what());
    }
    if (auto f = check_schema(j)) return *f;
    if (auto f = check_units(j)) return *f;

    Recommendation rec;
    for (std::size_t i = 0; i < kReasoningNames.size(); ++i) {
        const auto& v = j["analysis_reasoning"][std::string(kReasoningNames[i])];
        if (!v.is_string())
            return failure(FailureCategory::schema_violation,
                           fmt::format("analysis_reasoning.{}", kReasoningNames[i]), "expected a string");
        rec.reasoning[i] = v.get<std::string>();
    }
    const auto& rr = j["resource_requirements"];
    const auto& pv = rr["daily_personnel"]["value"];
    if (!pv.is_number_integer())
        return failure(FailureCategory::schema_violation, "resource_requirements.daily_personnel.value",
                       "expected an integer");
    const auto& bv = rr["daily_budget"]["value"];
    if (!bv.is_number_integer())
        return failure(FailureCategory::schema_violation, "resource_requirements.daily_budget.value",
                       "expected an integer");
    const auto& sv = j["confidence"]["score"];
    if (!sv.is_number_integer())
        return failure(FailureCategory::schema_violation, "confidence.score", "expected an integer");
    for (std::size_t i = 0; i < kIndicatorNames.size(); ++i) {
        const std::string path = fmt::format("intermediate_indicators.{}", kIndicatorNames[i]);
        const auto& v = j["intermediate_indicators"][std::string(kIndicatorNames[i])];
        if (!v.is_string()) return failure(FailureCategory::schema_violation, path, "expected a string");
        const auto level = parse_level(v.get<std::string>());
        if (!level)
            return failure(FailureCategory::schema_violation, path,
                           fmt::format("'{}' is not one of minimal|low|moderate|high|critical", v.get<std::string>()));
        rec.indicators[i] = *level;
    }

    // Ranges. Values beyond 64-bit range are reported as range failures too.
    auto as_ll = [](const nlohmann::json& v) -> std::optional<long long> {
        if (v.is_number_unsigned()) {
            const auto u = v.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) return std::nullopt;
            return static_cast<long long>(u);
        }
        return v.get<long long>();
    };
    const auto personnel = as_ll(pv);
    if (!personnel || *personnel < 0)
        return failure(FailureCategory::range_violation, "resource_requirements.daily_personnel.value",
                       "must be a non-negative integer");
    const auto budget = as_ll(bv);
    if (!budget || *budget < 0)
        return failure(FailureCategory::range_violation, "resource_requirements.daily_budget.value",
                       "must be a non-negative integer");
    const auto score = as_ll(sv);
    if (!score || *score < 1 || *score > 5)
        return failure(FailureCategory::range_violation, "confidence.score", "must be between 1 and 5");
    if (bounds.personnel) {
        const double v = static_cast<double>(*personnel);
        if (v < bounds.personnel->lo || v > bounds.personnel->hi)
            return failure(FailureCategory::range_violation, "resource_requirements.daily_personnel.value",
                           fmt::format("{} is outside the analog range [{}, {}] people", *personnel,
                                       fixed(bounds.personnel->lo, 1), fixed(bounds.personnel->hi, 1)));
    }
    if (bounds.cost_musd) {
        const double v = static_cast<double>(*budget) / 1e6;
        if (v < bounds.cost_musd->lo || v > bounds.cost_musd->hi)
            return failure(FailureCategory::range_violation, "resource_requirements.daily_budget.value",
                           fmt::format("{} is outside the analog range [{}, {}] USD", *budget,
                                       fixed(bounds.cost_musd->lo * 1e6, 0), fixed(bounds.cost_musd->hi * 1e6, 0)));
    }
    rec.personnel = *personnel;
    rec.daily_budget_usd = *budget;
    rec.confidence = static_cast<int>(*score);
    return rec;
}

std::string correction_block(const ValidationFailure& f, const AnalogBounds& bounds) {
    std::string out = "\n## Correction Required\n";
    out += fmt::format("- Previous response rejected: {} at {}: {}\n", to_string(f.category), f.path, f.message);
    out += "- Return ONLY the JSON object in the output schema: no extra keys, integer values, units \"people\" and \"USD\".\n";
    if (bounds.personnel)
        out += fmt::format("- Allowed daily_personnel range: [{}, {}] people\n", fixed(bounds.personnel->lo, 1),
                           fixed(bounds.personnel->hi, 1));
    if (bounds.cost_musd)
        out += fmt::format("- Allowed daily_budget range: [{}, {}] USD\n", fixed(bounds.cost_musd->lo * 1e6, 0),
                           fixed(bounds.cost_musd->hi * 1e6, 0));
    return out;
}

Recommendation fallback_recommendation(const std::vector<AnalogRecord>& analogs) {
    if (analogs.empty())
        fail(ErrorKind::precondition, "validation failed on every attempt and no analogs are available for fallback");
    std::vector<double> p, c;
    for (const AnalogRecord& a : analogs) {
        p.push_back(a.personnel);
        c.push_back(a.daily_cost);
    }
    std::sort(p.begin(), p.end());
    std::sort(c.begin(), c.end());
    Recommendation rec;
    rec.personnel = std::llround(median_sorted(p));
    rec.daily_budget_usd = std::llround(median_sorted(c) * 1e6);
    rec.confidence = 1;
    rec.indicators.fill(Level::moderate);
    rec.reasoning = {"Fallback: no valid model response; using analog medians.",
                     "Personnel set to the median of retrieved analog days.",
                     "Budget set to the median of retrieved analog days.",
                     "Analog-median fallback after repeated validation failures."};
    return rec;
}

LoopResult reprompt_loop(const PromptPair& prompt, CompletionClient& client, const AnalogBounds& bounds,
                         const std::vector<AnalogRecord>& analogs, int max_attempts) {
    require(max_attempts >= 1, "reprompt_loop: max_attempts must be >= 1");
    LoopResult result;
    PromptPair current = prompt;
    for (int i = 0; i < max_attempts; ++i) {
        Attempt attempt;
        attempt.prompt_hash = prompt_hash(current);
        attempt.raw = client.complete(current.system_text, current.user_text);
        ValidationResult v = validate_output(attempt.raw, bounds);
        if (auto* rec = std::get_if<Recommendation>(&v)) {
            result.recommendation = *rec;
            result.attempts.push_back(std::move(attempt));
            return result;
        }
        const ValidationFailure& f = std::get<ValidationFailure>(v);
        attempt.failure = f;
        result.attempts.push_back(std::move(attempt));
        current.user_text = prompt.user_text + correction_block(f, bounds);
    }
    result.recommendation = fallback_recommendation(analogs);
    result.fallback = true;
    return result;
}

namespace {

nlohmann::json audit_record(const DayInputs& in, const DayResult& r, const CompletionClient& client) {
    nlohmann::json analogs = nlohmann::json::array();
    for (const AnalogRecord& a : r.analogs)
        analogs.push_back({{"fire_id", a.fire_id},
                           {"date", a.date.iso()},
                           {"similarity", a.similarity},
                           {"personnel", a.personnel},
                           {"daily_cost_musd", a.daily_cost}});
    nlohmann::json attempts = nlohmann::json::array();
    for (const Attempt& a : r.loop.attempts) {
        nlohmann::json f = nullptr;
        if (a.failure)
            f = {{"category", to_string(a.failure->category)}, {"path", a.failure->path},
                 {"message", a.failure->message}};
        attempts.push_back({{"prompt_hash", a.prompt_hash}, {"raw", a.raw}, {"failure", f}});
    }
    return {{"fire_id", in.context->fire_id},
            {"date", in.context->snapshot.date.iso()},
            {"mode", in.mode == Mode::day1 ? "day1" : "incremental"},
            {"client", client.name()},
            {"client_settings", client.settings()},
            {"prompt_hash", prompt_hash(r.prompt)},
            {"na_fields", r.script.na_fields},
            {"analogs", analogs},
            {"attempts", attempts},
            {"fallback", r.loop.fallback},
            {"recommendation", to_json(r.recommendation)}};
}

} // namespace

DayResult recommend_day(const DayInputs& in, const Corpus& corpus, CompletionClient& client,
                        const AgentParams& params) {
    require(in.context != nullptr, "recommend_day: missing context");
    require(in.mode == Mode::day1 || (in.previous && in.context->anchors),
            "recommend_day: incremental mode needs the previous recommendation and anchors");
    const EventDayContext& ctx = *in.context;

    DayResult r;
    r.script = render_script(ctx, params.top_k);

    FeatureVector query;
    if (!ctx.clusters.empty())
        query = vectorize_day(ctx, corpus.stats);
    else if (!in.prior.empty())
        query = vectorize_quiet_day(in.prior, ctx, corpus.stats);
    else
        query = standardize(raw_features(ctx), corpus.stats);
    r.analogs = retrieve_analogs(query, corpus.days, params.analog_k, params.weights);

    r.prompt = in.mode == Mode::day1
                   ? build_day1_prompt(r.script, r.analogs)
                   : build_incremental_prompt(r.script, r.analogs, *in.previous, *ctx.anchors, in.cumulative);
    const AnalogBounds bounds = analog_bounds(r.analogs, params.slack);
    r.loop = reprompt_loop(r.prompt, client, bounds, r.analogs, params.max_attempts);
    r.recommendation = r.loop.recommendation;
    r.audit = audit_record(in, r, client);
    return r;
}

} // namespace gal
