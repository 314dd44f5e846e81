#pragma once

// End-to-end orchestration over configured data layers: per-day contexts,
// the sequential recommendation loop, corpus building and baselines.

#include "gal/agent.hpp"
#include "gal/baselines.hpp"
#include "gal/config.hpp"
#include "gal/enrichment.hpp"
#include "gal/evaluation.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gal {

struct StaticLayers {
    StationIndex stations;
    CountyIndex counties;
    RasterGrid landcover;
    std::optional<RasterGrid> population;
    NlcdMapping mapping = NlcdMapping::defaults();
};

StaticLayers load_layers(const RunConfig& cfg);

/// Weather grids for one day, or nullopt when the day's directory or any of
/// its five files is absent.
std::optional<WeatherDayGrids> load_weather(const RunConfig& cfg, Date date);

std::vector<Hotspot> load_fire_hotspots(const RunConfig& cfg, const std::string& fire_id);

/// Ground-truth dates when the fire has ground truth, otherwise every date
/// from the first to the last detection.
std::vector<Date> event_days(const std::vector<Hotspot>& hotspots, const GroundTruth* truth,
                             const std::string& fire_id);

/// Context without anchors.
EventDayContext build_day_context(const std::string& fire_id, Date date, const std::vector<Hotspot>& day_hotspots,
                                  const StaticLayers& layers, const std::optional<WeatherDayGrids>& weather,
                                  const RunConfig& cfg);

std::vector<Hotspot> hotspots_on(const std::vector<Hotspot>& all, Date date);

/// Anchored contexts for each event day. Resource history comes from
/// `resources` (ground truth) when given, otherwise anchors carry none.
std::vector<EventDayContext> build_event_contexts(const RunConfig& cfg, const StaticLayers& layers,
                                                  const std::string& fire_id, const GroundTruth* truth,
                                                  const GroundTruth* resources);

std::unique_ptr<CompletionClient> make_client(const RunConfig& cfg);

struct EventRun {
    std::string fire_id;
    std::vector<EventDayContext> contexts; // anchored, one per day
    std::vector<DayResult> days;
    std::vector<DayPrediction> predictions;
};

/// Day-1 on the first event day, incremental afterwards; anchors use the
/// previously emitted recommendations.
EventRun run_event(const RunConfig& cfg, const StaticLayers& layers, const Corpus& corpus,
                   CompletionClient& client, const std::string& fire_id, const GroundTruth* truth);

/// Training days for the physical baseline from anchored corpus contexts.
std::vector<TrainingDay> physical_training_days(const std::vector<EventDayContext>& contexts,
                                                const GroundTruth& truth, const PhysicalParams& p);

inline constexpr const char* kPhysicalModelFile = "physical_model.json";

struct CorpusBuildSummary {
    std::size_t contexts = 0;
    std::size_t days_with_truth = 0;
    PhysicalModel physical;
};

CorpusBuildSummary build_corpus_from_config(const RunConfig& cfg);

} // namespace gal
