#pragma once

// Analog retrieval: event days become z-scored feature vectors; the closest
// historical days by weighted cosine (one per fire) give soft bounds for the
// agent's estimates.

#include "gal/consolidation.hpp"
#include "gal/ingest.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gal {

inline constexpr std::size_t kNumericFeatures = 10;
inline constexpr std::size_t kFlagFeatures = 2;
inline constexpr std::size_t kFeatureDims = kNumericFeatures + kFlagFeatures;

/// total_points, total_frp, total_area_acres, n_clusters, total_population,
/// mean_spread_potential, bi, tmax, wind, fm1, then the flags
/// no_hotspot_day, multi_county.
extern const std::array<std::string_view, kFeatureDims> kFeatureNames;

using FeatureWeights = std::array<double, kFeatureDims>;
FeatureWeights uniform_weights();

struct RawFeatures {
    std::array<std::optional<double>, kNumericFeatures> values;
    std::array<bool, kFlagFeatures> flags{};
};

/// Standardized numeric entries followed by 0/1 flags.
struct FeatureVector {
    std::array<double, kFeatureDims> x{};
};

struct CorpusStats {
    std::array<double, kNumericFeatures> mean{};
    std::array<double, kNumericFeatures> std{};
    std::array<bool, kNumericFeatures> constant{};
    std::size_t n_days = 0;

    double z(std::size_t dim, double value) const;
    double unz(std::size_t dim, double z) const;
};

struct AnalogRecord {
    std::string fire_id;
    Date date;
    double similarity = 0.0;
    double personnel = 0.0;
    double daily_cost = 0.0; // million USD
};

struct CorpusDay {
    AnalogRecord record; // similarity unset
    RawFeatures raw;
    FeatureVector z;
};

struct Corpus {
    CorpusStats stats;
    std::vector<CorpusDay> days;
};

/// Raw features of an active day.
RawFeatures raw_features(const EventDayContext& ctx);

/// Raw features of a no-hotspot day: the activity slots (points, FRP, area,
/// clusters) take the mean over the last 3 prior days, or the last 7 when
/// that mean is zero. `prior` is time-ordered; only its tail is used.
RawFeatures quiet_raw_features(std::span<const EventDayContext> prior, const EventDayContext& today);

/// Population mean and standard deviation per dimension over present values.
/// Dimensions with zero spread (or no values) are flagged constant.
CorpusStats corpus_stats(std::span<const RawFeatures> corpus);

/// Missing values and constant dimensions map to 0.
FeatureVector standardize(const RawFeatures& raw, const CorpusStats& stats);

FeatureVector vectorize_day(const EventDayContext& ctx, const CorpusStats& stats);
FeatureVector vectorize_quiet_day(std::span<const EventDayContext> prior, const EventDayContext& today,
                                  const CorpusStats& stats);

/// sum(w a b) / (sqrt(sum w a a) sqrt(sum w b b)); 0 when either weighted norm is 0.
double weighted_cosine(std::span<const double> a, std::span<const double> b, std::span<const double> w);
double weighted_cosine(const FeatureVector& a, const FeatureVector& b, const FeatureWeights& w);

inline constexpr std::size_t kDefaultAnalogK = 5;

/// Rank by similarity (desc), then earlier date, then fire_id; keep each
/// fire's best day; return the first k.
std::vector<AnalogRecord> retrieve_analogs(const FeatureVector& query, const std::vector<CorpusDay>& corpus,
                                           std::size_t k, const FeatureWeights& weights);

struct BoundSlack {
    double low = 0.25;
    double high = 4.0;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Empty optionals mean unbounded.
struct AnalogBounds {
    std::optional<Range> personnel;
    std::optional<Range> cost_musd;
};

AnalogBounds analog_bounds(const std::vector<AnalogRecord>& analogs, BoundSlack slack = {});

// Corpus directory: contexts/<fire>__<date>.json, ground_truth.csv, stats.json.
void write_corpus_dir(const std::string& dir, const std::vector<EventDayContext>& contexts,
                      const GroundTruth& truth);
Corpus load_corpus_dir(const std::string& dir);

/// Builds raw features for time-ordered contexts of possibly several fires
/// (quiet days look back within their own fire), joins ground truth and
/// standardizes. Days without ground truth are skipped.
Corpus build_corpus(const std::vector<EventDayContext>& contexts, const GroundTruth& truth);

nlohmann::json stats_to_json(const CorpusStats& stats);
CorpusStats stats_from_json(const nlohmann::json& j);

} // namespace gal
