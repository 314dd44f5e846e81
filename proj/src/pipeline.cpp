#include "gal/pipeline.hpp"

#include "gal/canonical_json.hpp"
#include "gal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

namespace gal {

namespace fs = std::filesystem;

StaticLayers load_layers(const RunConfig& cfg) {
    StaticLayers l;
    l.stations = StationIndex(read_stations_file(cfg.stations));
    l.counties = CountyIndex(read_counties_file(cfg.counties));
    l.landcover = read_raster_file(cfg.landcover);
    if (!cfg.population.empty()) l.population = read_raster_file(cfg.population);
    if (!cfg.nlcd_mapping.empty()) l.mapping = NlcdMapping::read_file(cfg.nlcd_mapping);
    return l;
}

std::optional<WeatherDayGrids> load_weather(const RunConfig& cfg, Date date) {
    if (cfg.weather_dir.empty()) return std::nullopt;
    const fs::path dir = fs::path(cfg.weather_dir) / date.iso();
    const char* names[] = {"bi", "tmax", "tmin", "wind", "fm1"};
    for (const char* n : names)
        if (!fs::exists(dir / fmt::format("{}.asc", n))) return std::nullopt;
    std::ifstream bi(dir / "bi.asc"), tmax(dir / "tmax.asc"), tmin(dir / "tmin.asc"), wind(dir / "wind.asc"),
        fm1(dir / "fm1.asc");
    try {
        return parse_weather_day({&bi, &tmax, &tmin, &wind, &fm1}, date);
    } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("{}: {}", dir.string(), e.what()));
    }
}

std::vector<Hotspot> load_fire_hotspots(const RunConfig& cfg, const std::string& fire_id) {
    return read_hotspots_file((fs::path(cfg.hotspots_dir) / (fire_id + ".csv")).string());
}

std::vector<Date> event_days(const std::vector<Hotspot>& hotspots, const GroundTruth* truth,
                             const std::string& fire_id) {
    std::vector<Date> days;
    if (truth) {
        if (auto it = truth->find(fire_id); it != truth->end()) {
            for (const GroundTruthDay& d : it->second) days.push_back(d.date);
            return days;
        }
    }
    if (hotspots.empty()) return days;
    auto [lo, hi] = std::minmax_element(hotspots.begin(), hotspots.end(),
                                        [](const Hotspot& a, const Hotspot& b) { return a.acq_date < b.acq_date; });
    for (Date d = lo->acq_date; d <= hi->acq_date; ++d) days.push_back(d);
    return days;
}

std::vector<Hotspot> hotspots_on(const std::vector<Hotspot>& all, Date date) {
    std::vector<Hotspot> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out), [&](const Hotspot& h) { return h.acq_date == date; });
    return out;
}

EventDayContext build_day_context(const std::string& fire_id, Date date, const std::vector<Hotspot>& day_hotspots,
                                  const StaticLayers& layers, const std::optional<WeatherDayGrids>& weather,
                                  const RunConfig& cfg) {
    const EventDayGeometry g = normalize_event_day(date, day_hotspots, cfg.eps_m, cfg.min_pts);
    EventDayContext ctx;
    ctx.fire_id = fire_id;
    for (const Cluster& c : g.clusters) {
        const FusedWeather w = weather ? weather_fusion(c.members, *weather) : FusedWeather{};
        ctx.clusters.push_back(consolidate_cluster(
            c, w, terrain_profile(layers.landcover, c.footprint, layers.mapping),
            exposure(c.footprint, layers.population ? &*layers.population : nullptr, layers.counties,
                     cfg.county_buffer_m),
            station_coverage(c.centroid, layers.stations, cfg.station_radius_m)));
    }
    ctx.snapshot = global_snapshot(date, ctx.clusters);
    return ctx;
}

namespace {

std::vector<EventDayContext> base_contexts(const RunConfig& cfg, const StaticLayers& layers,
                                           const std::string& fire_id, const GroundTruth* truth) {
    const std::vector<Hotspot> all = load_fire_hotspots(cfg, fire_id);
    std::vector<EventDayContext> out;
    for (Date d : event_days(all, truth, fire_id))
        out.push_back(build_day_context(fire_id, d, hotspots_on(all, d), layers, load_weather(cfg, d), cfg));
    return out;
}

const GroundTruthDay* truth_on(const GroundTruth* truth, const std::string& fire_id, Date date) {
    if (!truth) return nullptr;
    auto it = truth->find(fire_id);
    if (it == truth->end()) return nullptr;
    for (const GroundTruthDay& d : it->second)
        if (d.date == date) return &d;
    return nullptr;
}

} // namespace

std::vector<EventDayContext> build_event_contexts(const RunConfig& cfg, const StaticLayers& layers,
                                                  const std::string& fire_id, const GroundTruth* truth,
                                                  const GroundTruth* resources) {
    std::vector<EventDayContext> ctxs = base_contexts(cfg, layers, fire_id, truth);
    std::vector<DayRecord> history;
    for (EventDayContext& ctx : ctxs) {
        if (!history.empty()) ctx.anchors = temporal_anchors(history, ctx.snapshot, cfg.delta_threshold);
        DayRecord rec{ctx.snapshot, std::nullopt, std::nullopt};
        if (const GroundTruthDay* g = truth_on(resources, fire_id, ctx.snapshot.date)) {
            rec.personnel = g->personnel;
            rec.cost_musd = g->daily_cost;
        }
        history.push_back(std::move(rec));
    }
    return ctxs;
}

std::unique_ptr<CompletionClient> make_client(const RunConfig& cfg) {
    switch (cfg.client) {
    case ClientKind::mock: return std::make_unique<MockClient>();
    case ClientKind::replay: return std::make_unique<ReplayClient>(cfg.replay_path);
    case ClientKind::live: return std::make_unique<LiveClient>(cfg.live);
    }
    fail(ErrorKind::precondition, "unknown client kind");
}

EventRun run_event(const RunConfig& cfg, const StaticLayers& layers, const Corpus& corpus, CompletionClient& client,
                   const std::string& fire_id, const GroundTruth* truth) {
    std::vector<EventDayContext> ctxs = base_contexts(cfg, layers, fire_id, truth);
    if (ctxs.empty()) fail(ErrorKind::precondition, fmt::format("fire {}: no event days", fire_id));

    EventRun run;
    run.fire_id = fire_id;
    std::vector<DayRecord> history;
    CumulativeTotals totals;
    const AgentParams params = cfg.agent_params();
    for (std::size_t i = 0; i < ctxs.size(); ++i) {
        EventDayContext& ctx = ctxs[i];
        if (!history.empty()) ctx.anchors = temporal_anchors(history, ctx.snapshot, cfg.delta_threshold);

        DayInputs in;
        in.context = &ctx;
        const std::size_t from = i > 7 ? i - 7 : 0;
        in.prior = std::span<const EventDayContext>(ctxs.data() + from, i - from);
        in.mode = i == 0 ? Mode::day1 : Mode::incremental;
        in.previous = i == 0 ? nullptr : &run.days.back().recommendation;
        in.cumulative = totals;

        DayResult day = recommend_day(in, corpus, client, params);
        const Recommendation& rec = day.recommendation;
        totals.cost_usd += static_cast<double>(rec.daily_budget_usd);
        totals.personnel_days += static_cast<double>(rec.personnel);
        history.push_back({ctx.snapshot, static_cast<double>(rec.personnel),
                           static_cast<double>(rec.daily_budget_usd) / 1e6});
        run.predictions.push_back({fire_id, ctx.snapshot.date, static_cast<double>(rec.personnel),
                                   static_cast<double>(rec.daily_budget_usd) / 1e6});
        run.days.push_back(std::move(day));
    }
    run.contexts = std::move(ctxs);
    return run;
}

std::vector<TrainingDay> physical_training_days(const std::vector<EventDayContext>& contexts,
                                                const GroundTruth& truth, const PhysicalParams& p) {
    std::vector<TrainingDay> out;
    for (const EventDayContext& c : contexts)
        if (const GroundTruthDay* g = truth_on(&truth, c.fire_id, c.snapshot.date))
            out.push_back({day_workload(c.snapshot, p), g->personnel, g->daily_cost});
    return out;
}

CorpusBuildSummary build_corpus_from_config(const RunConfig& cfg) {
    require(!cfg.corpus_dir.empty(), "config: corpus_dir is not set");
    require(!cfg.ground_truth.empty(), "config: ground_truth is required to build the corpus");
    require(!cfg.training_fires.empty(), "config: [fires] training is empty");
    const GroundTruth truth = read_ground_truth_file(cfg.ground_truth);

    std::vector<std::string> missing;
    for (const std::string& f : cfg.training_fires) {
        if (!fs::exists(fs::path(cfg.hotspots_dir) / (f + ".csv"))) missing.push_back(f + ": hotspots");
        if (!truth.count(f)) missing.push_back(f + ": ground truth");
    }
    if (!missing.empty()) {
        std::string msg = "corpus-build: missing layers:";
        for (const auto& m : missing) msg += " [" + m + "]";
        fail(ErrorKind::precondition, msg);
    }

    const StaticLayers layers = load_layers(cfg);
    std::vector<EventDayContext> all;
    for (const std::string& f : cfg.training_fires) {
        auto ctxs = build_event_contexts(cfg, layers, f, &truth, &truth);
        all.insert(all.end(), std::make_move_iterator(ctxs.begin()), std::make_move_iterator(ctxs.end()));
    }
    write_corpus_dir(cfg.corpus_dir, all, truth);

    CorpusBuildSummary s;
    s.contexts = all.size();
    const Corpus corpus = load_corpus_dir(cfg.corpus_dir);
    s.days_with_truth = corpus.days.size();

    // Fit on the contexts as persisted so later runs see identical inputs.
    std::vector<EventDayContext> persisted;
    for (const auto& e : fs::directory_iterator(fs::path(cfg.corpus_dir) / "contexts"))
        if (e.path().extension() == ".json") persisted.push_back(read_context_file(e.path().string()));
    std::sort(persisted.begin(), persisted.end(), [](const auto& a, const auto& b) {
        return std::tie(a.fire_id, a.snapshot.date) < std::tie(b.fire_id, b.snapshot.date);
    });
    s.physical = fit_physical(physical_training_days(persisted, truth, cfg.physical), cfg.physical);

    std::ofstream out(fs::path(cfg.corpus_dir) / kPhysicalModelFile, std::ios::binary);
    if (!out) fail(ErrorKind::runtime, "cannot write physical model");
    out << to_json(s.physical).dump(2) << '\n';
    return s;
}

} // namespace gal
