#include "gal/commands.hpp"

#include "gal/canonical_json.hpp"
#include "gal/error.hpp"
#include "gal/hash.hpp"
#include "gal/perception.hpp"
#include "gal/pipeline.hpp"

#include <fmt/format.h>

#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <ostream>

namespace gal {

namespace fs = std::filesystem;

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        body();
        return 0;
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return e.exit_status();
    } catch (const std::exception& e) {
        err << "error [runtime]: " << e.what() << '\n';
        return 1;
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::runtime, fmt::format("cannot write {}", path.string()));
    return out;
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

std::string utc_stamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

std::optional<GroundTruth> load_truth(const RunConfig& cfg) {
    if (cfg.ground_truth.empty()) return std::nullopt;
    return read_ground_truth_file(cfg.ground_truth);
}

const std::vector<GroundTruthDay>* truth_for(const std::optional<GroundTruth>& truth, const std::string& fire) {
    if (!truth) return nullptr;
    auto it = truth->find(fire);
    return it == truth->end() ? nullptr : &it->second;
}

void write_recommendations(std::ostream& out, const EventRun& run) {
    out << "fire_id,date,personnel,daily_budget_usd,confidence,fallback";
    for (std::string_view n : kIndicatorNames) out << ',' << n;
    out << '\n';
    for (const DayResult& d : run.days) {
        const Recommendation& r = d.recommendation;
        out << fmt::format("{},{},{},{},{},{}", run.fire_id, d.audit.at("date").get<std::string>(), r.personnel,
                           r.daily_budget_usd, r.confidence, d.loop.fallback ? 1 : 0);
        for (Level l : r.indicators) out << ',' << to_string(l);
        out << '\n';
    }
}

void write_evaluation(const fs::path& dir, const std::string& stem, const EventReport& report) {
    {
        std::ofstream csv = open_out(dir / (stem + ".csv"));
        write_report_csv(csv, {report});
    }
    write_text(dir / (stem + ".json"), dump_canonical(report_to_json({report})) + "\n");
}

void write_baseline(const fs::path& dir, const std::string& stem, const std::string& fire,
                    const std::vector<DayPrediction>& preds, const std::vector<GroundTruthDay>& truth) {
    {
        std::ofstream csv = open_out(dir / (stem + ".csv"));
        write_predictions(csv, preds);
    }
    // Score only the days the baseline could predict.
    std::vector<GroundTruthDay> covered;
    for (const GroundTruthDay& t : truth)
        for (const DayPrediction& p : preds)
            if (p.date == t.date) covered.push_back(t);
    if (covered.empty()) return;
    const EventReport r = evaluate_event(fire, preds, covered);
    {
        std::ofstream csv = open_out(dir / (stem + "_report.csv"));
        write_report_csv(csv, {r});
    }
    write_text(dir / (stem + "_report.json"), dump_canonical(report_to_json({r})) + "\n");
}

struct RunShared {
    const RunConfig& cfg;
    const StaticLayers& layers;
    const Corpus& corpus;
    const std::optional<PhysicalModel>& physical;
    const std::optional<GroundTruth>& truth;
    CompletionClient& client;
    std::string cfg_text;
};

std::string run_fire(const RunShared& s, const std::string& fire) {
    const std::vector<GroundTruthDay>* truth = truth_for(s.truth, fire);
    const EventRun run = run_event(s.cfg, s.layers, s.corpus, s.client, fire, s.truth ? &*s.truth : nullptr);

    const fs::path dir = make_run_dir(s.cfg.out_dir, fire, s.cfg);
    write_text(dir / "effective_config.ini", s.cfg_text);
    {
        std::ofstream recs = open_out(dir / "recommendations.csv");
        write_recommendations(recs, run);
    }
    {
        std::ofstream audit = open_out(dir / "audit.jsonl");
        for (const DayResult& d : run.days) audit << dump_canonical(d.audit, -1) << '\n';
    }
    if (!truth) return dir.string();

    write_evaluation(dir, "report", evaluate_event(fire, run.predictions, *truth));

    if (s.physical) {
        std::vector<DayPrediction> preds;
        for (const EventDayContext& c : run.contexts) {
            const Forecast f = physical_predict(*s.physical, c.snapshot);
            preds.push_back({fire, c.snapshot.date, f.personnel, f.cost_musd});
        }
        write_baseline(dir, "baseline_physical", fire, preds, *truth);
    }

    std::vector<DayPrediction> persistence;
    for (const EventDayContext& c : run.contexts) {
        std::vector<GroundTruthDay> history;
        for (const GroundTruthDay& t : *truth)
            if (t.date < c.snapshot.date) history.push_back(t);
        if (history.empty()) continue;
        const Forecast f = persistence_predict(history);
        persistence.push_back({fire, c.snapshot.date, f.personnel, f.cost_musd});
    }
    write_baseline(dir, "baseline_persistence", fire, persistence, *truth);
    return dir.string();
}

} // namespace

std::string make_run_dir(const std::string& out_dir, const std::string& prefix, const RunConfig& cfg) {
    const std::string base =
        fmt::format("{}_{}_{}", prefix, utc_stamp(), sha256_hex(dump_config(cfg)).substr(0, 8));
    fs::path dir = fs::path(out_dir) / base;
    for (int n = 2; fs::exists(dir); ++n) dir = fs::path(out_dir) / fmt::format("{}_{}", base, n);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::runtime, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    return dir.string();
}

RunConfig effective_config(const GlobalOptions& opts) {
    require(!opts.config_path.empty(), "--config is required");
    RunConfig cfg = load_config(opts.config_path);
    if (opts.out_dir) cfg.out_dir = fs::absolute(*opts.out_dir).lexically_normal().string();
    if (opts.client) cfg.client = *opts.client;
    validate_config(cfg);
    return cfg;
}

int cmd_footprint(const GlobalOptions& opts, const FootprintArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = effective_config(opts);
        require(!args.fire_id.empty() || !args.hotspots_path.empty(), "footprint: --fire or --hotspots is required");
        const Date date = Date::parse(args.date);
        const std::string path = !args.hotspots_path.empty()
                                     ? args.hotspots_path
                                     : (fs::path(cfg.hotspots_dir) / (args.fire_id + ".csv")).string();
        const EventDayGeometry g =
            normalize_event_day(date, hotspots_on(read_hotspots_file(path), date), cfg.eps_m, cfg.min_pts);

        const std::string label = args.fire_id.empty() ? fs::path(path).stem().string() : args.fire_id;
        const fs::path dir = make_run_dir(cfg.out_dir, label, cfg);
        const fs::path file = dir / fmt::format("footprint_{}.geojson", date.iso());
        {
            std::ofstream geo = open_out(file);
            write_geometry_geojson(geo, g);
        }
        out << fmt::format("{} {}: {} clusters, {} noise points -> {}\n", label, date.iso(), g.clusters.size(),
                           g.noise_points.size(), file.string());
    });
}

int cmd_perceive(const GlobalOptions& opts, const PerceiveArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = effective_config(opts);
        require(!args.fire_id.empty(), "perceive: --fire is required");
        const Date date = Date::parse(args.date);
        const std::optional<GroundTruth> truth = load_truth(cfg);
        const StaticLayers layers = load_layers(cfg);
        // Resource anchors are left empty: perception must not see ground truth.
        const std::vector<EventDayContext> ctxs =
            build_event_contexts(cfg, layers, args.fire_id, truth ? &*truth : nullptr, nullptr);
        for (const EventDayContext& c : ctxs) {
            if (c.snapshot.date != date) continue;
            if (args.json)
                out << dump_canonical(to_json(unit_lock(c))) << '\n';
            else
                out << render_script(unit_lock(c), cfg.top_k_clusters).text;
            return;
        }
        fail(ErrorKind::precondition, fmt::format("fire {}: {} is not an event day", args.fire_id, date.iso()));
    });
}

int cmd_corpus_build(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = effective_config(opts);
        const CorpusBuildSummary s = build_corpus_from_config(cfg);
        out << fmt::format("corpus {}: {} contexts, {} with ground truth\n", cfg.corpus_dir, s.contexts,
                           s.days_with_truth);
        out << fmt::format("physical baseline: personnel = {:.4f} * score + {:.4f}; cost = {:.6f} * score + {:.4f}\n",
                           s.physical.personnel.slope, s.physical.personnel.intercept, s.physical.cost.slope,
                           s.physical.cost.intercept);
    });
}

int cmd_run(const GlobalOptions& opts, const RunArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = effective_config(opts);
        const std::vector<std::string> fires = args.fires.empty() ? cfg.eval_fires : args.fires;
        require(!fires.empty(), "run: no fires given and [fires] eval is empty");
        require(!cfg.corpus_dir.empty() && fs::exists(fs::path(cfg.corpus_dir) / "stats.json"),
                "run: corpus not built (run corpus-build first)");

        const Corpus corpus = load_corpus_dir(cfg.corpus_dir);
        std::optional<PhysicalModel> physical;
        if (const fs::path p = fs::path(cfg.corpus_dir) / kPhysicalModelFile; fs::exists(p))
            physical = physical_model_from_json(nlohmann::json::parse(read_file_bytes(p.string())));
        const std::optional<GroundTruth> truth = load_truth(cfg);
        const StaticLayers layers = load_layers(cfg);
        const std::unique_ptr<CompletionClient> client = make_client(cfg);
        const RunShared shared{cfg, layers, corpus, physical, truth, *client, dump_config(cfg)};

        // Events are independent; each one is internally sequential.
        std::vector<std::future<std::string>> jobs;
        for (const std::string& f : fires)
            jobs.push_back(std::async(std::launch::async, [&shared, f] { return run_fire(shared, f); }));
        std::exception_ptr first;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            try {
                out << fires[i] << ": " << jobs[i].get() << '\n';
            } catch (...) {
                if (!first) first = std::current_exception();
            }
        }
        if (first) std::rethrow_exception(first);
    });
}

int cmd_evaluate(const GlobalOptions& opts, const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = effective_config(opts);
        require(!cfg.ground_truth.empty(), "evaluate: ground_truth is not configured");
        const GroundTruth truth = read_ground_truth_file(cfg.ground_truth);
        std::ifstream in(args.predictions_path, std::ios::binary);
        if (!in) fail(ErrorKind::precondition, fmt::format("cannot open predictions {}", args.predictions_path));
        std::vector<DayPrediction> preds;
        try {
            preds = parse_predictions(in);
        } catch (const Error& e) {
            throw Error(e.kind(), fmt::format("{}: {}", args.predictions_path, e.what()));
        }

        std::map<std::string, std::vector<DayPrediction>> by_fire;
        for (DayPrediction& p : preds) by_fire[p.fire_id].push_back(std::move(p));
        require(!by_fire.empty(), "evaluate: no predictions");
        std::vector<EventReport> reports;
        for (const auto& [fire, ps] : by_fire) {
            auto it = truth.find(fire);
            if (it == truth.end()) fail(ErrorKind::alignment, fmt::format("fire {}: no ground truth", fire));
            reports.push_back(evaluate_event(fire, ps, it->second));
        }

        const fs::path dir = make_run_dir(cfg.out_dir, "evaluate", cfg);
        write_report_csv(out, reports);
        {
            std::ofstream csv = open_out(dir / "report.csv");
            write_report_csv(csv, reports);
        }
        write_text(dir / "report.json", dump_canonical(report_to_json(reports)) + "\n");
        err << "wrote " << dir.string() << '\n';
    });
}

} // namespace gal
