// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "gal/agent.hpp"
#include "gal/baselines.hpp"
#include "gal/clients.hpp"
#include "gal/config.hpp"
#include "gal/enrichment.hpp"
#include "gal/evaluation.hpp"
#include "gal/footprint.hpp"
#include "gal/geo.hpp"
#include "gal/perception.hpp"
#include "gal/pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/mutants.hpp"
#include "support/oracles.hpp"

#include <fmt/format.h>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>

namespace fs = std::filesystem;
using namespace gal;

namespace {

// Pinned tolerances.
constexpr double kDbscanBudgetS = 10.0;
constexpr double kCompositionTol = 1e-12;
constexpr double kMeridianDegreeM = 111195.0;
constexpr double kMeridianTolM = 1.0;
constexpr double kShannonTol = 1e-12;
constexpr double kSelfSimilarityTol = 1e-12;
constexpr double kCalibrationTol = 1e-9;
constexpr double kPredictionTol = 1e-6;
constexpr double kFlameLength1000 = 1.862;
constexpr double kFlameLengthTol = 0.001;
constexpr double kRunBudgetS = 30.0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the first few reasons a criterion failed.
class Ledger {
public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (ok) return;
        ++failures_;
        if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
    }
    Outcome done(const std::string& summary) const {
        if (failures_ == 0) return {true, fmt::format("{} ({} checks)", summary, checks_)};
        return {false, fmt::format("{} of {} checks failed: {}", failures_, checks_, notes_)};
    }

private:
    std::size_t checks_ = 0, failures_ = 0;
    std::string notes_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome dbscan_vs_oracle() {
    galtest::Rng rng(1001);
    Ledger l;
    double lib_s = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < 100; ++t) {
        const auto pts = galtest::random_hotspots(rng, 1 + rng.index(200), rng.uniform(0.005, 0.04));
        const auto want = galtest::oracle::dbscan(pts, 3000.0, 3);
        const auto t1 = std::chrono::steady_clock::now();
        const Partition got = dbscan_indices(pts, 3000.0, 3);
        lib_s += seconds_since(t1);
        galtest::oracle::IndexSets sets;
        for (const auto& c : got.clusters) sets.insert(std::set<std::size_t>(c.begin(), c.end()));
        l.expect(sets == want.clusters, fmt::format("case {} clusters differ", t));
        l.expect(std::set<std::size_t>(got.noise.begin(), got.noise.end()) == want.noise,
                 fmt::format("case {} noise differs", t));
    }
    const double total = seconds_since(t0);
    l.expect(total < kDbscanBudgetS, fmt::format("took {:.2f} s", total));
    return l.done(fmt::format("100 instances match the O(n^2) oracle; {:.3f} s total, {:.3f} s in dbscan", total, lib_s));
}

Outcome zonal_vs_bruteforce() {
    galtest::Rng rng(1002);
    Ledger l;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t rows = 15 + rng.index(35), cols = 15 + rng.index(35);
        const RasterGrid values = galtest::random_grid(rng, rows, cols);
        RasterGrid classes = galtest::random_class_grid(rng, rows, cols, {11, 21, 41, 42, 52, 71, 82});
        classes.west = values.west;
        classes.south = values.south;
        classes.cell_size = values.cell_size;
        const GeoPoint c{rng.uniform(values.south, values.north()), rng.uniform(values.west, values.east())};
        const Polygon poly = galtest::random_star_polygon(rng, c, 0.01, 0.25);

        const auto want_v = galtest::oracle::zonal(values, poly);
        const ZonalSum s = zonal_sum(values, poly);
        l.expect(s.value == want_v.sum && s.cells == want_v.cells, fmt::format("case {} sum", t));

        const auto want_c = galtest::oracle::zonal(classes, poly);
        const ZonalComposition z = zonal_composition(classes, poly);
        l.expect(z.counts == want_c.counts, fmt::format("case {} counts", t));
        if (z.cells == 0) continue;
        double total = 0.0;
        for (const auto& [cls, p] : z.proportions) {
            total += p;
            l.expect(p == static_cast<double>(want_c.counts.at(cls)) / static_cast<double>(want_c.cells),
                     fmt::format("case {} share of {}", t, cls));
        }
        worst = std::max(worst, std::abs(total - 1.0));
        l.expect(std::abs(total - 1.0) <= kCompositionTol, fmt::format("case {} shares sum to {:.17g}", t, total));
    }
    return l.done(fmt::format("100 cases exact; max |sum(shares) - 1| = {:.1e}", worst));
}

Outcome geodesic() {
    Ledger l;
    const double d = geodesic_distance({0, 0}, {0, 1});
    l.expect(std::abs(d - kMeridianDegreeM) <= kMeridianTolM, fmt::format("(0,0)-(0,1) = {:.3f} m", d));
    galtest::Rng rng(1003);
    auto point = [&] { return GeoPoint{rng.uniform(-89.9, 89.9), rng.uniform(-180.0, 180.0)}; };
    double max_asym = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint a = point(), b = point(), c = point();
        const double ab = geodesic_distance(a, b), ba = geodesic_distance(b, a);
        max_asym = std::max(max_asym, std::abs(ab - ba));
        l.expect(ab == ba, fmt::format("pair {} asymmetric by {:.3g} m", i, ab - ba));
        const double ac = geodesic_distance(a, c), bc = geodesic_distance(b, c);
        l.expect(ac <= ab + bc + 1e-6, fmt::format("triple {} violates the triangle inequality", i));
        l.expect(std::abs(ab - galtest::oracle::great_circle_m(a, b)) <= 1e-3, fmt::format("pair {} vs oracle", i));
    }
    return l.done(fmt::format("(0,0)-(0,1) = {:.3f} m; 1000 pairs symmetric, triangle inequality holds", d));
}

Outcome terrain() {
    Ledger l;
    for (int n = 1; n <= 50; ++n) {
        std::map<int, double> p;
        for (int i = 0; i < n; ++i) p[i] = 1.0 / n;
        const double h = shannon_diversity(p);
        l.expect(std::abs(h - std::log(static_cast<double>(n))) <= kShannonTol, fmt::format("n={} H={:.17g}", n, h));
    }
    for (std::size_t n : {2u, 5u, 12u, 31u}) {
        std::vector<double> v(n * n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) v[r * n + c] = (r + c) % 2 ? 42 : 71;
        const RasterGrid g = galtest::make_grid(0, 0, 0.1, n, n, v);
        const double e = 0.1 * static_cast<double>(n);
        const Polygon poly = Polygon::from_ring({{0, 0}, {0, e}, {e, e}, {e, 0}});
        const auto z = galtest::oracle::zonal(g, poly);
        const auto t = terrain_profile(g, poly);
        const double want = static_cast<double>(galtest::oracle::patches(g, z.covered)) / static_cast<double>(z.cells);
        l.expect(t.has_value() && t->fragmentation == want, fmt::format("{}x{} checkerboard", n, n));
    }
    galtest::Rng rng(1004);
    const NlcdMapping m = NlcdMapping::defaults();
    const int codes[] = {11, 12, 21, 22, 23, 24, 31, 41, 42, 43, 52, 71, 81, 82, 90, 95};
    for (int i = 0; i < 1000; ++i) {
        std::map<int, double> comp;
        double total = 0.0;
        for (int c : codes)
            if (rng.chance(0.4)) total += comp[c] = rng.uniform();
        if (total == 0.0) comp[42] = total = 1.0;
        for (auto& [_, p] : comp) p /= total;
        const double sp = classify_composition(comp, m).spread_potential;
        l.expect(sp >= 0.0 && sp <= 1.0, fmt::format("spread_potential {}", sp));
    }
    return l.done("Shannon ln n, checkerboard fragmentation = flood fill, spread_potential in [0,1]");
}

struct Fixture {
    galtest::TempDir dir;
    fs::path cfg_path;
    RunConfig cfg;
};

Fixture& fixture() {
    static Fixture f;
    if (f.cfg_path.empty()) {
        f.cfg_path = galtest::synthetic_config(f.dir.path());
        f.cfg = load_config(f.cfg_path.string());
    }
    return f;
}

Outcome shuffle_invariance() {
    Fixture& fx = fixture();
    const std::string fire = fx.cfg.eval_fires.at(0);
    const GroundTruth truth = read_ground_truth_file(fx.cfg.ground_truth);
    const StaticLayers base_layers = load_layers(fx.cfg);
    const auto base = build_event_contexts(fx.cfg, base_layers, fire, &truth, nullptr);
    std::vector<std::string> want;
    for (const auto& c : base) want.push_back(render_script(c, fx.cfg.top_k_clusters).text);

    const std::string csv = galtest::read_file(fs::path(fx.cfg.hotspots_dir) / (fire + ".csv"));
    std::vector<std::string> lines;
    for (std::size_t p = 0, q; p < csv.size(); p = q + 1) {
        q = csv.find('\n', p);
        if (q == std::string::npos) q = csv.size();
        lines.push_back(csv.substr(p, q - p));
    }
    std::vector<FireStation> stations = read_stations_file(fx.cfg.stations);
    std::vector<CountyFeature> counties;
    {
        std::ifstream in(fx.cfg.counties);
        counties = parse_counties(in);
    }

    Ledger l;
    galtest::Rng rng(1005);
    const fs::path shuffled_dir = fx.dir / "shuffled_hotspots";
    fs::create_directories(shuffled_dir);
    for (int s = 0; s < 50; ++s) {
        std::vector<std::string> body(lines.begin() + 1, lines.end());
        body.erase(std::remove(body.begin(), body.end(), std::string()), body.end());
        rng.shuffle(body);
        std::string text = lines[0] + "\n";
        for (const auto& b : body) text += b + "\n";
        galtest::write_file(shuffled_dir / (fire + ".csv"), text);

        RunConfig cfg = fx.cfg;
        cfg.hotspots_dir = shuffled_dir.string();
        rng.shuffle(stations);
        rng.shuffle(counties);
        StaticLayers layers{StationIndex(stations), CountyIndex(counties), base_layers.landcover,
                            base_layers.population, base_layers.mapping};
        auto ctxs = build_event_contexts(cfg, layers, fire, &truth, nullptr);
        l.expect(ctxs.size() == want.size(), "day count differs");
        for (std::size_t d = 0; d < ctxs.size() && d < want.size(); ++d) {
            rng.shuffle(ctxs[d].clusters);
            ctxs[d].snapshot = global_snapshot(ctxs[d].snapshot.date, ctxs[d].clusters);
            l.expect(render_script(ctxs[d], cfg.top_k_clusters).text == want[d],
                     fmt::format("shuffle {} day {} differs", s, d));
        }
    }
    return l.done(fmt::format("{} days x 50 shuffles of rows, hotspots, clusters, stations and counties",
                              want.size()));
}

Outcome retrieval() {
    galtest::Rng rng(1006);
    Ledger l;
    for (int t = 0; t < 100; ++t) {
        const auto corpus = galtest::random_corpus(rng, 1 + rng.index(1000), 1 + rng.index(60));
        FeatureVector q;
        for (std::size_t k = 0; k < kFeatureDims; ++k) q.x[k] = rng.integer(-12, 12) / 4.0;
        FeatureWeights w = uniform_weights();
        if (t % 2)
            for (double& x : w) x = rng.chance(0.5) ? 1.0 : 2.0;
        const std::size_t k = 1 + rng.index(10);
        const auto got = retrieve_analogs(q, corpus, k, w);
        const auto want = galtest::oracle::retrieve(q, corpus, k, w);
        bool same = got.size() == want.size();
        for (std::size_t i = 0; same && i < got.size(); ++i)
            same = got[i].fire_id == want[i].fire_id && got[i].date == want[i].date &&
                   got[i].similarity == want[i].similarity;
        l.expect(same, fmt::format("corpus {} ranking differs", t));
        std::set<std::string> ids;
        for (const auto& a : got) ids.insert(a.fire_id);
        l.expect(ids.size() == got.size(), fmt::format("corpus {} repeats a fire", t));

        const CorpusDay& d = corpus[rng.index(corpus.size())];
        const double self = weighted_cosine(d.z, d.z, w);
        bool nonzero = false;
        for (std::size_t i = 0; i < kFeatureDims; ++i) nonzero = nonzero || (d.z.x[i] != 0.0 && w[i] > 0.0);
        if (nonzero) l.expect(std::abs(self - 1.0) <= kSelfSimilarityTol, fmt::format("self-similarity {:.17g}", self));
    }
    return l.done("100 corpora match brute-force rank + dedup; self-similarity 1; fire ids unique");
}

Outcome validator() {
    galtest::Rng rng(1007);
    Ledger l;
    std::map<FailureCategory, int> by_cat;
    int mutants = 0, accepted = 0;
    for (int t = 0; t < 400; ++t) {
        const AnalogBounds b{Range{static_cast<double>(rng.integer(5, 50)), static_cast<double>(rng.integer(60, 4000))},
                             Range{rng.integer(1, 20) / 10.0, rng.integer(30, 90) / 10.0}};
        const nlohmann::json doc = galtest::conformant_doc(rng, b);
        if (t < 100) {
            const bool ok = std::holds_alternative<Recommendation>(validate_output(doc.dump(), b));
            l.expect(ok, fmt::format("conformant document {} rejected", t));
            accepted += ok;
        }
        const galtest::Mutant m = galtest::mutate(rng, doc, b);
        const auto v = validate_output(m.raw, b);
        const bool ok = std::holds_alternative<ValidationFailure>(v) &&
                        std::get<ValidationFailure>(v).category == m.expected;
        l.expect(ok, fmt::format("mutant '{}' not rejected as {}", m.rule, to_string(m.expected)));
        mutants += ok;
        ++by_cat[m.expected];
    }
    l.expect(by_cat.size() == 4, "not every category exercised");
    return l.done(fmt::format("{} single-rule mutants rejected with the right category "
                              "(not_json {}, schema {}, unit {}, range {}); {} conformant accepted",
                              mutants, by_cat[FailureCategory::not_json], by_cat[FailureCategory::schema_violation],
                              by_cat[FailureCategory::unit_violation], by_cat[FailureCategory::range_violation],
                              accepted));
}

Outcome physical_baseline() {
    Ledger l;
    galtest::Rng rng(1008);
    std::vector<TrainingDay> days;
    for (int i = 0; i < 40; ++i) {
        const double s = rng.uniform(0, 200);
        days.push_back({s, 3.0 * s + 7.0, 3.0 * s + 7.0});
    }
    const PhysicalModel m = fit_physical(days);
    l.expect(std::abs(m.personnel.slope - 3.0) <= kCalibrationTol && std::abs(m.personnel.intercept - 7.0) <= kCalibrationTol,
             fmt::format("personnel fit ({:.12g}, {:.12g})", m.personnel.slope, m.personnel.intercept));
    l.expect(std::abs(m.cost.slope - 3.0) <= kCalibrationTol && std::abs(m.cost.intercept - 7.0) <= kCalibrationTol,
             "cost fit");
    for (const TrainingDay& d : days) {
        const Forecast f = physical_predict(m, d.score);
        l.expect(std::abs(f.personnel - d.personnel) <= kPredictionTol && std::abs(f.cost_musd - d.cost_musd) <= kPredictionTol,
                 "prediction");
    }
    const double fl = flame_length(1000.0);
    const double oracle = static_cast<double>(0.0775L * std::pow(1000.0L, 0.46L));
    l.expect(std::abs(fl - oracle) <= 1e-12, fmt::format("flame_length(1000) = {:.6f} vs oracle {:.6f}", fl, oracle));
    l.expect(std::abs(fl - kFlameLength1000) <= kFlameLengthTol,
             fmt::format("flame_length(1000) = {:.4f} m (0.0775 * 1000^0.46, high-precision {:.4f}) is not {} +/- {}",
                         fl, oracle, kFlameLength1000, kFlameLengthTol));
    return l.done(fmt::format("recovered (3, 7); predictions within 1e-6; flame_length(1000) = {:.4f} m", fl));
}

Outcome metrics() {
    Ledger l;
    const Date d0 = Date::from_ymd(2021, 8, 1);
    // personnel errors +10, -20, +30; cost errors +0.1, 0, -0.4
    const std::vector<GroundTruthDay> truth{{"F", d0, 100, 0.5}, {"F", d0 + 1, 200, 1.0}, {"F", d0 + 2, 300, 1.5}};
    const std::vector<DayPrediction> pred{{"F", d0, 110, 0.6}, {"F", d0 + 1, 180, 1.0}, {"F", d0 + 2, 330, 1.1}};
    const EventReport r = evaluate_event("F", pred, truth);
    l.expect(std::abs(r.mae_personnel - 20.0) <= 1e-12, "MAE personnel");
    l.expect(std::abs(r.rmse_personnel - std::sqrt(1400.0 / 3.0)) <= 1e-12, "RMSE personnel");
    l.expect(std::abs(r.mae_cost - 0.5 / 3.0) <= 1e-12, "MAE cost");
    l.expect(std::abs(r.rmse_cost - std::sqrt(0.17 / 3.0)) <= 1e-12, "RMSE cost");
    // second fixture: constant error 5
    const std::vector<DayPrediction> flat{{"F", d0, 105, 0.5}, {"F", d0 + 1, 205, 1.0}, {"F", d0 + 2, 305, 1.5}};
    const EventReport r2 = evaluate_event("F", flat, truth);
    l.expect(r2.mae_personnel == 5.0 && r2.rmse_personnel == 5.0 && r2.mae_cost == 0.0, "constant-error fixture");

    galtest::Rng rng(1009);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + rng.index(20);
        std::vector<double> a(n), b(n);
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = rng.uniform(0, 5000);
            b[j] = rng.uniform(0, 5000);
        }
        l.expect(rmse(a, b) >= mae(a, b) * (1.0 - 1e-15), fmt::format("pair {} RMSE < MAE", i));
    }
    return l.done("3-day fixtures match hand values; RMSE >= MAE on 1000 random pairs");
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("'") + GAL_CLI_PATH + "' " + args + " >'" + log.string() + "' 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::map<std::string, std::string> files_under(const fs::path& root, const std::set<fs::path>& skip) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(root)) {
        if (!e.is_directory() || skip.count(e.path())) continue;
        // run directory: <fire>_<stamp>_<hash>[_n]; key files by fire and name
        const std::string fire = e.path().filename().string().substr(0, e.path().filename().string().find('_', 5));
        for (const auto& f : fs::directory_iterator(e.path()))
            out[fire + "/" + f.path().filename().string()] = galtest::read_file(f.path());
    }
    return out;
}

Outcome reproducible_run() {
    Fixture& fx = fixture();
    const std::string flags = "--config '" + fx.cfg_path.string() + "' --client mock";
    const fs::path log = fx.dir / "cli.log";
    if (run_cli(flags + " corpus-build", log) != 0) return {false, "corpus-build failed: " + galtest::read_file(log)};

    const fs::path runs = fs::path(fx.cfg.out_dir);
    auto t0 = std::chrono::steady_clock::now();
    if (run_cli(flags + " run", log) != 0) return {false, "first run failed: " + galtest::read_file(log)};
    const double first_s = seconds_since(t0);
    std::set<fs::path> first_dirs;
    for (const auto& e : fs::directory_iterator(runs)) first_dirs.insert(e.path());
    const auto a = files_under(runs, {});

    t0 = std::chrono::steady_clock::now();
    if (run_cli(flags + " run", log) != 0) return {false, "second run failed: " + galtest::read_file(log)};
    const double second_s = seconds_since(t0);
    const auto b = files_under(runs, first_dirs);

    Ledger l;
    l.expect(!a.empty() && a.size() == b.size(), fmt::format("{} vs {} files", a.size(), b.size()));
    for (const auto& [name, bytes] : a) {
        auto it = b.find(name);
        l.expect(it != b.end() && it->second == bytes, name + " differs");
    }
    for (const std::string& fire : fx.cfg.eval_fires)
        for (const char* f : {"recommendations.csv", "audit.jsonl", "report.csv", "report.json"})
            l.expect(a.count(fire + "/" + f) == 1, fire + "/" + f + " missing");
    l.expect(first_s < kRunBudgetS && second_s < kRunBudgetS, fmt::format("runs took {:.1f} s and {:.1f} s", first_s, second_s));
    return l.done(fmt::format("{} files byte-identical across two mock runs ({:.1f} s, {:.1f} s)", a.size(), first_s,
                              second_s));
}

Outcome incremental_prompt() {
    Fixture& fx = fixture();
    const fs::path corpus_stats = fs::path(fx.cfg.corpus_dir) / "stats.json";
    if (!fs::exists(corpus_stats)) {
        const fs::path log = fx.dir / "cli11.log";
        if (run_cli("--config '" + fx.cfg_path.string() + "' corpus-build", log) != 0)
            return {false, "corpus-build failed"};
    }
    const Corpus corpus = load_corpus_dir(fx.cfg.corpus_dir);
    const StaticLayers layers = load_layers(fx.cfg);
    const GroundTruth truth = read_ground_truth_file(fx.cfg.ground_truth);
    MockClient client;
    const EventRun run = run_event(fx.cfg, layers, corpus, client, fx.cfg.eval_fires.at(0), &truth);
    Ledger l;
    l.expect(run.days.size() >= 2, "fewer than two days");
    const char* sections[] = {"Previous Analysis Context", "Cumulative Context", "Fire Overview vs Yesterday",
                              "Historical Context (RAG)", "Cluster Details"};
    for (std::size_t d = 1; d < run.days.size(); ++d)
        for (const char* s : sections)
            l.expect(run.days[d].prompt.user_text.find(s) != std::string::npos,
                     fmt::format("day {} lacks '{}'", d + 1, s));
    l.expect(run.days[0].prompt.user_text.find("Previous Analysis Context") == std::string::npos,
             "day-1 prompt has a previous-analysis block");
    return l.done(fmt::format("{} incremental prompts carry all five sections", run.days.size() - 1));
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 DBSCAN vs naive oracle", dbscan_vs_oracle},
        {"AC2 zonal sum and composition", zonal_vs_bruteforce},
        {"AC3 geodesic distance", geodesic},
        {"AC4 terrain metrics", terrain},
        {"AC5 perception shuffle invariance", shuffle_invariance},
        {"AC6 analog retrieval", retrieval},
        {"AC7 output validator", validator},
        {"AC8 physical baseline", physical_baseline},
        {"AC9 MAE / RMSE", metrics},
        {"AC10 reproducible mock run", reproducible_run},
        {"AC11 incremental prompt sections", incremental_prompt},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
    return failed ? 1 : 0;
}
