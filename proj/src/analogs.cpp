#include "gal/analogs.hpp"

#include "gal/canonical_json.hpp"
#include "gal/error.hpp"
#include "gal/hash.hpp"
#include "gal/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace gal {

namespace fs = std::filesystem;

const std::array<std::string_view, kFeatureDims> kFeatureNames{
    "total_points", "total_frp", "total_area_acres", "n_clusters", "total_population",
    "mean_spread_potential", "bi", "tmax", "wind", "fm1", "no_hotspot_day", "multi_county"};

FeatureWeights uniform_weights() {
    FeatureWeights w;
    w.fill(1.0);
    return w;
}

double CorpusStats::z(std::size_t dim, double value) const {
    if (constant[dim]) return 0.0;
    return (value - mean[dim]) / std[dim];
}

double CorpusStats::unz(std::size_t dim, double zv) const {
    if (constant[dim]) return mean[dim];
    return zv * std[dim] + mean[dim];
}

RawFeatures raw_features(const EventDayContext& ctx) {
    const GlobalSnapshot& s = ctx.snapshot;
    RawFeatures r;
    r.values = {static_cast<double>(s.total_points),
                s.total_frp,
                s.total_area_acres,
                static_cast<double>(s.n_clusters),
                s.total_population,
                s.mean_spread_potential,
                s.weather.bi,
                s.weather.tmax,
                s.weather.wind,
                s.weather.fm1};
    r.flags = {s.n_clusters == 0, s.counties.size() > 1};
    return r;
}

RawFeatures quiet_raw_features(std::span<const EventDayContext> prior, const EventDayContext& today) {
    require(!prior.empty(), "quiet-day vector needs at least one prior day");
    RawFeatures r = raw_features(today);
    auto mean_tail = [&](std::size_t len, auto get) {
        const std::size_t n = std::min(len, prior.size());
        double sum = 0.0;
        for (std::size_t i = prior.size() - n; i < prior.size(); ++i) sum += get(prior[i].snapshot);
        return sum / static_cast<double>(n);
    };
    auto activity = [&](auto get) {
        const double m3 = mean_tail(3, get);
        return m3 != 0.0 ? m3 : mean_tail(7, get);
    };
    r.values[0] = activity([](const GlobalSnapshot& s) { return static_cast<double>(s.total_points); });
    r.values[1] = activity([](const GlobalSnapshot& s) { return s.total_frp; });
    r.values[2] = activity([](const GlobalSnapshot& s) { return s.total_area_acres; });
    r.values[3] = activity([](const GlobalSnapshot& s) { return static_cast<double>(s.n_clusters); });
    r.flags[0] = true;
    return r;
}

CorpusStats corpus_stats(std::span<const RawFeatures> corpus) {
    if (corpus.empty()) fail(ErrorKind::precondition, "corpus_stats: empty corpus");
    CorpusStats st;
    st.n_days = corpus.size();
    for (std::size_t d = 0; d < kNumericFeatures; ++d) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const RawFeatures& r : corpus)
            if (r.values[d]) {
                sum += *r.values[d];
                ++n;
            }
        if (n == 0) {
            st.constant[d] = true;
            continue;
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const RawFeatures& r : corpus)
            if (r.values[d]) ss += (*r.values[d] - mean) * (*r.values[d] - mean);
        st.mean[d] = mean;
        st.std[d] = std::sqrt(ss / static_cast<double>(n));
        st.constant[d] = st.std[d] == 0.0;
    }
    return st;
}

FeatureVector standardize(const RawFeatures& raw, const CorpusStats& stats) {
    FeatureVector v;
    for (std::size_t d = 0; d < kNumericFeatures; ++d)
        v.x[d] = raw.values[d] ? stats.z(d, *raw.values[d]) : 0.0;
    for (std::size_t f = 0; f < kFlagFeatures; ++f) v.x[kNumericFeatures + f] = raw.flags[f] ? 1.0 : 0.0;
    return v;
}

FeatureVector vectorize_day(const EventDayContext& ctx, const CorpusStats& stats) {
    require(!ctx.clusters.empty(), "vectorize_day: no clusters; use the quiet-day vector");
    return standardize(raw_features(ctx), stats);
}

FeatureVector vectorize_quiet_day(std::span<const EventDayContext> prior, const EventDayContext& today,
                                  const CorpusStats& stats) {
    return standardize(quiet_raw_features(prior, today), stats);
}

double weighted_cosine(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
    if (a.size() != b.size() || a.size() != w.size())
        fail(ErrorKind::precondition,
             fmt::format("weighted_cosine: dimension mismatch ({}, {}, {})", a.size(), b.size(), w.size()));
    bool any = false;
    for (double x : w) {
        require(x >= 0.0, "weighted_cosine: negative weight");
        any = any || x > 0.0;
    }
    require(any, "weighted_cosine: all weights are zero");
    const kernels::WeightedMoments m = kernels::weighted_moments(a, b, w);
    if (!(m.aa > 0.0) || !(m.bb > 0.0)) return 0.0;
    return std::clamp(m.ab / (std::sqrt(m.aa) * std::sqrt(m.bb)), -1.0, 1.0);
}

double weighted_cosine(const FeatureVector& a, const FeatureVector& b, const FeatureWeights& w) {
    return weighted_cosine(std::span<const double>(a.x), std::span<const double>(b.x),
                           std::span<const double>(w));
}

std::vector<AnalogRecord> retrieve_analogs(const FeatureVector& query, const std::vector<CorpusDay>& corpus,
                                           std::size_t k, const FeatureWeights& weights) {
    std::vector<AnalogRecord> ranked;
    ranked.reserve(corpus.size());
    for (const CorpusDay& d : corpus) {
        AnalogRecord r = d.record;
        r.similarity = weighted_cosine(query, d.z, weights);
        ranked.push_back(std::move(r));
    }
    std::sort(ranked.begin(), ranked.end(), [](const AnalogRecord& a, const AnalogRecord& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        if (a.date != b.date) return a.date < b.date;
        return a.fire_id < b.fire_id;
    });
    std::vector<AnalogRecord> out;
    std::set<std::string> seen;
    for (AnalogRecord& r : ranked) {
        if (out.size() >= k) break;
        if (!seen.insert(r.fire_id).second) continue;
        out.push_back(std::move(r));
    }
    return out;
}

AnalogBounds analog_bounds(const std::vector<AnalogRecord>& analogs, BoundSlack slack) {
    AnalogBounds b;
    if (analogs.empty()) return b;
    auto [pmin, pmax] = std::minmax_element(analogs.begin(), analogs.end(),
                                            [](const auto& x, const auto& y) { return x.personnel < y.personnel; });
    auto [cmin, cmax] = std::minmax_element(analogs.begin(), analogs.end(),
                                            [](const auto& x, const auto& y) { return x.daily_cost < y.daily_cost; });
    b.personnel = Range{pmin->personnel * slack.low, pmax->personnel * slack.high};
    b.cost_musd = Range{cmin->daily_cost * slack.low, cmax->daily_cost * slack.high};
    return b;
}

nlohmann::json stats_to_json(const CorpusStats& stats) {
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t d = 0; d < kNumericFeatures; ++d)
        features.push_back({{"name", kFeatureNames[d]},
                            {"mean", stats.mean[d]},
                            {"std", stats.std[d]},
                            {"constant", static_cast<bool>(stats.constant[d])}});
    return {{"n_days", stats.n_days}, {"features", features}};
}

CorpusStats stats_from_json(const nlohmann::json& j) {
    CorpusStats st;
    try {
        st.n_days = j.at("n_days").get<std::size_t>();
        const auto& features = j.at("features");
        if (features.size() != kNumericFeatures) fail(ErrorKind::format, "stats: wrong feature count");
        for (std::size_t d = 0; d < kNumericFeatures; ++d) {
            const auto& f = features[d];
            if (f.at("name").get<std::string>() != kFeatureNames[d])
                fail(ErrorKind::format, fmt::format("stats: feature {} is not {}", d, kFeatureNames[d]));
            st.mean[d] = f.at("mean").get<double>();
            st.std[d] = f.at("std").get<double>();
            st.constant[d] = f.at("constant").get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, fmt::format("stats: {}", e.what()));
    }
    return st;
}

Corpus build_corpus(const std::vector<EventDayContext>& contexts, const GroundTruth& truth) {
    std::vector<const EventDayContext*> ordered;
    for (const auto& c : contexts) ordered.push_back(&c);
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
        if (a->fire_id != b->fire_id) return a->fire_id < b->fire_id;
        return a->snapshot.date < b->snapshot.date;
    });

    Corpus corpus;
    std::vector<RawFeatures> raws;
    std::vector<EventDayContext> prior;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const EventDayContext& ctx = *ordered[i];
        if (i == 0 || ordered[i - 1]->fire_id != ctx.fire_id) prior.clear();
        RawFeatures raw = ctx.clusters.empty() && !prior.empty() ? quiet_raw_features(prior, ctx)
                                                                 : raw_features(ctx);
        prior.push_back(ctx);
        if (prior.size() > 7) prior.erase(prior.begin());

        auto it = truth.find(ctx.fire_id);
        if (it == truth.end()) continue;
        auto day = std::find_if(it->second.begin(), it->second.end(),
                                [&](const GroundTruthDay& g) { return g.date == ctx.snapshot.date; });
        if (day == it->second.end()) continue;

        CorpusDay cd;
        cd.record.fire_id = ctx.fire_id;
        cd.record.date = ctx.snapshot.date;
        cd.record.personnel = day->personnel;
        cd.record.daily_cost = day->daily_cost;
        cd.raw = raw;
        corpus.days.push_back(std::move(cd));
        raws.push_back(raw);
    }
    if (corpus.days.empty()) fail(ErrorKind::precondition, "corpus has no days with ground truth");
    corpus.stats = corpus_stats(raws);
    for (CorpusDay& d : corpus.days) d.z = standardize(d.raw, corpus.stats);
    return corpus;
}

namespace {

void check_fire_id(const std::string& id) {
    const bool ok = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
    if (!ok) fail(ErrorKind::precondition, fmt::format("fire id '{}' is not usable as a file name", id));
}

std::string content_hash(const std::vector<fs::path>& files, const std::string& truth_bytes) {
    std::string all;
    for (const fs::path& f : files) {
        all += f.filename().string();
        all += '\n';
        all += read_file_bytes(f.string());
    }
    all += truth_bytes;
    return sha256_hex(all);
}

std::vector<fs::path> context_files(const fs::path& dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) fail(ErrorKind::runtime, fmt::format("corpus contexts missing: {}", dir.string()));
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorKind::runtime, fmt::format("cannot write {}", p.string()));
    out << text;
}

} // namespace

void write_corpus_dir(const std::string& dir, const std::vector<EventDayContext>& contexts,
                      const GroundTruth& truth) {
    const fs::path root(dir);
    const fs::path ctx_dir = root / "contexts";
    fs::create_directories(ctx_dir);
    for (const auto& e : fs::directory_iterator(ctx_dir))
        if (e.path().extension() == ".json") fs::remove(e.path());

    std::set<std::string> fires;
    for (const EventDayContext& c : contexts) {
        check_fire_id(c.fire_id);
        fires.insert(c.fire_id);
        write_context_file((ctx_dir / fmt::format("{}__{}.json", c.fire_id, c.snapshot.date.iso())).string(), c);
    }
    GroundTruth subset;
    for (const auto& f : fires)
        if (auto it = truth.find(f); it != truth.end()) subset[f] = it->second;
    std::ostringstream gt;
    write_ground_truth(gt, subset);
    write_text(root / "ground_truth.csv", gt.str());
    fs::remove(root / "stats.json");
    load_corpus_dir(dir); // writes the stats sidecar
}

Corpus load_corpus_dir(const std::string& dir) {
    const fs::path root(dir);
    const std::vector<fs::path> files = context_files(root / "contexts");
    const std::string truth_bytes = read_file_bytes((root / "ground_truth.csv").string());
    std::istringstream truth_in(truth_bytes);
    GroundTruth truth;
    try {
        truth = parse_ground_truth(truth_in);
    } catch (const Error& e) {
        throw Error(e.kind(), fmt::format("{}: {}", (root / "ground_truth.csv").string(), e.what()));
    }

    std::vector<EventDayContext> contexts;
    for (const fs::path& f : files) contexts.push_back(read_context_file(f.string()));
    Corpus corpus = build_corpus(contexts, truth);

    const std::string hash = content_hash(files, truth_bytes);
    const fs::path stats_path = root / "stats.json";
    bool cached = false;
    if (fs::exists(stats_path)) {
        try {
            const auto j = nlohmann::json::parse(read_file_bytes(stats_path.string()));
            if (j.value("content_hash", "") == hash) {
                corpus.stats = stats_from_json(j.at("stats"));
                cached = true;
            }
        } catch (const std::exception&) {
            cached = false; // unreadable sidecar is regenerated below
        }
    }
    if (cached) {
        for (CorpusDay& d : corpus.days) d.z = standardize(d.raw, corpus.stats);
    } else {
        nlohmann::json j{{"content_hash", hash}, {"stats", stats_to_json(corpus.stats)}};
        try {
            write_text(stats_path, j.dump(2) + "\n");
        } catch (const Error&) {
            // read-only corpus: stats stay in memory
        }
    }
    return corpus;
}

} // namespace gal
