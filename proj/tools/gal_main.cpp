#include "gal/commands.hpp"
#include "gal/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"gal: wildfire hotspot awareness layer and resource recommendation pipeline"};
    app.require_subcommand(1);

    gal::GlobalOptions opts;
    std::string out_dir, client;
    app.add_option("--config", opts.config_path, "Run configuration (INI)")->required();
    app.add_option("--out-dir", out_dir, "Override [output] out_dir");
    app.add_option("--client", client, "Completion client")->check(CLI::IsMember({"mock", "replay", "live"}));

    gal::FootprintArgs fp;
    auto* footprint = app.add_subcommand("footprint", "Cluster one day's hotspots and write footprint GeoJSON");
    footprint->add_option("--fire", fp.fire_id, "Fire id (reads <hotspots_dir>/<fire>.csv)");
    footprint->add_option("--hotspots", fp.hotspots_path, "Hotspot CSV path instead of the configured file");
    footprint->add_option("--date", fp.date, "Acquisition date YYYY-MM-DD")->required();

    gal::PerceiveArgs pc;
    auto* perceive = app.add_subcommand("perceive", "Print the perception script for one fire-day");
    perceive->add_option("--fire", pc.fire_id)->required();
    perceive->add_option("--date", pc.date)->required();
    perceive->add_flag("--json", pc.json, "Dump the event-day context instead");

    auto* corpus = app.add_subcommand("corpus-build", "Build the historical corpus from the training fires");

    gal::RunArgs ra;
    auto* run = app.add_subcommand("run", "Sequential daily recommendations for evaluation fires");
    run->add_option("--fire", ra.fires, "Fire id (repeatable; default: [fires] eval)");

    gal::EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score a predictions CSV against ground truth");
    evaluate->add_option("--predictions", ev.predictions_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (!out_dir.empty()) opts.out_dir = out_dir;
    if (!client.empty()) opts.client = gal::parse_client_kind(client);

    if (*footprint) return gal::cmd_footprint(opts, fp, std::cout, std::cerr);
    if (*perceive) return gal::cmd_perceive(opts, pc, std::cout, std::cerr);
    if (*corpus) return gal::cmd_corpus_build(opts, std::cout, std::cerr);
    if (*run) return gal::cmd_run(opts, ra, std::cout, std::cerr);
    if (*evaluate) return gal::cmd_evaluate(opts, ev, std::cout, std::cerr);
    return 2;
}
