#pragma once

// Reference forecasters: a physical chain (FRP -> fireline intensity ->
// flame length -> NWCG class -> workload -> linear calibration) and
// day-over-day persistence.

#include "gal/consolidation.hpp"
#include "gal/ingest.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace gal {

struct PhysicalParams {
    double radiative_fraction_correction = 10.0; // kappa
    double byram_coefficient = 0.0775;
    double byram_exponent = 0.46;
    double cluster_adjustment = 0.1; // per extra cluster
};

/// kW/m. Throws Error(precondition) for a non-positive perimeter.
double fireline_intensity(double total_frp_mw, double perimeter_m, const PhysicalParams& p = {});

/// Byram: L = a I^b, meters.
double flame_length(double intensity_kw_m, const PhysicalParams& p = {});

/// NWCG flame-length class 1..4 at 4, 8 and 11 ft.
int nwcg_class(double flame_length_m);

double workload_score(double perimeter_m, int cls, std::size_t n_clusters, const PhysicalParams& p = {});

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares. Throws on length mismatch, n < 2 or constant scores.
LinearFit calibrate_linear(std::span<const double> scores, std::span<const double> targets);

struct PhysicalModel {
    PhysicalParams params;
    LinearFit personnel;
    LinearFit cost; // million USD
};

/// Workload score of one event day; 0 on a day without clusters.
double day_workload(const GlobalSnapshot& snapshot, const PhysicalParams& p = {});

struct TrainingDay {
    double score = 0.0;
    double personnel = 0.0;
    double cost_musd = 0.0;
};

PhysicalModel fit_physical(std::span<const TrainingDay> days, const PhysicalParams& p = {});

struct Forecast {
    double personnel = 0.0;
    double cost_musd = 0.0;
};

/// slope * score + intercept per target, clamped at 0.
Forecast physical_predict(const PhysicalModel& model, double score);
Forecast physical_predict(const PhysicalModel& model, const GlobalSnapshot& snapshot);

/// Yesterday's values. Throws on empty history.
Forecast persistence_predict(std::span<const GroundTruthDay> history);

nlohmann::json to_json(const PhysicalModel& m);
PhysicalModel physical_model_from_json(const nlohmann::json& j);

} // namespace gal
