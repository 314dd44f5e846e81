#pragma once

// MAE / RMSE scoring of per-day forecasts against ground truth.

#include "gal/ingest.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gal {

double mae(std::span<const double> pred, std::span<const double> truth);
double rmse(std::span<const double> pred, std::span<const double> truth);

struct DayPrediction {
    std::string fire_id;
    Date date;
    double personnel = 0.0;
    double cost_musd = 0.0;
};

struct DayScore {
    Date date;
    double pred_personnel = 0.0;
    double truth_personnel = 0.0;
    double abs_err_personnel = 0.0;
    double pred_cost = 0.0; // million USD
    double truth_cost = 0.0;
    double abs_err_cost = 0.0;
};

struct EventReport {
    std::string fire_id;
    std::size_t n_days = 0;
    double mae_personnel = 0.0;
    double rmse_personnel = 0.0;
    double mae_cost = 0.0;
    double rmse_cost = 0.0;
    std::vector<DayScore> per_day; // ascending date
};

/// Every truth day needs exactly one prediction and vice versa; the first
/// unmatched date is named in an Error(alignment).
EventReport evaluate_event(const std::string& fire_id, std::span<const DayPrediction> predictions,
                           std::span<const GroundTruthDay> truth);

/// Rows `fire_id,target,MAE,RMSE`, fires ascending, personnel before cost.
void write_report_csv(std::ostream& out, std::vector<EventReport> reports);
nlohmann::json report_to_json(std::vector<EventReport> reports);
std::vector<EventReport> reports_from_json(const nlohmann::json& j);

/// CSV `fire_id,date,personnel,daily_budget_usd` as written by `run`.
std::vector<DayPrediction> parse_predictions(std::istream& in);
void write_predictions(std::ostream& out, std::span<const DayPrediction> predictions);

} // namespace gal
