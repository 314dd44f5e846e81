#include "gal/evaluation.hpp"

#include "gal/csv.hpp"
#include "gal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace gal {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size())
        fail(ErrorKind::alignment, fmt::format("metric inputs differ in length: {} vs {}", pred.size(), truth.size()));
    if (pred.empty()) fail(ErrorKind::precondition, "metric inputs are empty");
}

} // namespace

double mae(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    return std::sqrt(s / static_cast<double>(pred.size()));
}

EventReport evaluate_event(const std::string& fire_id, std::span<const DayPrediction> predictions,
                           std::span<const GroundTruthDay> truth) {
    std::map<Date, const DayPrediction*> by_date;
    for (const DayPrediction& p : predictions) {
        if (!by_date.emplace(p.date, &p).second)
            fail(ErrorKind::conflict, fmt::format("fire {}: duplicate prediction for {}", fire_id, p.date.iso()));
    }
    std::map<Date, const GroundTruthDay*> truth_by_date;
    for (const GroundTruthDay& t : truth) truth_by_date.emplace(t.date, &t);
    if (truth_by_date.empty()) fail(ErrorKind::alignment, fmt::format("fire {}: no ground truth", fire_id));

    EventReport r;
    r.fire_id = fire_id;
    std::vector<double> pp, tp, pc, tc;
    for (const auto& [date, t] : truth_by_date) {
        auto it = by_date.find(date);
        if (it == by_date.end())
            fail(ErrorKind::alignment, fmt::format("fire {}: no prediction for {}", fire_id, date.iso()));
        const DayPrediction& p = *it->second;
        DayScore s;
        s.date = date;
        s.pred_personnel = p.personnel;
        s.truth_personnel = t->personnel;
        s.abs_err_personnel = std::abs(p.personnel - t->personnel);
        s.pred_cost = p.cost_musd;
        s.truth_cost = t->daily_cost;
        s.abs_err_cost = std::abs(p.cost_musd - t->daily_cost);
        r.per_day.push_back(s);
        pp.push_back(p.personnel);
        tp.push_back(t->personnel);
        pc.push_back(p.cost_musd);
        tc.push_back(t->daily_cost);
    }
    for (const auto& [date, p] : by_date)
        if (!truth_by_date.count(date))
            fail(ErrorKind::alignment, fmt::format("fire {}: prediction for {} has no ground truth", fire_id, date.iso()));

    r.n_days = r.per_day.size();
    r.mae_personnel = mae(pp, tp);
    r.rmse_personnel = rmse(pp, tp);
    r.mae_cost = mae(pc, tc);
    r.rmse_cost = rmse(pc, tc);
    return r;
}

namespace {

void sort_reports(std::vector<EventReport>& reports) {
    std::sort(reports.begin(), reports.end(),
              [](const EventReport& a, const EventReport& b) { return a.fire_id < b.fire_id; });
}

} // namespace

void write_report_csv(std::ostream& out, std::vector<EventReport> reports) {
    sort_reports(reports);
    out << "fire_id,target,MAE,RMSE\n";
    for (const EventReport& r : reports) {
        out << fmt::format("{},personnel,{:.4f},{:.4f}\n", r.fire_id, r.mae_personnel, r.rmse_personnel);
        out << fmt::format("{},daily_cost_musd,{:.4f},{:.4f}\n", r.fire_id, r.mae_cost, r.rmse_cost);
    }
}

nlohmann::json report_to_json(std::vector<EventReport> reports) {
    sort_reports(reports);
    nlohmann::json arr = nlohmann::json::array();
    for (const EventReport& r : reports) {
        nlohmann::json days = nlohmann::json::array();
        for (const DayScore& d : r.per_day)
            days.push_back({{"date", d.date.iso()},
                            {"pred_personnel", d.pred_personnel},
                            {"truth_personnel", d.truth_personnel},
                            {"abs_err_personnel", d.abs_err_personnel},
                            {"pred_cost_musd", d.pred_cost},
                            {"truth_cost_musd", d.truth_cost},
                            {"abs_err_cost_musd", d.abs_err_cost}});
        arr.push_back({{"fire_id", r.fire_id},
                       {"n_days", r.n_days},
                       {"mae_personnel", r.mae_personnel},
                       {"rmse_personnel", r.rmse_personnel},
                       {"mae_cost_musd", r.mae_cost},
                       {"rmse_cost_musd", r.rmse_cost},
                       {"per_day", days}});
    }
    return {{"reports", arr}};
}

std::vector<EventReport> reports_from_json(const nlohmann::json& j) {
    std::vector<EventReport> out;
    try {
        for (const auto& e : j.at("reports")) {
            EventReport r;
            r.fire_id = e.at("fire_id").get<std::string>();
            r.n_days = e.at("n_days").get<std::size_t>();
            r.mae_personnel = e.at("mae_personnel").get<double>();
            r.rmse_personnel = e.at("rmse_personnel").get<double>();
            r.mae_cost = e.at("mae_cost_musd").get<double>();
            r.rmse_cost = e.at("rmse_cost_musd").get<double>();
            for (const auto& d : e.at("per_day")) {
                DayScore s;
                s.date = Date::parse(d.at("date").get<std::string>());
                s.pred_personnel = d.at("pred_personnel").get<double>();
                s.truth_personnel = d.at("truth_personnel").get<double>();
                s.abs_err_personnel = d.at("abs_err_personnel").get<double>();
                s.pred_cost = d.at("pred_cost_musd").get<double>();
                s.truth_cost = d.at("truth_cost_musd").get<double>();
                s.abs_err_cost = d.at("abs_err_cost_musd").get<double>();
                r.per_day.push_back(s);
            }
            out.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, fmt::format("report: {}", e.what()));
    }
    return out;
}

std::vector<DayPrediction> parse_predictions(std::istream& in) {
    using namespace csv;
    const Header h = read_header(in, "predictions CSV");
    const std::size_t c_fire = h.need({"fire_id"}, "fire_id");
    const std::size_t c_date = h.need({"date"}, "date");
    const std::size_t c_pers = h.need({"personnel"}, "personnel");
    const std::size_t c_cost = h.need({"daily_budget_usd"}, "daily_budget_usd");
    const std::size_t width = h.columns.size();

    std::vector<DayPrediction> out;
    CsvReader reader(in);
    std::vector<std::string> f;
    while (reader.next(f)) {
        const std::size_t row = reader.row();
        if (f.size() != width) throw RowError(row, fmt::format("expected {} fields, found {}", width, f.size()));
        DayPrediction p;
        p.fire_id = f[c_fire];
        if (p.fire_id.empty()) throw RowError(row, "empty fire_id");
        try {
            p.date = Date::parse(f[c_date]);
        } catch (const Error& e) {
            throw RowError(row, e.what());
        }
        p.personnel = field_double(f, c_pers, row, "personnel");
        p.cost_musd = field_double(f, c_cost, row, "daily_budget_usd") / 1e6;
        if (p.personnel < 0.0 || p.cost_musd < 0.0) throw RowError(row, "negative prediction");
        out.push_back(std::move(p));
    }
    return out;
}

void write_predictions(std::ostream& out, std::span<const DayPrediction> predictions) {
    out << "fire_id,date,personnel,daily_budget_usd\n";
    for (const DayPrediction& p : predictions)
        out << fmt::format("{},{},{},{}\n", p.fire_id, p.date.iso(), std::llround(p.personnel),
                           std::llround(p.cost_musd * 1e6));
}

} // namespace gal
