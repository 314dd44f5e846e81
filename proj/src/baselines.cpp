#include "gal/baselines.hpp"

#include "gal/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace gal {

double fireline_intensity(double total_frp_mw, double perimeter_m, const PhysicalParams& p) {
    if (!(perimeter_m > 0.0)) fail(ErrorKind::precondition, "fireline_intensity: perimeter must be positive");
    require(total_frp_mw >= 0.0, "fireline_intensity: negative FRP");
    return total_frp_mw * 1000.0 * p.radiative_fraction_correction / perimeter_m;
}

double flame_length(double intensity, const PhysicalParams& p) {
    require(intensity >= 0.0, "flame_length: negative intensity");
    return p.byram_coefficient * std::pow(intensity, p.byram_exponent);
}

int nwcg_class(double l) {
    require(l >= 0.0, "nwcg_class: negative flame length");
    // 4, 8 and 11 ft written in metres; 11 * 0.3048 rounds above 3.3528
    if (l < 1.2192) return 1;
    if (l < 2.4384) return 2;
    if (l < 3.3528) return 3;
    return 4;
}

double workload_score(double perimeter_m, int cls, std::size_t n_clusters, const PhysicalParams& p) {
    require(perimeter_m >= 0.0 && cls >= 0, "workload_score: negative input");
    if (n_clusters == 0) return 0.0;
    return perimeter_m / 1000.0 * cls * (1.0 + p.cluster_adjustment * static_cast<double>(n_clusters - 1));
}

LinearFit calibrate_linear(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        fail(ErrorKind::precondition, fmt::format("calibrate_linear: {} scores vs {} targets", x.size(), y.size()));
    if (x.size() < 2) fail(ErrorKind::precondition, "calibrate_linear: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) fail(ErrorKind::precondition, "calibrate_linear: scores are constant");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

double day_workload(const GlobalSnapshot& s, const PhysicalParams& p) {
    if (s.n_clusters == 0 || !(s.total_perimeter_m > 0.0)) return 0.0;
    const double l = flame_length(fireline_intensity(s.total_frp, s.total_perimeter_m, p), p);
    return workload_score(s.total_perimeter_m, nwcg_class(l), s.n_clusters, p);
}

PhysicalModel fit_physical(std::span<const TrainingDay> days, const PhysicalParams& p) {
    std::vector<double> s, tp, tc;
    for (const TrainingDay& d : days) {
        s.push_back(d.score);
        tp.push_back(d.personnel);
        tc.push_back(d.cost_musd);
    }
    PhysicalModel m;
    m.params = p;
    m.personnel = calibrate_linear(s, tp);
    m.cost = calibrate_linear(s, tc);
    return m;
}

Forecast physical_predict(const PhysicalModel& m, double score) {
    return {std::max(0.0, m.personnel.slope * score + m.personnel.intercept),
            std::max(0.0, m.cost.slope * score + m.cost.intercept)};
}

Forecast physical_predict(const PhysicalModel& m, const GlobalSnapshot& s) {
    return physical_predict(m, day_workload(s, m.params));
}

Forecast persistence_predict(std::span<const GroundTruthDay> history) {
    if (history.empty()) fail(ErrorKind::precondition, "persistence_predict: empty history");
    return {history.back().personnel, history.back().daily_cost};
}

nlohmann::json to_json(const PhysicalModel& m) {
    return {{"params",
             {{"radiative_fraction_correction", m.params.radiative_fraction_correction},
              {"byram_coefficient", m.params.byram_coefficient},
              {"byram_exponent", m.params.byram_exponent},
              {"cluster_adjustment", m.params.cluster_adjustment}}},
            {"personnel", {{"slope", m.personnel.slope}, {"intercept", m.personnel.intercept}}},
            {"cost_musd", {{"slope", m.cost.slope}, {"intercept", m.cost.intercept}}}};
}

PhysicalModel physical_model_from_json(const nlohmann::json& j) {
    try {
        PhysicalModel m;
        const auto& p = j.at("params");
        m.params.radiative_fraction_correction = p.at("radiative_fraction_correction").get<double>();
        m.params.byram_coefficient = p.at("byram_coefficient").get<double>();
        m.params.byram_exponent = p.at("byram_exponent").get<double>();
        m.params.cluster_adjustment = p.at("cluster_adjustment").get<double>();
        m.personnel = {j.at("personnel").at("slope").get<double>(), j.at("personnel").at("intercept").get<double>()};
        m.cost = {j.at("cost_musd").at("slope").get<double>(), j.at("cost_musd").at("intercept").get<double>()};
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, fmt::format("physical model: {}", e.what()));
    }
}

} // namespace gal
