#include "roadsim/cba.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "roadsim/csv.hpp"
#include "roadsim/errors.hpp"

namespace roadsim::cba {

namespace {

constexpr double kMaintenanceStepFraction = 0.2;
constexpr int kMaintenanceStepYears = 3;
constexpr double kFlowScale = 1e6;  // fit in millions of vehicles for conditioning

}  // namespace

double maintenance_factor(int year_offset) {
    return 1.0 + kMaintenanceStepFraction * (year_offset / kMaintenanceStepYears);
}

double deployment_cost(const HighwayProfile& profile) {
    return profile.device_cost_per_km * profile.length_km;
}

double annual_cost(int year, HighwayKind kind, const HighwayProfile& profile,
                   const Horizon& horizon) {
    const int offset = year - horizon.first_year;
    const double regular =
        profile.length_km * profile.baseline_maintenance_per_km * maintenance_factor(offset);
    if (kind == HighwayKind::Regular) {
        return regular;
    }
    const double deployment = deployment_cost(profile);
    const double device_extra = deployment * profile.device_extra_initial_fraction *
                                std::pow(1.0 + profile.device_extra_annual_growth, offset);
    return regular * (1.0 + profile.smart_overhead_fraction) + device_extra +
           (offset == 0 ? deployment : 0.0);
}

double gv_penetration(int year, const TrafficModel& model) {
    const double p = model.penetration_step * (year - model.anchor_year);
    return std::clamp(p, 0.0, 1.0);
}

double project_flow(int year, HighwayKind kind, const TrafficModel& model) {
    const double regular = std::min(
        model.anchor_flow * std::pow(1.0 + model.flow_growth_rate, year - model.anchor_year),
        model.flow_cap);
    if (kind == HighwayKind::Regular) {
        return regular;
    }
    const double p = gv_penetration(year, model);
    const double uplift = p < model.uplift_threshold ? model.uplift_low : model.uplift_high;
    return std::min(regular * (1.0 + uplift), model.flow_cap);
}

double QuadraticFit::operator()(double flow) const {
    return std::max(0.0, c0 + c1 * flow + c2 * flow * flow);
}

QuadraticFit fit_revenue_curve(const std::vector<std::pair<double, double>>& history) {
    std::set<double> distinct;
    for (const auto& [flow, revenue] : history) {
        distinct.insert(flow);
    }
    if (distinct.size() < 3) {
        throw DegenerateFit("revenue fit needs at least 3 distinct flow values");
    }
    const auto n = static_cast<Eigen::Index>(history.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double f = history[static_cast<std::size_t>(i)].first / kFlowScale;
        design(i, 0) = 1.0;
        design(i, 1) = f;
        design(i, 2) = f * f;
        target(i) = history[static_cast<std::size_t>(i)].second;
    }
    const Eigen::Vector3d coeffs = design.colPivHouseholderQr().solve(target);
    QuadraticFit fit;
    fit.c0 = coeffs(0);
    fit.c1 = coeffs(1) / kFlowScale;
    fit.c2 = coeffs(2) / (kFlowScale * kFlowScale);
    return fit;
}

std::vector<std::pair<double, double>> backcast_history(const TrafficModel& model,
                                                        const RevenueHistorySpec& spec) {
    std::vector<std::pair<double, double>> history;
    double revenue = model.anchor_revenue;
    std::vector<double> revenues_back;  // anchor year first
    revenues_back.push_back(revenue);
    for (int year = model.anchor_year - 1; year >= spec.start_year; --year) {
        const double step_cagr =
            (year + 1) > spec.late_segment_start ? spec.late_cagr : spec.early_cagr;
        revenue /= 1.0 + step_cagr;
        revenues_back.push_back(revenue);
    }
    for (int year = spec.start_year; year <= model.anchor_year; ++year) {
        const double flow = model.anchor_flow /
                            std::pow(1.0 + model.flow_growth_rate, model.anchor_year - year);
        history.emplace_back(flow, revenues_back[static_cast<std::size_t>(model.anchor_year - year)]);
    }
    return history;
}

double guided_fee_revenue(double flow, double penetration, const HighwayProfile& profile,
                          double fee_per_km_cny) {
    return flow * penetration * kGuidedPurchaseShare * fee_per_km_cny * profile.length_km /
           1e4;  // CNY to CNY-10k
}

double bcr(double total_cost, double total_net_benefit, double one_time_deployment,
           BcrMode mode) {
    const double denom =
        mode == BcrMode::FullCost ? total_cost : total_cost - one_time_deployment;
    if (!(denom > 0.0)) {
        throw ZeroDenominator("BCR denominator must be positive");
    }
    return total_net_benefit / denom;
}

CbaComparison run_cba(const CbaInputs& inputs) {
    const QuadraticFit fit = fit_revenue_curve(backcast_history(inputs.traffic, inputs.history));

    CbaComparison out;
    out.regular.kind = HighwayKind::Regular;
    out.smart.kind = HighwayKind::Smart;
    out.smart.one_time_deployment = deployment_cost(inputs.profile);

    for (int year = inputs.horizon.first_year; year <= inputs.horizon.last_year; ++year) {
        YearRow reg;
        reg.year = year;
        reg.cost = annual_cost(year, HighwayKind::Regular, inputs.profile, inputs.horizon);
        reg.toll_revenue = fit(project_flow(year, HighwayKind::Regular, inputs.traffic));
        reg.net = reg.toll_revenue - reg.cost;
        out.regular.rows.push_back(reg);

        YearRow smart;
        smart.year = year;
        smart.cost = annual_cost(year, HighwayKind::Smart, inputs.profile, inputs.horizon);
        const double flow = project_flow(year, HighwayKind::Smart, inputs.traffic);
        smart.toll_revenue = fit(flow);
        smart.guided_fee_revenue = guided_fee_revenue(flow, gv_penetration(year, inputs.traffic),
                                                      inputs.profile,
                                                      inputs.guided_fee_cny_per_km);
        smart.net = smart.toll_revenue + smart.guided_fee_revenue - smart.cost;
        out.smart.rows.push_back(smart);
    }

    for (CbaLedger* ledger : {&out.regular, &out.smart}) {
        for (const YearRow& row : ledger->rows) {
            ledger->total_cost += row.cost;
            ledger->total_revenue += row.toll_revenue + row.guided_fee_revenue;
            ledger->total_net += row.net;
        }
        ledger->bcr_full = bcr(ledger->total_cost, ledger->total_net, 0.0, BcrMode::FullCost);
        ledger->bcr_recurring = bcr(ledger->total_cost, ledger->total_net,
                                    ledger->one_time_deployment, BcrMode::RecurringCost);
    }
    return out;
}

std::string ledger_csv(const CbaLedger& ledger) {
    std::string out =
        "schema,row_type,year,cost_cny10k,toll_revenue_cny10k,guided_fee_cny10k,net_cny10k,"
        "value\n";
    const auto row = [](std::vector<std::string> fields) { return csv::join_row(fields); };
    for (const YearRow& r : ledger.rows) {
        out += row({"cba_v1", "year", csv::format_int(r.year), csv::format_double(r.cost),
                    csv::format_double(r.toll_revenue), csv::format_double(r.guided_fee_revenue),
                    csv::format_double(r.net), ""});
    }
    out += row({"cba_v1", "total", "", csv::format_double(ledger.total_cost),
                csv::format_double(ledger.total_revenue), "",
                csv::format_double(ledger.total_net), ""});
    out += row({"cba_v1", "one_time_deployment", "", "", "", "", "",
                csv::format_double(ledger.one_time_deployment)});
    out += row({"cba_v1", "bcr_full_cost", "", "", "", "", "",
                csv::format_double(ledger.bcr_full)});
    out += row({"cba_v1", "bcr_recurring_cost", "", "", "", "", "",
                csv::format_double(ledger.bcr_recurring)});
    return out;
}

std::string bcr_summary_csv(const CbaComparison& comparison) {
    std::string out =
        "schema,kind,total_cost_cny10k,total_net_benefit_cny10k,one_time_deployment_cny10k,"
        "bcr_full_cost,bcr_recurring_cost\n";
    for (const CbaLedger* ledger : {&comparison.regular, &comparison.smart}) {
        out += csv::join_row({"cba_v1",
                              ledger->kind == HighwayKind::Regular ? "regular" : "smart",
                              csv::format_double(ledger->total_cost),
                              csv::format_double(ledger->total_net),
                              csv::format_double(ledger->one_time_deployment),
                              csv::format_double(ledger->bcr_full),
                              csv::format_double(ledger->bcr_recurring)});
    }
    return out;
}

}  // namespace roadsim::cba
