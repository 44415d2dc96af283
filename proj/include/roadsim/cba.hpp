#pragma once

#include <string>
#include <utility>
#include <vector>

namespace roadsim::cba {

// All currency is CNY-10k (the unit the reference totals are quoted in);
// flows are vehicles per year.

struct HighwayProfile {
    double length_km = 70.754;
    double baseline_maintenance_per_km = 84.083;  // CNY-10k / km / yr
    double smart_overhead_fraction = 0.20;        // smart O&M premium over regular
    double device_cost_per_km = 39.72;            // CNY-10k / km, one-time deployment
    double device_extra_initial_fraction = 0.10;  // first-year device upkeep, of deployment
    double device_extra_annual_growth = 0.05;     // compounded yearly
    int upgrade_cycle_years = 5;                  // modeled through the recurring stream
};

struct TrafficModel {
    int anchor_year = 2022;
    double anchor_flow = 19.5072e6;     // vehicles / yr at the anchor year
    double anchor_revenue = 50346.49;   // CNY-10k / yr at the anchor year
    double flow_growth_rate = 0.1114;   // per year
    double capacity_per_hour = 4000.0;  // vehicles / h, dual carriageway
    double flow_cap = 35.0e6;           // vehicles / yr, binding cap
    double penetration_step = 0.10;     // GV share gained per year after the anchor
    double uplift_low = 0.03;           // flow uplift below the penetration threshold
    double uplift_high = 0.30;          // and at/above it
    double uplift_threshold = 0.50;
};

// Back-cast construction of the (flow, revenue) history the quadratic is
// fitted on; the published series only anchors the end point.
struct RevenueHistorySpec {
    int start_year = 2013;
    int late_segment_start = 2019;  // steps ending after this year use late_cagr
    double early_cagr = 0.1814;
    double late_cagr = 0.1343;
};

struct Horizon {
    int first_year = 2023;
    int last_year = 2036;  // inclusive

    int years() const { return last_year - first_year + 1; }
};

enum class HighwayKind { Regular, Smart };
enum class BcrMode { FullCost, RecurringCost };

inline constexpr double kGuidedPurchaseShare = 0.7;  // fraction of GVs that buy guidance

// Maintenance escalation: +20% of the baseline per full three-year block,
// non-compounded. This is the reading that reproduces the reference 14-year
// regular total (the compounded reading does not).
double maintenance_factor(int year_offset);

double deployment_cost(const HighwayProfile& profile);

// Yearly cost. Regular: length * baseline * maintenance_factor. Smart: the
// regular cost with the overhead premium, plus the growing device upkeep
// stream, plus the one-time deployment in the first year.
double annual_cost(int year, HighwayKind kind, const HighwayProfile& profile,
                   const Horizon& horizon);

double gv_penetration(int year, const TrafficModel& model);

// Projected annual flow, capped at flow_cap. Smart flow applies the
// penetration-dependent uplift before re-capping.
double project_flow(int year, HighwayKind kind, const TrafficModel& model);

// Least-squares quadratic revenue(flow), evaluation clamped at 0 below.
struct QuadraticFit {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    double operator()(double flow) const;
};

// Requires at least three distinct flow values; throws DegenerateFit.
QuadraticFit fit_revenue_curve(const std::vector<std::pair<double, double>>& history);

std::vector<std::pair<double, double>> backcast_history(const TrafficModel& model,
                                                        const RevenueHistorySpec& spec);

// flow * penetration * purchase share * fee * length, converted to CNY-10k.
double guided_fee_revenue(double flow, double penetration, const HighwayProfile& profile,
                          double fee_per_km_cny);

// FullCost: net / cost. RecurringCost: net / (cost - one-time deployment),
// the convention the reference smart-highway ratio is consistent with.
// Throws ZeroDenominator.
double bcr(double total_cost, double total_net_benefit, double one_time_deployment,
           BcrMode mode);

struct YearRow {
    int year = 0;
    double cost = 0.0;
    double toll_revenue = 0.0;
    double guided_fee_revenue = 0.0;
    double net = 0.0;  // toll + fee - cost
};

struct CbaLedger {
    HighwayKind kind = HighwayKind::Regular;
    std::vector<YearRow> rows;
    double total_cost = 0.0;
    double total_revenue = 0.0;
    double total_net = 0.0;
    double one_time_deployment = 0.0;  // 0 for regular
    double bcr_full = 0.0;
    double bcr_recurring = 0.0;
};

struct CbaInputs {
    HighwayProfile profile;
    TrafficModel traffic;
    RevenueHistorySpec history;
    Horizon horizon;
    double guided_fee_cny_per_km = 0.2;
};

struct CbaComparison {
    CbaLedger regular;
    CbaLedger smart;
};

// Full pipeline: fit the revenue curve on the back-cast history, project
// flows, assemble yearly rows for both highway kinds, total them, and
// compute both BCR conventions.
CbaComparison run_cba(const CbaInputs& inputs);

std::string ledger_csv(const CbaLedger& ledger);
std::string bcr_summary_csv(const CbaComparison& comparison);

}  // namespace roadsim::cba
