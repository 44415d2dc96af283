#include "roadsim/cli.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <vector>

#include <json.hpp>

#include "roadsim/cba.hpp"
#include "roadsim/config_io.hpp"
#include "roadsim/csv.hpp"
#include "roadsim/errors.hpp"
#include "roadsim/experiments.hpp"
#include "roadsim/metrics.hpp"
#include "roadsim/simulation.hpp"
#include "roadsim/svg.hpp"

namespace roadsim::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << content;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::vector<std::string>& outputs, const json& extra) {
    json m;
    m["command"] = command;
    m["outputs"] = outputs;
    for (const auto& [key, value] : extra.items()) {
        m[key] = value;
    }
    std::vector<std::string> all = outputs;
    all.push_back("manifest.json");
    m["outputs"] = all;
    write_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

std::string hex_hash(std::uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string trace_summary_csv(const SimTrace& trace) {
    std::string out = "schema,step,time_s,fleet_mean_speed_mps,min_speed_mps,"
                      "contact_events_cum,emergency_events_cum\n";
    const double dt = trace.config().dt_s;
    int contacts = 0;
    int emergencies = 0;
    std::size_t event_idx = 0;
    const auto& events = trace.events();
    for (int step = 0; step < trace.step_count(); ++step) {
        double sum = 0.0;
        double min_speed = std::numeric_limits<double>::infinity();
        for (int i = 0; i < trace.vehicle_count(); ++i) {
            sum += trace.speed(step, i);
            min_speed = std::min(min_speed, trace.speed(step, i));
        }
        while (event_idx < events.size() && events[event_idx].time_step <= step) {
            if (events[event_idx].kind == SafetyEventKind::ContactPrevented) {
                ++contacts;
            } else {
                ++emergencies;
            }
            ++event_idx;
        }
        out += csv::join_row({"trace_v1", csv::format_int(step),
                              csv::format_double((step + 1) * dt),
                              csv::format_double(sum / trace.vehicle_count()),
                              csv::format_double(min_speed), csv::format_int(contacts),
                              csv::format_int(emergencies)});
    }
    return out;
}

int run_guarded(const std::string& command, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << command << ": config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ShareMismatch& e) {
        std::cerr << command << ": config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleDensity& e) {
        std::cerr << command << ": infeasible scenario: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << command << ": internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace

int cmd_simulate(const SimulateOptions& options) {
    return run_guarded("simulate", [&]() {
        FileConfig file = load_config_file(options.config_path);
        if (!file.has_scenario) {
            std::cerr << "simulate: config error: missing 'scenario' section in "
                      << options.config_path << "\n";
            return kExitConfig;
        }
        ScenarioConfig cfg = file.scenario;
        if (options.seed_override) {
            cfg.seed = *options.seed_override;
        }
        cfg.validate();

        const fs::path out_dir(options.out_dir);
        fs::create_directories(out_dir);

        const SimTrace trace = run_simulation(cfg);
        const MetricsRecord metrics = compute_metrics(trace);

        write_file(out_dir / "trace_summary.csv", trace_summary_csv(trace));
        write_file(out_dir / "metrics.csv", metrics_csv_header() + metrics_csv_row(metrics));

        json extra;
        extra["seed"] = cfg.seed;
        extra["trace_hash"] = hex_hash(trace.hash());
        extra["config"] = json::parse(scenario_config_json(cfg));
        write_manifest(out_dir, "simulate", {"trace_summary.csv", "metrics.csv"}, extra);
        return kExitOk;
    });
}

int cmd_sweep(const SweepOptions& options) {
    return run_guarded("sweep", [&]() {
        if (options.kind != "density" && options.kind != "penetration") {
            std::cerr << "sweep: usage error: unknown kind '" << options.kind
                      << "' (expected density or penetration)\n";
            return kExitConfig;
        }
        FileConfig file = load_config_file(options.config_path);
        if (!file.has_scenario) {
            std::cerr << "sweep: config error: missing 'scenario' section in "
                      << options.config_path << "\n";
            return kExitConfig;
        }
        ScenarioConfig base = file.scenario;
        if (options.seed_override) {
            base.seed = *options.seed_override;
        }
        base.validate();
        const ExperimentSettings& exp = file.experiment;

        const fs::path out_dir(options.out_dir);
        fs::create_directories(out_dir);

        std::vector<std::string> outputs;
        json extra;
        extra["seed"] = base.seed;
        extra["config"] = json::parse(scenario_config_json(base));
        extra["parallel"] = options.parallel;
        extra["replications"] = exp.replications;

        if (options.kind == "density") {
            const DensitySweepResult result =
                density_sweep(base, exp.vehicle_counts, exp.replications, options.parallel);
            write_file(out_dir / "density_sweep.csv", density_sweep_csv(result));
            outputs.push_back("density_sweep.csv");
            if (options.emit_svg) {
                svg::ChartSpec spec;
                spec.title = "Mean TTC by vehicle count";
                spec.x_label = "vehicles on the ring";
                spec.y_label = "mean TTC (s)";
                std::vector<svg::Series> series(3);
                const std::array<std::string, 3> colors{"#7f7f7f", "#d62728", "#2ca02c"};
                for (VehicleClass c : kAllClasses) {
                    const int i = class_index(c);
                    series[i].label = class_name(c);
                    series[i].color = colors[i];
                    for (const DensityAggregate& agg : result.aggregates) {
                        series[i].points.emplace_back(agg.vehicle_count, agg.mean_ttc_s[i]);
                    }
                }
                write_file(out_dir / "ttc_vs_count.svg", svg::line_chart(spec, series));
                outputs.push_back("ttc_vs_count.svg");
            }
        } else {
            const PenetrationSweepResult result =
                penetration_sweep(base, exp.penetrations, exp.penetration_vehicle_counts,
                                  exp.replications, options.parallel);
            write_file(out_dir / "penetration_sweep.csv", penetration_sweep_csv(result));
            outputs.push_back("penetration_sweep.csv");
            if (options.emit_svg) {
                svg::ChartSpec spec;
                spec.title = "Fleet mean speed by guided-vehicle penetration";
                spec.x_label = "GV penetration";
                spec.y_label = "mean speed (m/s)";
                std::vector<svg::Series> series;
                const std::array<std::string, 6> colors{"#1f77b4", "#ff7f0e", "#2ca02c",
                                                        "#d62728", "#9467bd", "#8c564b"};
                std::size_t color_idx = 0;
                for (int count : exp.penetration_vehicle_counts) {
                    svg::Series s;
                    s.label = std::to_string(count) + " vehicles";
                    s.color = colors[color_idx++ % colors.size()];
                    for (const PenetrationAggregate& agg : result.aggregates) {
                        if (agg.vehicle_count == count) {
                            s.points.emplace_back(agg.gv_penetration, agg.fleet_mean_speed_mps);
                        }
                    }
                    series.push_back(std::move(s));
                }
                write_file(out_dir / "speed_vs_penetration.svg", svg::line_chart(spec, series));
                outputs.push_back("speed_vs_penetration.svg");
            }
        }
        write_manifest(out_dir, "sweep/" + options.kind, outputs, extra);
        return kExitOk;
    });
}

int cmd_cba(const CbaOptions& options) {
    return run_guarded("cba", [&]() {
        FileConfig file = load_config_file(options.profile_path);
        if (!file.has_cba) {
            std::cerr << "cba: config error: missing 'cba' section in " << options.profile_path
                      << "\n";
            return kExitConfig;
        }
        const cba::CbaComparison comparison = cba::run_cba(file.cba);

        const fs::path out_dir(options.out_dir);
        fs::create_directories(out_dir);

        write_file(out_dir / "cba_ledger_regular.csv", cba::ledger_csv(comparison.regular));
        write_file(out_dir / "cba_ledger_smart.csv", cba::ledger_csv(comparison.smart));
        write_file(out_dir / "cba_bcr_summary.csv", cba::bcr_summary_csv(comparison));
        std::vector<std::string> outputs{"cba_ledger_regular.csv", "cba_ledger_smart.csv",
                                         "cba_bcr_summary.csv"};

        if (options.emit_svg) {
            svg::ChartSpec spec;
            spec.title = "Projected costs and revenues";
            spec.x_label = "year";
            spec.y_label = "annual cost (CNY-10k)";
            spec.y2_label = "annual revenue (CNY-10k)";
            std::vector<svg::Series> series(4);
            series[0] = {"regular cost", {}, "#1f77b4", false};
            series[1] = {"smart cost", {}, "#d62728", false};
            series[2] = {"regular revenue", {}, "#17becf", true};
            series[3] = {"smart revenue", {}, "#ff7f0e", true};
            for (const cba::YearRow& r : comparison.regular.rows) {
                series[0].points.emplace_back(r.year, r.cost);
                series[2].points.emplace_back(r.year, r.toll_revenue + r.guided_fee_revenue);
            }
            for (const cba::YearRow& r : comparison.smart.rows) {
                series[1].points.emplace_back(r.year, r.cost);
                series[3].points.emplace_back(r.year, r.toll_revenue + r.guided_fee_revenue);
            }
            write_file(out_dir / "cba_projection.svg", svg::line_chart(spec, series));
            outputs.push_back("cba_projection.svg");
        }

        json extra;
        extra["bcr_regular_full_cost"] = comparison.regular.bcr_full;
        extra["bcr_smart_full_cost"] = comparison.smart.bcr_full;
        extra["bcr_smart_recurring_cost"] = comparison.smart.bcr_recurring;
        write_manifest(out_dir, "cba", outputs, extra);
        return kExitOk;
    });
}

}  // namespace roadsim::cli
