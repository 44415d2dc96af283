#include "roadsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "roadsim/csv.hpp"
#include "roadsim/rng.hpp"
#include "roadsim/simulation.hpp"

namespace roadsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Index-parallel loop with a bounded worker count; results must be written
// by index so scheduling cannot affect output. The first exception wins and
// is rethrown on the caller thread.
void parallel_for(int n, int parallel, const std::function<void(int)>& body) {
    if (n <= 0) {
        return;
    }
    const int workers = std::max(1, std::min(parallel, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) {
                    return;
                }
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) {
        return kNaN;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Sample standard deviation; 0 for fewer than two samples.
double sd_of(const std::vector<double>& xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return xs[a] != xs[b] ? xs[a] < xs[b] : a < b;
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) {
            ++j;
        }
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = shared;
        }
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view kind, std::uint64_t coord_a,
                        std::uint64_t coord_b, int replication) {
    return substream_seed(master_seed, {stream_purpose::kCellSeed, fnv1a(kind), coord_a, coord_b,
                                        static_cast<std::uint64_t>(replication)});
}

ScenarioConfig config_for_count(const ScenarioConfig& base, int vehicle_count,
                                std::uint64_t seed) {
    ScenarioConfig cfg = base;
    cfg.total_vehicles = vehicle_count;
    cfg.seed = seed;
    return cfg;
}

ScenarioConfig config_for_penetration(const ScenarioConfig& base, double gv_share,
                                      int vehicle_count, std::uint64_t seed) {
    ScenarioConfig cfg = base;
    cfg.total_vehicles = vehicle_count;
    cfg.seed = seed;
    const double base_rv = base.class_shares[class_index(VehicleClass::RV)];
    const double base_av = base.class_shares[class_index(VehicleClass::AV)];
    const double base_rest = base_rv + base_av;
    const double w_rv = base_rest > 0.0 ? base_rv / base_rest : 0.5;
    cfg.class_shares[class_index(VehicleClass::GV)] = gv_share;
    cfg.class_shares[class_index(VehicleClass::RV)] = (1.0 - gv_share) * w_rv;
    cfg.class_shares[class_index(VehicleClass::AV)] = (1.0 - gv_share) * (1.0 - w_rv);
    return cfg;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        return kNaN;
    }
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return kNaN;
    }
    return sxy / std::sqrt(sxx * syy);
}

DensitySweepResult density_sweep(const ScenarioConfig& base, const std::vector<int>& counts,
                                 int replications, int parallel) {
    DensitySweepResult result;
    const int cells = static_cast<int>(counts.size()) * replications;
    result.cells.resize(cells);

    parallel_for(cells, parallel, [&](int i) {
        const int count_idx = i / replications;
        const int rep = i % replications;
        const int count = counts[count_idx];
        const std::uint64_t seed =
            cell_seed(base.seed, "density", static_cast<std::uint64_t>(count), 0, rep);
        const ScenarioConfig cfg = config_for_count(base, count, seed);
        const SimTrace trace = run_simulation(cfg);
        result.cells[i] = DensityCell{count, rep, seed, compute_metrics(trace)};
    });

    for (std::size_t c = 0; c < counts.size(); ++c) {
        DensityAggregate agg;
        agg.vehicle_count = counts[c];
        std::array<std::vector<double>, 3> ttcs;
        std::vector<double> speeds;
        std::vector<double> contacts;
        std::vector<double> emergencies;
        for (int rep = 0; rep < replications; ++rep) {
            const MetricsRecord& m = result.cells[c * replications + rep].metrics;
            for (int cls = 0; cls < 3; ++cls) {
                ttcs[cls].push_back(m.mean_ttc_s[cls]);
            }
            speeds.push_back(m.fleet_mean_speed_mps);
            contacts.push_back(static_cast<double>(m.contact_events));
            emergencies.push_back(static_cast<double>(m.emergency_events));
        }
        for (int cls = 0; cls < 3; ++cls) {
            agg.mean_ttc_s[cls] = mean_of(ttcs[cls]);
            agg.sd_ttc_s[cls] = sd_of(ttcs[cls]);
        }
        agg.fleet_mean_speed_mps = mean_of(speeds);
        agg.sd_fleet_speed_mps = sd_of(speeds);
        agg.mean_contact_events = mean_of(contacts);
        agg.mean_emergency_events = mean_of(emergencies);
        result.aggregates.push_back(agg);
    }
    return result;
}

std::string density_sweep_csv(const DensitySweepResult& result) {
    std::string out =
        "schema,row_type,vehicle_count,replication,seed,"
        "mean_ttc_rv_s,mean_ttc_av_s,mean_ttc_gv_s,"
        "ttc_samples_rv,ttc_samples_av,ttc_samples_gv,"
        "mean_speed_rv_mps,mean_speed_av_mps,mean_speed_gv_mps,fleet_mean_speed_mps,"
        "contact_events,emergency_events,sd_ttc_av_s,sd_ttc_gv_s,sd_fleet_speed_mps\n";
    for (const DensityCell& cell : result.cells) {
        std::vector<std::string> f;
        f.push_back("density_v1");
        f.push_back("cell");
        f.push_back(csv::format_int(cell.vehicle_count));
        f.push_back(csv::format_int(cell.replication));
        f.push_back(std::to_string(cell.seed));
        for (int c = 0; c < 3; ++c) {
            f.push_back(csv::format_double(cell.metrics.mean_ttc_s[c]));
        }
        for (int c = 0; c < 3; ++c) {
            f.push_back(csv::format_int(cell.metrics.ttc_samples[c]));
        }
        for (int c = 0; c < 3; ++c) {
            f.push_back(csv::format_double(cell.metrics.mean_speed_mps[c]));
        }
        f.push_back(csv::format_double(cell.metrics.fleet_mean_speed_mps));
        f.push_back(csv::format_int(cell.metrics.contact_events));
        f.push_back(csv::format_int(cell.metrics.emergency_events));
        f.push_back("");
        f.push_back("");
        f.push_back("");
        out += csv::join_row(f);
    }
    for (const DensityAggregate& agg : result.aggregates) {
        std::vector<std::string> f;
        f.push_back("density_v1");
        f.push_back("aggregate");
        f.push_back(csv::format_int(agg.vehicle_count));
        f.push_back("");
        f.push_back("");
        for (int c = 0; c < 3; ++c) {
            f.push_back(csv::format_double(agg.mean_ttc_s[c]));
        }
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back(csv::format_double(agg.fleet_mean_speed_mps));
        f.push_back(csv::format_double(agg.mean_contact_events));
        f.push_back(csv::format_double(agg.mean_emergency_events));
        f.push_back(csv::format_double(agg.sd_ttc_s[class_index(VehicleClass::AV)]));
        f.push_back(csv::format_double(agg.sd_ttc_s[class_index(VehicleClass::GV)]));
        f.push_back(csv::format_double(agg.sd_fleet_speed_mps));
        out += csv::join_row(f);
    }
    return out;
}

PenetrationSweepResult penetration_sweep(const ScenarioConfig& base,
                                         const std::vector<double>& penetrations,
                                         const std::vector<int>& counts, int replications,
                                         int parallel) {
    PenetrationSweepResult result;
    const int per_count = static_cast<int>(penetrations.size()) * replications;
    const int cells = static_cast<int>(counts.size()) * per_count;
    result.cells.resize(cells);

    parallel_for(cells, parallel, [&](int i) {
        const int count_idx = i / per_count;
        const int pen_idx = (i % per_count) / replications;
        const int rep = i % replications;
        const int count = counts[count_idx];
        const double pen = penetrations[pen_idx];
        std::uint64_t pen_bits;
        static_assert(sizeof(pen_bits) == sizeof(pen));
        std::memcpy(&pen_bits, &pen, sizeof(pen_bits));
        const std::uint64_t seed = cell_seed(base.seed, "penetration",
                                             static_cast<std::uint64_t>(count), pen_bits, rep);
        const ScenarioConfig cfg = config_for_penetration(base, pen, count, seed);
        const SimTrace trace = run_simulation(cfg);
        result.cells[i] = PenetrationCell{pen, count, rep, seed, compute_metrics(trace)};
    });

    for (std::size_t ci = 0; ci < counts.size(); ++ci) {
        std::vector<double> agg_speeds;
        std::vector<double> pens;
        for (std::size_t pi = 0; pi < penetrations.size(); ++pi) {
            std::vector<double> speeds;
            for (int rep = 0; rep < replications; ++rep) {
                const std::size_t idx = ci * per_count + pi * replications + rep;
                speeds.push_back(result.cells[idx].metrics.fleet_mean_speed_mps);
            }
            PenetrationAggregate agg;
            agg.gv_penetration = penetrations[pi];
            agg.vehicle_count = counts[ci];
            agg.fleet_mean_speed_mps = mean_of(speeds);
            agg.sd_fleet_speed_mps = sd_of(speeds);
            result.aggregates.push_back(agg);
            agg_speeds.push_back(agg.fleet_mean_speed_mps);
            pens.push_back(penetrations[pi]);
        }
        result.summaries.push_back(
            PenetrationSummary{counts[ci], spearman(pens, agg_speeds)});
    }
    return result;
}

std::string penetration_sweep_csv(const PenetrationSweepResult& result) {
    std::string out =
        "schema,row_type,gv_penetration,vehicle_count,replication,seed,"
        "fleet_mean_speed_mps,mean_ttc_av_s,mean_ttc_gv_s,contact_events,emergency_events,"
        "sd_fleet_speed_mps,spearman_speed_vs_penetration\n";
    for (const PenetrationCell& cell : result.cells) {
        std::vector<std::string> f;
        f.push_back("penetration_v1");
        f.push_back("cell");
        f.push_back(csv::format_double(cell.gv_penetration));
        f.push_back(csv::format_int(cell.vehicle_count));
        f.push_back(csv::format_int(cell.replication));
        f.push_back(std::to_string(cell.seed));
        f.push_back(csv::format_double(cell.metrics.fleet_mean_speed_mps));
        f.push_back(csv::format_double(cell.metrics.mean_ttc_s[class_index(VehicleClass::AV)]));
        f.push_back(csv::format_double(cell.metrics.mean_ttc_s[class_index(VehicleClass::GV)]));
        f.push_back(csv::format_int(cell.metrics.contact_events));
        f.push_back(csv::format_int(cell.metrics.emergency_events));
        f.push_back("");
        f.push_back("");
        out += csv::join_row(f);
    }
    for (const PenetrationAggregate& agg : result.aggregates) {
        std::vector<std::string> f;
        f.push_back("penetration_v1");
        f.push_back("aggregate");
        f.push_back(csv::format_double(agg.gv_penetration));
        f.push_back(csv::format_int(agg.vehicle_count));
        f.push_back("");
        f.push_back("");
        f.push_back(csv::format_double(agg.fleet_mean_speed_mps));
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back(csv::format_double(agg.sd_fleet_speed_mps));
        f.push_back("");
        out += csv::join_row(f);
    }
    for (const PenetrationSummary& s : result.summaries) {
        std::vector<std::string> f;
        f.push_back("penetration_v1");
        f.push_back("summary");
        f.push_back("");
        f.push_back(csv::format_int(s.vehicle_count));
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back("");
        f.push_back(csv::format_double(s.spearman_speed_vs_penetration));
        out += csv::join_row(f);
    }
    return out;
}

std::vector<int> default_vehicle_counts() { return {100, 200, 300, 400, 500, 600}; }

std::vector<double> default_penetrations() {
    std::vector<double> pens;
    for (int i = 0; i <= 10; ++i) {
        pens.push_back(i / 10.0);
    }
    return pens;
}

}  // namespace roadsim
