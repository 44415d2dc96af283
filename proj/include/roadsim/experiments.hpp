#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "roadsim/metrics.hpp"
#include "roadsim/scenario.hpp"

namespace roadsim {

// Child seed for one sweep cell: a pure function of the master seed, the
// sweep kind, the cell coordinates, and the replication index. Reordering or
// isolating cells cannot change any cell's result.
std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view kind, std::uint64_t coord_a,
                        std::uint64_t coord_b, int replication);

// Cell configs derived from a base config. Counts replace total_vehicles;
// penetrations replace the GV share, splitting the remainder between RV and
// AV in the base config's ratio.
ScenarioConfig config_for_count(const ScenarioConfig& base, int vehicle_count,
                                std::uint64_t seed);
ScenarioConfig config_for_penetration(const ScenarioConfig& base, double gv_share,
                                      int vehicle_count, std::uint64_t seed);

// Spearman rank correlation with average ranks for ties; NaN when either
// argument has zero rank variance.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct DensityCell {
    int vehicle_count = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    MetricsRecord metrics;
};

struct DensityAggregate {
    int vehicle_count = 0;
    std::array<double, 3> mean_ttc_s;  // across replications, by class
    std::array<double, 3> sd_ttc_s;
    double fleet_mean_speed_mps = 0.0;
    double sd_fleet_speed_mps = 0.0;
    double mean_contact_events = 0.0;
    double mean_emergency_events = 0.0;
};

struct DensitySweepResult {
    std::vector<DensityCell> cells;           // count-major, replication-minor
    std::vector<DensityAggregate> aggregates; // one per count
};

// Runs the vehicle-count grid with `replications` seeded runs per count.
// `parallel` bounds concurrent cells and never changes results.
DensitySweepResult density_sweep(const ScenarioConfig& base, const std::vector<int>& counts,
                                 int replications, int parallel = 1);

std::string density_sweep_csv(const DensitySweepResult& result);

struct PenetrationCell {
    double gv_penetration = 0.0;
    int vehicle_count = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    MetricsRecord metrics;
};

struct PenetrationAggregate {
    double gv_penetration = 0.0;
    int vehicle_count = 0;
    double fleet_mean_speed_mps = 0.0;
    double sd_fleet_speed_mps = 0.0;
};

struct PenetrationSummary {
    int vehicle_count = 0;
    double spearman_speed_vs_penetration = 0.0;
};

struct PenetrationSweepResult {
    std::vector<PenetrationCell> cells;  // density-major, penetration, replication
    std::vector<PenetrationAggregate> aggregates;
    std::vector<PenetrationSummary> summaries;  // one per density
};

PenetrationSweepResult penetration_sweep(const ScenarioConfig& base,
                                         const std::vector<double>& penetrations,
                                         const std::vector<int>& counts, int replications,
                                         int parallel = 1);

std::string penetration_sweep_csv(const PenetrationSweepResult& result);

// Shipped experiment grids.
std::vector<int> default_vehicle_counts();      // 100..600
std::vector<double> default_penetrations();     // 0, 0.1, ..., 1.0

}  // namespace roadsim
