#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "roadsim/types.hpp"

namespace roadsim {

// Sensing model for one vehicle class. Local sensing is a radius around the
// ego with distance-decaying confidence; roadside sensing (GV) is
// segment-wide with constant confidence and an extra communication lag.
struct PerceptionSettings {
    double range_m = 100.0;           // local detection radius (true ring distance)
    double pos_noise_sigma = 0.5;     // m
    double speed_noise_sigma = 0.5;   // m/s
    int latency_steps = 1;            // >= 1; 1 = previous step
    double confidence_floor = 0.0;    // entries below this confidence are dropped
    double rsu_confidence = 0.95;     // constant confidence of roadside entries
    bool use_roadside = false;        // GV: feed from the roadside network
    double hazard_lookahead_m = 0.0;  // downstream-hazard window (0 = plain following)

    bool operator==(const PerceptionSettings&) const = default;
};

PerceptionSettings default_rv_perception();
PerceptionSettings default_av_perception();
PerceptionSettings default_gv_perception();

// One perceived vehicle. Lane and length are discrete/static attributes and
// are reported exactly; position and speed carry sensor noise.
struct PerceivedVehicle {
    int id = 0;
    int lane = 0;
    double position_m = 0.0;  // wrapped into [0, L)
    double speed = 0.0;
    double length_m = 0.0;
    double confidence = 1.0;

    bool operator==(const PerceivedVehicle&) const = default;
};

struct PerceptionSnapshot {
    int observer_id = 0;
    int snapshot_lag_steps = 1;
    std::vector<PerceivedVehicle> entries;

    bool operator==(const PerceptionSnapshot&) const = default;
};

// Roadside unit placement on one ring direction.
struct DeploymentPlan {
    double requested_spacing_m = 0.0;
    double achieved_spacing_m = 0.0;          // L / n
    std::vector<double> unit_positions;       // per side, uniform around the ring
    double sensing_radius_m = 0.0;
    double units_per_km_per_direction = 0.0;  // ideal fraction, e.g. 2.5 for 400 m spacing

    double coverage_fraction() const;
    bool covers(double position_m, double ring_length) const;
};

// Places n = round(L / spacing) units uniformly (half-to-even rounding).
// The reported per-km density is the ideal fraction 1000 / spacing, so a
// 1 km segment still reports 2.5 units/km for 400 m spacing even though only
// an integral number of units fits.
DeploymentPlan deploy_roadside(const RoadGeometry& geometry, double spacing_m,
                               double sensing_radius_m);

// Identifies the (master seed, step) pair perception noise is derived from.
// Every (observer, target) pair gets its own substream, so snapshots are
// reproducible regardless of evaluation order and lazily computable.
struct NoiseKey {
    std::uint64_t master_seed = 0;
    int step = 0;
};

// Onboard sensing: everything within `range_m` true ring distance of the ego
// in its direction (all lanes), read from the previous-step world. Noise is
// zero-mean Gaussian per entry; confidence decays linearly with distance and
// entries below the confidence floor are dropped. The ego never appears in
// its own snapshot.
PerceptionSnapshot perceive_local(const VehicleState& ego, const World& previous_world,
                                  const PerceptionSettings& settings, NoiseKey key);

// Roadside sensing: every same-direction vehicle inside the covered segment,
// read from `history` at depth `settings.latency_steps` (history.back() is
// the previous step, lag 1). Covered entries use the roadside sigmas and the
// constant rsu confidence. When coverage < 1, vehicles outside the covered
// segment (judged at the lagged world) fall back to perceive_local semantics
// at lag 1. Throws HistoryTooShallow if the history is shorter than the lag.
PerceptionSnapshot perceive_roadside(const VehicleState& ego, const std::vector<World>& history,
                                     const DeploymentPlan& plan,
                                     const PerceptionSettings& settings, NoiseKey key);

struct EffectiveLeader {
    int leader_id = -1;
    double gap = 0.0;            // bumper-to-bumper, from perceived positions
    double approach_rate = 0.0;  // ego speed minus min(leader, downstream hazard) speed
};

// Nearest perceived leader in `lane`, with the approach rate taken against
// the slowest perceived vehicle within `lookahead_m` ahead in that lane.
// With lookahead 0 this is exactly nearest-leader following. Empty result
// means free road.
std::optional<EffectiveLeader> effective_leader(const std::vector<PerceivedVehicle>& entries,
                                                const VehicleState& ego, int lane,
                                                double lookahead_m, double ring_length);

// Spec-facing wrapper on the ego's own lane.
std::optional<EffectiveLeader> gv_effective_leader(const PerceptionSnapshot& snapshot,
                                                   const VehicleState& ego, double lookahead_m,
                                                   double ring_length);

// Perceived nearest leader/follower around the ego in one lane.
struct LaneNeighbors {
    std::optional<PerceivedVehicle> leader;
    std::optional<PerceivedVehicle> follower;
    double leader_gap = 0.0;    // bumper-to-bumper
    double follower_gap = 0.0;  // bumper-to-bumper (needs the ego length)
};

LaneNeighbors lane_neighbors(const std::vector<PerceivedVehicle>& entries,
                             const VehicleState& ego, int lane, double ego_length,
                             double ring_length);

namespace detail {
// Noise/confidence construction shared by the snapshot functions and the
// simulation engine's windowed queries; both must produce identical entries.
PerceivedVehicle make_local_entry(const VehicleState& target, double target_length,
                                  double true_distance, const PerceptionSettings& settings,
                                  NoiseKey key, int observer_id, double ring_length);
PerceivedVehicle make_roadside_entry(const VehicleState& target, double target_length,
                                     const PerceptionSettings& settings, NoiseKey key,
                                     int observer_id, double ring_length);
}  // namespace detail

}  // namespace roadsim
