#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "roadsim/perception.hpp"
#include "roadsim/types.hpp"

namespace roadsim {

enum class LaneChangeDecision : std::uint8_t { Stay, ChangeLeft, ChangeRight };

enum class SafetyEventKind : std::uint8_t { EmergencyBrake, ContactPrevented };

// Recorded whenever the integrator clamps a state: an IDM request below the
// emergency bound, or a negative gap resolved by repositioning the follower.
struct SafetyEvent {
    int time_step = 0;
    int follower_id = 0;
    int leader_id = 0;
    SafetyEventKind kind = SafetyEventKind::EmergencyBrake;

    bool operator==(const SafetyEvent&) const = default;
};

// Hard floor on commanded deceleration; noisy perception can otherwise
// request unphysical braking.
inline constexpr double kEmergencyDecel = 9.0;  // m/s^2

// Minimum gap fed to the IDM when noise makes a perceived gap nonpositive.
inline constexpr double kMinPerceivedGap = 0.01;  // m

// Margin left in front of a follower repositioned by contact resolution.
inline constexpr double kContactMargin = 0.1;  // m

// Per-vehicle minimum time between lane changes, to suppress ping-pong.
inline constexpr double kLaneChangeCooldownS = 4.0;

// Bumper-to-bumper gap on the ring; negative only in the degenerate overlap
// case that contact resolution clamps away.
double ring_gap(double follower_pos, double leader_pos, double leader_length,
                double ring_length);

// IDM: a * [1 - (v/v0)^delta - (s*(v, dv)/s)^2] with
// s*(v, dv) = s0 + v T + v dv / (2 sqrt(a b)), dv = own speed minus leader
// speed. Result is clamped below at -kEmergencyDecel. gap must be positive
// (infinity = free road); throws NonPositiveGap otherwise.
double idm_acceleration(double speed, double approach_rate_dv, double gap,
                        const DriverParams& params);

// One lane's perceived situation around the ego for the lane-change check.
struct MobilNeighbor {
    double gap = 0.0;  // bumper-to-bumper to/from the hypothetical ego position
    double speed = 0.0;
};

struct MobilLane {
    std::optional<MobilNeighbor> leader;
    std::optional<MobilNeighbor> follower;
};

struct MobilInput {
    double ego_speed = 0.0;
    double ego_length = 0.0;
    MobilLane current;
    std::optional<MobilLane> left;
    std::optional<MobilLane> right;
};

// Incentive/safety lane-change criterion: change iff the new follower could
// still brake within b_safe and the politeness-weighted acceleration gain
// exceeds the threshold. When both sides qualify, the side offering the
// larger post-change ego acceleration wins; an exact tie stays.
LaneChangeDecision mobil_decision(const MobilInput& input, const DriverParams& params);

// Outcome of one vehicle's control decision for the step.
struct VehicleDecision {
    int target_lane = 0;
    double accel = 0.0;
    bool emergency = false;       // IDM request hit the emergency clamp
    int perceived_leader_id = -1; // -1 = free road
    bool changed_lane = false;
};

// Shared controller: lane-change decision plus IDM acceleration toward the
// perceived leader in the lane the vehicle will occupy. `entries` is the
// perceived neighborhood (full snapshot or an equivalent windowed subset).
VehicleDecision decide_vehicle(const VehicleState& ego, const std::vector<PerceivedVehicle>& entries,
                               const DriverParams& params, double hazard_lookahead_m,
                               bool may_change_lane, const RoadGeometry& geometry);

// Tracks per-vehicle lane-change cooldowns across steps.
class LaneChangeLimiter {
  public:
    LaneChangeLimiter() = default;
    LaneChangeLimiter(int vehicle_count, double dt);

    bool may_change(int vehicle_id, int step_index) const;
    void record_change(int vehicle_id, int step_index);
    int cooldown_steps() const { return cooldown_steps_; }

  private:
    std::vector<int> last_change_step_;
    int cooldown_steps_ = 0;
};

// Applies decisions synchronously: ballistic position update with the speed
// clamped at zero (a vehicle decelerating through zero stops exactly at its
// stopping point), then per-lane contact resolution that repositions any
// overlapping follower behind its leader and emits ContactPrevented.
World commit_decisions(const World& world, const std::vector<VehicleDecision>& decisions,
                       double dt, int step_index, LaneChangeLimiter& limiter,
                       std::vector<SafetyEvent>& events);

using PerceptionFn = std::function<PerceptionSnapshot(const VehicleState& ego)>;

struct StepPolicies {
    std::array<DriverParams, 3> params_by_class;
    std::array<double, 3> hazard_lookahead_by_class{0.0, 0.0, 0.0};
    int step_index = 0;
};

struct StepResult {
    World world;
    std::vector<SafetyEvent> events;
};

// Synchronous update on lagged state: every decision reads only the previous
// world (through `perceive`), then all writes commit together. Iteration
// order cannot affect the result.
StepResult step(const World& world, const PerceptionFn& perceive, double dt,
                const StepPolicies& policies, LaneChangeLimiter& limiter);

}  // namespace roadsim
