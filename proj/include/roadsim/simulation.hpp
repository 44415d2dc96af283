#pragma once

#include <deque>
#include <vector>

#include "roadsim/dynamics.hpp"
#include "roadsim/perception.hpp"
#include "roadsim/scenario.hpp"
#include "roadsim/trace.hpp"

namespace roadsim {

// Drives one scenario from t = 0: owns the world history the class-specific
// perception lags read from, derives every noise substream from the config
// seed, and applies the synchronous step. Results are a pure function of the
// config; distinct Simulations may run concurrently.
//
// For speed the engine perceives through windowed neighbor queries over
// per-lane sorted indexes instead of materializing full snapshots. The
// windows are sized so that every vehicle whose *perceived* position could
// influence a decision is included (Box-Muller noise is bounded by ~8.6
// sigma, the windows allow 9), which makes the fast path decision-equivalent
// to the snapshot functions; tests assert that equivalence. Roadside
// perception with partial coverage mixes lags per entry, so that case runs
// through the full snapshot path.
class Simulation {
  public:
    explicit Simulation(const ScenarioConfig& config);

    const World& current_world() const { return history_.back().world; }
    const DeploymentPlan& deployment() const { return plan_; }
    int step_index() const { return step_index_; }

    // One synchronous step; returns the safety events it emitted.
    std::vector<SafetyEvent> advance();

    // Runs config.steps steps and returns the full trace.
    SimTrace run();

  private:
    struct LaneIndex {
        std::vector<double> position;  // ascending
        std::vector<int> vehicle;      // parallel to position
    };
    struct IndexedWorld {
        World world;
        std::vector<LaneIndex> lanes;  // direction * lanes_per_direction + lane
    };

    static IndexedWorld index_world(World world);
    const IndexedWorld& lagged(int latency_steps) const;

    void collect_lane_window(const IndexedWorld& iw, const VehicleState& ego, int lane,
                             const PerceptionSettings& settings, bool roadside, double hazard_hi,
                             std::vector<PerceivedVehicle>& out) const;
    void collect_entries(const VehicleState& ego, const PerceptionSettings& settings,
                         std::vector<PerceivedVehicle>& out) const;

    ScenarioConfig config_;
    DeploymentPlan plan_;
    StepPolicies policies_;
    LaneChangeLimiter limiter_;
    int max_latency_ = 1;
    bool roadside_fast_path_ = true;
    int step_index_ = 0;
    std::deque<IndexedWorld> history_;  // back = previous step (lag 1)
};

// Convenience wrapper: build the scenario, run it, return the trace.
SimTrace run_simulation(const ScenarioConfig& config);

}  // namespace roadsim
