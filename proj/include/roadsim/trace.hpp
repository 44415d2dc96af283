#pragma once

#include <cstdint>
#include <vector>

#include "roadsim/dynamics.hpp"
#include "roadsim/scenario.hpp"
#include "roadsim/types.hpp"

namespace roadsim {

// Time-indexed record of a full run. Entry k holds the state after update
// k+1, i.e. at simulation time (k+1)*dt; the t=0 world is reproducible from
// the config. Static per-vehicle attributes (class, direction) are stored
// once; per-step state is stored column-wise.
class SimTrace {
  public:
    SimTrace() = default;
    SimTrace(ScenarioConfig config, const World& initial);

    void append_step(const World& world, const std::vector<SafetyEvent>& step_events);

    int step_count() const { return static_cast<int>(steps_.size()); }
    int vehicle_count() const { return static_cast<int>(classes_.size()); }

    VehicleClass vehicle_class(int vehicle) const { return classes_[vehicle]; }
    int direction(int vehicle) const { return directions_[vehicle]; }
    double vehicle_length(int vehicle) const {
        return length_by_class_[class_index(classes_[vehicle])];
    }

    double position(int step, int vehicle) const { return steps_[step].position[vehicle]; }
    double speed(int step, int vehicle) const { return steps_[step].speed[vehicle]; }
    double accel(int step, int vehicle) const { return steps_[step].accel[vehicle]; }
    int lane(int step, int vehicle) const { return steps_[step].lane[vehicle]; }

    VehicleState state(int step, int vehicle) const;

    const ScenarioConfig& config() const { return config_; }
    const std::vector<SafetyEvent>& events() const { return events_; }
    int event_count(SafetyEventKind kind) const;

    // FNV-1a over the canonical byte stream of all per-step states and
    // events; identical (config, seed) runs hash identically.
    std::uint64_t hash() const;

  private:
    struct StepRecord {
        std::vector<double> position;
        std::vector<double> speed;
        std::vector<double> accel;
        std::vector<std::uint8_t> lane;
    };

    ScenarioConfig config_;
    std::array<double, 3> length_by_class_{5.0, 5.0, 5.0};
    std::vector<VehicleClass> classes_;
    std::vector<std::uint8_t> directions_;
    std::vector<StepRecord> steps_;
    std::vector<SafetyEvent> events_;
};

}  // namespace roadsim
