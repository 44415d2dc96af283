#pragma once

#include <array>
#include <cstdint>

#include "roadsim/perception.hpp"
#include "roadsim/types.hpp"

namespace roadsim {

struct RoadsideSettings {
    double spacing_m = 400.0;
    double sensing_radius_m = 300.0;

    bool operator==(const RoadsideSettings&) const = default;
};

struct ScenarioConfig {
    RoadGeometry geometry{};
    int total_vehicles = 100;
    std::array<double, 3> class_shares{0.6, 0.2, 0.2};  // indexed by VehicleClass
    std::array<DriverParams, 3> params_by_class;
    std::array<PerceptionSettings, 3> perception_by_class;
    RoadsideSettings roadside{};
    double dt_s = 0.25;
    int steps = 4800;
    int warmup_steps = 960;
    std::uint64_t seed = 1;

    ScenarioConfig();

    const DriverParams& params(VehicleClass c) const { return params_by_class[class_index(c)]; }
    const PerceptionSettings& perception(VehicleClass c) const {
        return perception_by_class[class_index(c)];
    }

    // Throws ShareMismatch / Error on invariant violations, naming the field.
    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

// Canonical IDM parameters (RV baseline); AV and GV get shorter headways.
DriverParams default_rv_params();
DriverParams default_av_params();
DriverParams default_gv_params();

// Largest-remainder rounding of shares * total; ties break in class order
// (RV, AV, GV). The result sums exactly to total.
std::array<int, 3> class_counts(const std::array<double, 3>& shares, int total);

// Steady-state bumper-to-bumper gap at which the IDM acceleration is zero:
// s_e = (s0 + v T) / sqrt(1 - (v/v0)^delta). Requires 0 <= speed < v0,
// otherwise throws SpeedAtOrAboveDesired.
double equilibrium_spacing(double speed, const DriverParams& params);

// Inverse of equilibrium_spacing: the speed at which a given gap is the
// equilibrium gap (0 when gap <= s0; approaches v0 for large gaps).
double equilibrium_speed(double gap, const DriverParams& params);

// Deterministic world construction: vehicles spread evenly over directions
// and lanes, equally spaced within a lane, started at the equilibrium speed
// for their spacing, with class labels assigned by a seeded shuffle.
// Identical config => bit-identical world.
World build_scenario(const ScenarioConfig& config);

}  // namespace roadsim
