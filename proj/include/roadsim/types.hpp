#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace roadsim {

// Fleet classes: regular (human-driven), autonomous (onboard sensing only),
// and guided (roadside sensing network). Index order is load-bearing: it is
// the tie-break order for largest-remainder share rounding.
enum class VehicleClass : std::uint8_t { RV = 0, AV = 1, GV = 2 };

inline constexpr std::array<VehicleClass, 3> kAllClasses{VehicleClass::RV, VehicleClass::AV,
                                                         VehicleClass::GV};

inline constexpr int class_index(VehicleClass c) { return static_cast<int>(c); }

inline constexpr const char* class_name(VehicleClass c) {
    switch (c) {
        case VehicleClass::RV: return "rv";
        case VehicleClass::AV: return "av";
        case VehicleClass::GV: return "gv";
    }
    return "?";
}

struct RoadGeometry {
    double length_m = 1000.0;    // ring circumference per direction
    int lanes_per_direction = 2;
    int directions = 2;          // 1 or 2; directions never interact

    bool operator==(const RoadGeometry&) const = default;
};

// Car-following (IDM) and lane-change parameters for one vehicle class.
struct DriverParams {
    double desired_speed_v0 = 33.3;    // m/s
    double time_headway_T = 1.6;       // s
    double max_accel_a = 0.73;         // m/s^2
    double comfort_decel_b = 1.67;     // m/s^2
    double accel_exponent_delta = 4.0;
    double min_gap_s0 = 2.0;           // m
    double vehicle_length = 5.0;       // m
    double politeness_p = 0.2;
    double change_threshold_da = 0.1;  // m/s^2
    double safe_decel_bsafe = 4.0;     // m/s^2

    bool operator==(const DriverParams&) const = default;
};

struct VehicleState {
    int id = 0;
    VehicleClass cls = VehicleClass::RV;
    int direction = 0;
    int lane = 0;
    double position_m = 0.0;  // ring position in [0, L)
    double speed = 0.0;       // >= 0
    double accel = 0.0;

    bool operator==(const VehicleState&) const = default;
};

struct World {
    RoadGeometry geometry;
    std::array<double, 3> length_by_class{5.0, 5.0, 5.0};  // m, indexed by VehicleClass
    std::vector<VehicleState> vehicles;                    // indexed by id

    double length_of(const VehicleState& v) const { return length_by_class[class_index(v.cls)]; }

    bool operator==(const World&) const = default;
};

// Wraps a ring coordinate into [0, L).
inline double wrap_position(double x, double ring_length) {
    double r = x - ring_length * static_cast<long long>(x / ring_length);
    if (r < 0.0) {
        r += ring_length;
    }
    if (r >= ring_length) {
        r -= ring_length;
    }
    return r;
}

// Forward ring distance from `from` to `to`, in [0, L).
inline double forward_distance(double from, double to, double ring_length) {
    return wrap_position(to - from, ring_length);
}

// Shortest ring distance between two positions, in [0, L/2].
inline double ring_distance(double a, double b, double ring_length) {
    const double fwd = forward_distance(a, b, ring_length);
    return fwd <= ring_length - fwd ? fwd : ring_length - fwd;
}

}  // namespace roadsim
