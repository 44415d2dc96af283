#include "roadsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "roadsim/errors.hpp"
#include "roadsim/rng.hpp"

namespace roadsim {

DriverParams default_rv_params() { return DriverParams{}; }

DriverParams default_av_params() {
    DriverParams p;
    p.time_headway_T = 1.2;
    return p;
}

DriverParams default_gv_params() {
    DriverParams p;
    p.time_headway_T = 1.0;
    return p;
}

ScenarioConfig::ScenarioConfig()
    : params_by_class{default_rv_params(), default_av_params(), default_gv_params()},
      perception_by_class{default_rv_perception(), default_av_perception(),
                          default_gv_perception()} {}

void ScenarioConfig::validate() const {
    if (geometry.length_m <= 0.0) {
        throw Error("geometry.length_m must be > 0");
    }
    if (geometry.lanes_per_direction < 1) {
        throw Error("geometry.lanes_per_direction must be >= 1");
    }
    if (geometry.directions != 1 && geometry.directions != 2) {
        throw Error("geometry.directions must be 1 or 2");
    }
    if (total_vehicles < 1) {
        throw Error("total_vehicles must be >= 1");
    }
    const double share_sum = class_shares[0] + class_shares[1] + class_shares[2];
    if (std::abs(share_sum - 1.0) > 1e-9) {
        throw ShareMismatch("class_shares must sum to 1 (got " + std::to_string(share_sum) + ")");
    }
    for (double s : class_shares) {
        if (s < 0.0) {
            throw ShareMismatch("class_shares must be nonnegative");
        }
    }
    if (dt_s <= 0.0) {
        throw Error("dt_s must be > 0");
    }
    if (warmup_steps < 0 || steps <= warmup_steps) {
        throw Error("steps must exceed warmup_steps and warmup_steps must be >= 0");
    }
    for (VehicleClass c : kAllClasses) {
        const DriverParams& p = params(c);
        const std::string prefix = std::string("params_by_class.") + class_name(c) + ".";
        if (p.desired_speed_v0 <= 0 || p.time_headway_T <= 0 || p.max_accel_a <= 0 ||
            p.comfort_decel_b <= 0 || p.accel_exponent_delta <= 0 || p.min_gap_s0 <= 0 ||
            p.vehicle_length <= 0) {
            throw Error(prefix + "core parameters must be strictly positive");
        }
        if (p.politeness_p < 0.0 || p.politeness_p > 1.0) {
            throw Error(prefix + "politeness_p must be in [0, 1]");
        }
        if (p.change_threshold_da < 0.0) {
            throw Error(prefix + "change_threshold_da must be >= 0");
        }
        if (p.safe_decel_bsafe < p.comfort_decel_b) {
            throw Error(prefix + "safe_decel_bsafe must be >= comfort_decel_b");
        }
        const PerceptionSettings& ps = perception(c);
        const std::string pprefix = std::string("perception_by_class.") + class_name(c) + ".";
        if (ps.pos_noise_sigma < 0.0 || ps.speed_noise_sigma < 0.0) {
            throw Error(pprefix + "noise sigmas must be >= 0");
        }
        if (ps.latency_steps < 1) {
            throw Error(pprefix + "latency_steps must be >= 1");
        }
        if (ps.confidence_floor < 0.0 || ps.confidence_floor > 1.0) {
            throw Error(pprefix + "confidence_floor must be in [0, 1]");
        }
    }
    if (roadside.spacing_m <= 0.0) {
        throw Error("roadside.spacing_m must be > 0");
    }
}

std::array<int, 3> class_counts(const std::array<double, 3>& shares, int total) {
    const double sum = shares[0] + shares[1] + shares[2];
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ShareMismatch("class shares must sum to 1");
    }
    std::array<int, 3> counts{};
    std::array<double, 3> remainders{};
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = shares[i] * total;
        counts[i] = static_cast<int>(std::floor(exact));
        remainders[i] = exact - counts[i];
        assigned += counts[i];
    }
    // Hand out the leftover seats by largest remainder; ties go to the
    // lower class index (RV, AV, GV).
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainders[a] > remainders[b]; });
    for (int i = 0; assigned < total; ++i) {
        ++counts[order[i % 3]];
        ++assigned;
    }
    return counts;
}

double equilibrium_spacing(double speed, const DriverParams& params) {
    if (speed < 0.0 || speed >= params.desired_speed_v0) {
        throw SpeedAtOrAboveDesired("equilibrium_spacing requires 0 <= speed < v0");
    }
    const double ratio = speed / params.desired_speed_v0;
    const double denom = std::sqrt(1.0 - std::pow(ratio, params.accel_exponent_delta));
    return (params.min_gap_s0 + speed * params.time_headway_T) / denom;
}

double equilibrium_speed(double gap, const DriverParams& params) {
    if (gap <= params.min_gap_s0) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = params.desired_speed_v0 * (1.0 - 1e-12);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (equilibrium_spacing(mid, params) < gap) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

World build_scenario(const ScenarioConfig& config) {
    config.validate();
    const RoadGeometry& geom = config.geometry;

    // Feasibility uses the most demanding class present.
    double unit_length = 0.0;
    for (VehicleClass c : kAllClasses) {
        if (config.class_shares[class_index(c)] > 0.0) {
            const DriverParams& p = config.params(c);
            unit_length = std::max(unit_length, p.vehicle_length + p.min_gap_s0);
        }
    }
    const int total_lanes = geom.directions * geom.lanes_per_direction;
    const double road_space = total_lanes * geom.length_m;
    if (config.total_vehicles * unit_length > road_space) {
        throw InfeasibleDensity("total stopped length " +
                                std::to_string(config.total_vehicles * unit_length) +
                                " m exceeds road space " + std::to_string(road_space) + " m");
    }

    // Spread counts over (direction, lane) cells; leftovers go to the first
    // cells in lexicographic order.
    std::vector<int> lane_counts(total_lanes, config.total_vehicles / total_lanes);
    for (int i = 0; i < config.total_vehicles % total_lanes; ++i) {
        ++lane_counts[i];
    }
    for (int count : lane_counts) {
        if (count > 0 && count * unit_length > geom.length_m) {
            throw InfeasibleDensity("per-lane stopped length exceeds ring length");
        }
    }

    // Class labels: exact counts, then a seeded Fisher-Yates shuffle.
    const std::array<int, 3> counts = class_counts(config.class_shares, config.total_vehicles);
    std::vector<VehicleClass> labels;
    labels.reserve(config.total_vehicles);
    for (VehicleClass c : kAllClasses) {
        labels.insert(labels.end(), counts[class_index(c)], c);
    }
    RandomStream shuffle(substream_seed(config.seed, {stream_purpose::kClassShuffle}));
    for (std::size_t i = labels.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(shuffle.below(i));
        std::swap(labels[i - 1], labels[j]);
    }

    World world;
    world.geometry = geom;
    for (VehicleClass c : kAllClasses) {
        world.length_by_class[class_index(c)] = config.params(c).vehicle_length;
    }
    world.vehicles.reserve(config.total_vehicles);
    int next_id = 0;
    for (int dir = 0; dir < geom.directions; ++dir) {
        for (int lane = 0; lane < geom.lanes_per_direction; ++lane) {
            const int cell = dir * geom.lanes_per_direction + lane;
            const int count = lane_counts[cell];
            if (count == 0) {
                continue;
            }
            const double spacing = geom.length_m / count;
            for (int k = 0; k < count; ++k) {
                VehicleState v;
                v.id = next_id;
                v.cls = labels[next_id];
                v.direction = dir;
                v.lane = lane;
                v.position_m = k * spacing;
                world.vehicles.push_back(v);
                ++next_id;
            }
        }
    }

    // Start each vehicle at the equilibrium speed for its gap to the vehicle
    // ahead (its own parameters, the leader's actual length).
    int base = 0;
    for (int dir = 0; dir < geom.directions; ++dir) {
        for (int lane = 0; lane < geom.lanes_per_direction; ++lane) {
            const int cell = dir * geom.lanes_per_direction + lane;
            const int count = lane_counts[cell];
            if (count == 0) {
                continue;
            }
            const double spacing = geom.length_m / count;
            for (int k = 0; k < count; ++k) {
                VehicleState& v = world.vehicles[base + k];
                const DriverParams& own = config.params(v.cls);
                if (count == 1) {
                    v.speed = own.desired_speed_v0;
                    continue;
                }
                const VehicleState& leader = world.vehicles[base + (k + 1) % count];
                const double gap = spacing - config.params(leader.cls).vehicle_length;
                v.speed = std::min(own.desired_speed_v0, equilibrium_speed(gap, own));
            }
            base += count;
        }
    }
    return world;
}

}  // namespace roadsim
