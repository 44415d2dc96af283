#include "roadsim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roadsim/errors.hpp"
#include "roadsim/rng.hpp"

namespace roadsim {

PerceptionSettings default_rv_perception() {
    PerceptionSettings s;
    // Idealized human driver: exact previous-step neighbors.
    s.range_m = 1000.0;
    s.pos_noise_sigma = 0.0;
    s.speed_noise_sigma = 0.0;
    s.latency_steps = 1;
    return s;
}

PerceptionSettings default_av_perception() {
    PerceptionSettings s;
    s.range_m = 100.0;
    s.pos_noise_sigma = 0.5;
    s.speed_noise_sigma = 0.5;
    s.latency_steps = 1;
    return s;
}

PerceptionSettings default_gv_perception() {
    PerceptionSettings s;
    s.range_m = 100.0;  // onboard fallback where roadside coverage has holes
    s.pos_noise_sigma = 0.2;
    s.speed_noise_sigma = 0.2;
    s.latency_steps = 2;  // one extra step of communication and computing time
    s.rsu_confidence = 0.95;
    s.use_roadside = true;
    s.hazard_lookahead_m = 200.0;
    return s;
}

namespace {

double round_half_even(double x) {
    const double f = std::floor(x);
    const double frac = x - f;
    if (frac > 0.5) {
        return f + 1.0;
    }
    if (frac < 0.5) {
        return f;
    }
    return std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
}

RandomStream noise_stream(NoiseKey key, int observer_id, int target_id) {
    return RandomStream(substream_seed(
        key.master_seed,
        {stream_purpose::kPerception, static_cast<std::uint64_t>(key.step),
         static_cast<std::uint64_t>(observer_id), static_cast<std::uint64_t>(target_id)}));
}

}  // namespace

double DeploymentPlan::coverage_fraction() const {
    if (achieved_spacing_m <= 0.0) {
        return 0.0;
    }
    return std::min(1.0, 2.0 * sensing_radius_m / achieved_spacing_m);
}

bool DeploymentPlan::covers(double position_m, double ring_length) const {
    if (unit_positions.empty()) {
        return false;
    }
    // Units are uniform at k * s' starting from 0.
    const double r = wrap_position(position_m, ring_length);
    const double offset = std::fmod(r, achieved_spacing_m);
    const double nearest = std::min(offset, achieved_spacing_m - offset);
    return nearest <= sensing_radius_m;
}

DeploymentPlan deploy_roadside(const RoadGeometry& geometry, double spacing_m,
                               double sensing_radius_m) {
    DeploymentPlan plan;
    plan.requested_spacing_m = spacing_m;
    plan.sensing_radius_m = sensing_radius_m;
    const double ideal_units = geometry.length_m / spacing_m;
    const int n = std::max(1, static_cast<int>(round_half_even(ideal_units)));
    plan.achieved_spacing_m = geometry.length_m / n;
    plan.unit_positions.reserve(n);
    for (int k = 0; k < n; ++k) {
        plan.unit_positions.push_back(k * plan.achieved_spacing_m);
    }
    plan.units_per_km_per_direction = 1000.0 / spacing_m;
    return plan;
}

namespace detail {

PerceivedVehicle make_local_entry(const VehicleState& target, double target_length,
                                  double true_distance, const PerceptionSettings& settings,
                                  NoiseKey key, int observer_id, double ring_length) {
    PerceivedVehicle e;
    e.id = target.id;
    e.lane = target.lane;
    e.position_m = target.position_m;
    e.speed = target.speed;
    e.length_m = target_length;
    e.confidence = 1.0 - true_distance / settings.range_m;
    if (settings.pos_noise_sigma > 0.0 || settings.speed_noise_sigma > 0.0) {
        RandomStream stream = noise_stream(key, observer_id, target.id);
        if (settings.pos_noise_sigma > 0.0) {
            e.position_m =
                wrap_position(e.position_m + settings.pos_noise_sigma * stream.gaussian(),
                              ring_length);
        }
        if (settings.speed_noise_sigma > 0.0) {
            e.speed += settings.speed_noise_sigma * stream.gaussian();
        }
    }
    return e;
}

PerceivedVehicle make_roadside_entry(const VehicleState& target, double target_length,
                                     const PerceptionSettings& settings, NoiseKey key,
                                     int observer_id, double ring_length) {
    PerceivedVehicle e;
    e.id = target.id;
    e.lane = target.lane;
    e.position_m = target.position_m;
    e.speed = target.speed;
    e.length_m = target_length;
    e.confidence = settings.rsu_confidence;
    if (settings.pos_noise_sigma > 0.0 || settings.speed_noise_sigma > 0.0) {
        RandomStream stream = noise_stream(key, observer_id, target.id);
        if (settings.pos_noise_sigma > 0.0) {
            e.position_m =
                wrap_position(e.position_m + settings.pos_noise_sigma * stream.gaussian(),
                              ring_length);
        }
        if (settings.speed_noise_sigma > 0.0) {
            e.speed += settings.speed_noise_sigma * stream.gaussian();
        }
    }
    return e;
}

}  // namespace detail

PerceptionSnapshot perceive_local(const VehicleState& ego, const World& previous_world,
                                  const PerceptionSettings& settings, NoiseKey key) {
    PerceptionSnapshot snap;
    snap.observer_id = ego.id;
    snap.snapshot_lag_steps = settings.latency_steps;
    const double ring = previous_world.geometry.length_m;
    for (const VehicleState& v : previous_world.vehicles) {
        if (v.id == ego.id || v.direction != ego.direction) {
            continue;
        }
        const double d = ring_distance(ego.position_m, v.position_m, ring);
        if (d > settings.range_m) {
            continue;
        }
        const double confidence = 1.0 - d / settings.range_m;
        if (confidence < settings.confidence_floor) {
            continue;
        }
        snap.entries.push_back(detail::make_local_entry(v, previous_world.length_of(v), d,
                                                        settings, key, ego.id, ring));
    }
    return snap;
}

PerceptionSnapshot perceive_roadside(const VehicleState& ego, const std::vector<World>& history,
                                     const DeploymentPlan& plan,
                                     const PerceptionSettings& settings, NoiseKey key) {
    if (static_cast<int>(history.size()) < settings.latency_steps) {
        throw HistoryTooShallow("perception history shallower than latency_steps");
    }
    const World& lagged = history[history.size() - settings.latency_steps];
    const World& local_world = history.back();
    const double ring = lagged.geometry.length_m;

    PerceptionSnapshot snap;
    snap.observer_id = ego.id;
    snap.snapshot_lag_steps = settings.latency_steps;
    for (const VehicleState& v : lagged.vehicles) {
        if (v.id == ego.id || v.direction != ego.direction) {
            continue;
        }
        if (plan.covers(v.position_m, ring)) {
            if (settings.rsu_confidence >= settings.confidence_floor) {
                snap.entries.push_back(detail::make_roadside_entry(v, lagged.length_of(v),
                                                                   settings, key, ego.id, ring));
            }
            continue;
        }
        // Outside roadside coverage: the GV is on its own onboard sensors.
        const VehicleState& current = local_world.vehicles[static_cast<std::size_t>(v.id)];
        const double d = ring_distance(ego.position_m, current.position_m, ring);
        if (d > settings.range_m) {
            continue;
        }
        const double confidence = 1.0 - d / settings.range_m;
        if (confidence < settings.confidence_floor) {
            continue;
        }
        snap.entries.push_back(detail::make_local_entry(current, local_world.length_of(current),
                                                        d, settings, key, ego.id, ring));
    }
    return snap;
}

std::optional<EffectiveLeader> effective_leader(const std::vector<PerceivedVehicle>& entries,
                                                const VehicleState& ego, int lane,
                                                double lookahead_m, double ring_length) {
    const PerceivedVehicle* leader = nullptr;
    double leader_fd = std::numeric_limits<double>::infinity();
    for (const PerceivedVehicle& e : entries) {
        if (e.lane != lane) {
            continue;
        }
        const double fd = forward_distance(ego.position_m, e.position_m, ring_length);
        if (fd <= 0.0) {
            continue;
        }
        if (fd < leader_fd || (fd == leader_fd && leader && e.id < leader->id)) {
            leader = &e;
            leader_fd = fd;
        }
    }
    if (!leader) {
        return std::nullopt;
    }
    double hazard_speed = leader->speed;
    if (lookahead_m > 0.0) {
        for (const PerceivedVehicle& e : entries) {
            if (e.lane != lane) {
                continue;
            }
            const double fd = forward_distance(ego.position_m, e.position_m, ring_length);
            if (fd > 0.0 && fd <= lookahead_m) {
                hazard_speed = std::min(hazard_speed, e.speed);
            }
        }
    }
    EffectiveLeader result;
    result.leader_id = leader->id;
    result.gap = leader_fd - leader->length_m;
    result.approach_rate = ego.speed - hazard_speed;
    return result;
}

std::optional<EffectiveLeader> gv_effective_leader(const PerceptionSnapshot& snapshot,
                                                   const VehicleState& ego, double lookahead_m,
                                                   double ring_length) {
    return effective_leader(snapshot.entries, ego, ego.lane, lookahead_m, ring_length);
}

LaneNeighbors lane_neighbors(const std::vector<PerceivedVehicle>& entries,
                             const VehicleState& ego, int lane, double ego_length,
                             double ring_length) {
    LaneNeighbors out;
    double best_fd = std::numeric_limits<double>::infinity();
    double best_bd = std::numeric_limits<double>::infinity();
    for (const PerceivedVehicle& e : entries) {
        if (e.lane != lane) {
            continue;
        }
        const double fd = forward_distance(ego.position_m, e.position_m, ring_length);
        if (fd > 0.0 && (fd < best_fd || (fd == best_fd && out.leader && e.id < out.leader->id))) {
            out.leader = e;
            best_fd = fd;
        }
        const double bd = ring_length - fd;
        if (fd > 0.0 && (bd < best_bd || (bd == best_bd && out.follower && e.id < out.follower->id))) {
            out.follower = e;
            best_bd = bd;
        }
    }
    if (out.leader) {
        out.leader_gap = best_fd - out.leader->length_m;
    }
    if (out.follower) {
        out.follower_gap = best_bd - ego_length;
    }
    return out;
}

}  // namespace roadsim
