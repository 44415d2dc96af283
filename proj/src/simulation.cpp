#include "roadsim/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace roadsim {

namespace {

// Box-Muller on a 53-bit uniform cannot exceed sqrt(-2 ln 2^-53) ~ 8.57
// sigma; 9 sigma windows therefore cover every reachable perceived position.
constexpr double kNoiseSigmaBound = 9.0;

}  // namespace

Simulation::Simulation(const ScenarioConfig& config)
    : config_(config),
      plan_(deploy_roadside(config.geometry, config.roadside.spacing_m,
                            config.roadside.sensing_radius_m)),
      limiter_(config.total_vehicles, config.dt_s) {
    policies_.params_by_class = config_.params_by_class;
    for (VehicleClass c : kAllClasses) {
        const int i = class_index(c);
        policies_.hazard_lookahead_by_class[i] = config_.perception(c).hazard_lookahead_m;
        max_latency_ = std::max(max_latency_, config_.perception(c).latency_steps);
    }
    roadside_fast_path_ = plan_.coverage_fraction() >= 1.0;

    IndexedWorld initial = index_world(build_scenario(config_));
    for (int i = 0; i < max_latency_; ++i) {
        history_.push_back(initial);  // the ring is assumed steady before t = 0
    }
}

Simulation::IndexedWorld Simulation::index_world(World world) {
    IndexedWorld iw;
    const int cells = world.geometry.directions * world.geometry.lanes_per_direction;
    iw.lanes.resize(cells);
    for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
        const VehicleState& v = world.vehicles[i];
        iw.lanes[v.direction * world.geometry.lanes_per_direction + v.lane].vehicle.push_back(
            static_cast<int>(i));
    }
    for (LaneIndex& lane : iw.lanes) {
        std::sort(lane.vehicle.begin(), lane.vehicle.end(), [&](int a, int b) {
            if (world.vehicles[a].position_m != world.vehicles[b].position_m) {
                return world.vehicles[a].position_m < world.vehicles[b].position_m;
            }
            return a < b;
        });
        lane.position.reserve(lane.vehicle.size());
        for (int idx : lane.vehicle) {
            lane.position.push_back(world.vehicles[idx].position_m);
        }
    }
    iw.world = std::move(world);
    return iw;
}

const Simulation::IndexedWorld& Simulation::lagged(int latency_steps) const {
    return history_[history_.size() - static_cast<std::size_t>(latency_steps)];
}

void Simulation::collect_lane_window(const IndexedWorld& iw, const VehicleState& ego, int lane,
                                     const PerceptionSettings& settings, bool roadside,
                                     double hazard_hi,
                                     std::vector<PerceivedVehicle>& out) const {
    const double ring = iw.world.geometry.length_m;
    const LaneIndex& li = iw.lanes[ego.direction * iw.world.geometry.lanes_per_direction + lane];
    const int n = static_cast<int>(li.vehicle.size());
    if (n == 0) {
        return;
    }
    const double margin = kNoiseSigmaBound * settings.pos_noise_sigma;
    const NoiseKey key{config_.seed, step_index_};

    const auto emit = [&](const VehicleState& target) {
        if (roadside) {
            if (settings.rsu_confidence < settings.confidence_floor) {
                return false;
            }
            out.push_back(detail::make_roadside_entry(target, iw.world.length_of(target),
                                                      settings, key, ego.id, ring));
            return true;
        }
        const double d = ring_distance(ego.position_m, target.position_m, ring);
        if (d > settings.range_m) {
            return false;
        }
        const double confidence = 1.0 - d / settings.range_m;
        if (confidence < settings.confidence_floor) {
            return false;
        }
        out.push_back(detail::make_local_entry(target, iw.world.length_of(target), d, settings,
                                               key, ego.id, ring));
        return true;
    };

    const auto first_above =
        static_cast<int>(std::upper_bound(li.position.begin(), li.position.end(),
                                          ego.position_m) -
                         li.position.begin());

    // Ahead: everything up to the hazard window plus the nearest-leader
    // cluster (a 2*margin band in which noise could reorder entries).
    double ahead_bound = hazard_hi;
    bool have_first = false;
    for (int k = 0; k < n; ++k) {
        const int j = (first_above + k) % n;
        const int idx = li.vehicle[j];
        const VehicleState& target = iw.world.vehicles[idx];
        if (target.id == ego.id) {
            continue;
        }
        const double fd = forward_distance(ego.position_m, target.position_m, ring);
        if (fd <= 0.0) {
            continue;
        }
        if (!roadside && fd > settings.range_m && fd <= 0.5 * ring) {
            break;  // out of sensor reach and only receding further
        }
        if (have_first && fd > ahead_bound) {
            break;
        }
        const bool member = emit(target);
        if (member && !have_first) {
            have_first = true;
            ahead_bound = std::max(hazard_hi, fd + 2.0 * margin);
        }
    }

    // Behind: the nearest-follower cluster (same reordering band).
    double behind_bound = 2.0 * margin;
    bool have_back = false;
    for (int k = 0; k < n; ++k) {
        const int j = ((first_above - 1 - k) % n + n) % n;
        const int idx = li.vehicle[j];
        const VehicleState& target = iw.world.vehicles[idx];
        if (target.id == ego.id) {
            continue;
        }
        const double bd = forward_distance(target.position_m, ego.position_m, ring);
        if (bd <= 0.0) {
            continue;
        }
        if (!roadside && bd > settings.range_m && bd <= 0.5 * ring) {
            break;
        }
        if (have_back && bd > behind_bound) {
            break;
        }
        // Skip entries already collected by the ahead walk.
        const double fd = ring - bd;
        const bool already = have_first && fd > 0.0 && fd <= ahead_bound;
        bool member = already;
        if (!already) {
            member = emit(target);
        }
        if (member && !have_back) {
            have_back = true;
            behind_bound = bd + 2.0 * margin;
        }
    }
}

void Simulation::collect_entries(const VehicleState& ego, const PerceptionSettings& settings,
                                 std::vector<PerceivedVehicle>& out) const {
    out.clear();
    const IndexedWorld& iw = lagged(settings.latency_steps);
    const double hazard_hi =
        settings.hazard_lookahead_m + kNoiseSigmaBound * settings.pos_noise_sigma;
    const int lanes = config_.geometry.lanes_per_direction;
    for (int lane = std::max(0, ego.lane - 1); lane <= std::min(lanes - 1, ego.lane + 1);
         ++lane) {
        collect_lane_window(iw, ego, lane, settings, settings.use_roadside, hazard_hi, out);
    }
}

std::vector<SafetyEvent> Simulation::advance() {
    const World& world = history_.back().world;
    policies_.step_index = step_index_;

    std::vector<World> contract_history;
    if (!roadside_fast_path_) {
        contract_history.reserve(history_.size());
        for (const IndexedWorld& iw : history_) {
            contract_history.push_back(iw.world);
        }
    }

    std::vector<VehicleDecision> decisions(world.vehicles.size());
    std::vector<PerceivedVehicle> entries;
    for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
        const VehicleState& ego = world.vehicles[i];
        const int ci = class_index(ego.cls);
        const PerceptionSettings& settings = config_.perception_by_class[ci];
        if (settings.use_roadside && !roadside_fast_path_) {
            const PerceptionSnapshot snap = perceive_roadside(
                ego, contract_history, plan_, settings, NoiseKey{config_.seed, step_index_});
            decisions[i] = decide_vehicle(ego, snap.entries, policies_.params_by_class[ci],
                                          policies_.hazard_lookahead_by_class[ci],
                                          limiter_.may_change(ego.id, step_index_),
                                          world.geometry);
            continue;
        }
        collect_entries(ego, settings, entries);
        decisions[i] = decide_vehicle(ego, entries, policies_.params_by_class[ci],
                                      policies_.hazard_lookahead_by_class[ci],
                                      limiter_.may_change(ego.id, step_index_), world.geometry);
    }

    std::vector<SafetyEvent> events;
    World next =
        commit_decisions(world, decisions, config_.dt_s, step_index_, limiter_, events);
    history_.push_back(index_world(std::move(next)));
    while (static_cast<int>(history_.size()) > max_latency_) {
        history_.pop_front();
    }
    ++step_index_;
    return events;
}

SimTrace Simulation::run() {
    SimTrace trace(config_, current_world());
    for (int s = 0; s < config_.steps; ++s) {
        const std::vector<SafetyEvent> events = advance();
        trace.append_step(current_world(), events);
    }
    return trace;
}

SimTrace run_simulation(const ScenarioConfig& config) { return Simulation(config).run(); }

}  // namespace roadsim
