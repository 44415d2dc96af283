#include "roadsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roadsim/errors.hpp"

namespace roadsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// IDM acceleration for a possibly-absent leader; absent = free road.
double idm_toward(double speed, const std::optional<MobilNeighbor>& leader,
                  const DriverParams& params) {
    if (!leader) {
        return idm_acceleration(speed, 0.0, kInf, params);
    }
    return idm_acceleration(speed, speed - leader->speed, leader->gap, params);
}

struct SideEvaluation {
    bool feasible = false;
    bool qualifies = false;
    double incentive = 0.0;
    double ego_accel_new = 0.0;
};

SideEvaluation evaluate_side(const MobilInput& in, const MobilLane& side, double a_ego_old,
                             const DriverParams& params) {
    SideEvaluation result;
    if ((side.leader && side.leader->gap <= 0.0) || (side.follower && side.follower->gap <= 0.0)) {
        return result;  // no room after the hypothetical change
    }
    result.feasible = true;

    result.ego_accel_new = idm_toward(in.ego_speed, side.leader, params);

    // New follower: before the change it trails the side leader, after it
    // trails the ego.
    double a_nf_old = 0.0;
    double a_nf_new = 0.0;
    if (side.follower) {
        std::optional<MobilNeighbor> nf_lead;
        if (side.leader) {
            nf_lead = MobilNeighbor{side.follower->gap + in.ego_length + side.leader->gap,
                                    side.leader->speed};
        }
        a_nf_old = idm_toward(side.follower->speed, nf_lead, params);
        a_nf_new = idm_acceleration(side.follower->speed, side.follower->speed - in.ego_speed,
                                    side.follower->gap, params);
        if (a_nf_new < -params.safe_decel_bsafe) {
            return result;  // safety criterion failed
        }
    }

    // Old follower: loses the ego as leader, gains the current-lane leader.
    double a_of_old = 0.0;
    double a_of_new = 0.0;
    if (in.current.follower) {
        a_of_old = idm_acceleration(in.current.follower->speed,
                                    in.current.follower->speed - in.ego_speed,
                                    in.current.follower->gap, params);
        std::optional<MobilNeighbor> of_lead;
        if (in.current.leader) {
            of_lead = MobilNeighbor{in.current.follower->gap + in.ego_length +
                                        in.current.leader->gap,
                                    in.current.leader->speed};
        }
        a_of_new = idm_toward(in.current.follower->speed, of_lead, params);
    }

    result.incentive = result.ego_accel_new - a_ego_old +
                       params.politeness_p * ((a_nf_new - a_nf_old) + (a_of_new - a_of_old));
    result.qualifies = result.incentive > params.change_threshold_da;
    return result;
}

}  // namespace

double ring_gap(double follower_pos, double leader_pos, double leader_length,
                double ring_length) {
    return forward_distance(follower_pos, leader_pos, ring_length) - leader_length;
}

double idm_acceleration(double speed, double approach_rate_dv, double gap,
                        const DriverParams& params) {
    if (!(gap > 0.0)) {
        throw NonPositiveGap("idm_acceleration requires gap > 0");
    }
    const double desired_gap =
        params.min_gap_s0 + speed * params.time_headway_T +
        speed * approach_rate_dv /
            (2.0 * std::sqrt(params.max_accel_a * params.comfort_decel_b));
    const double gap_term = desired_gap / gap;  // 0 for free road (gap = inf)
    const double accel =
        params.max_accel_a * (1.0 - std::pow(speed / params.desired_speed_v0,
                                             params.accel_exponent_delta) -
                              gap_term * gap_term);
    return std::max(accel, -kEmergencyDecel);
}

LaneChangeDecision mobil_decision(const MobilInput& input, const DriverParams& params) {
    // Degenerate current-lane neighbors: stay put.
    if ((input.current.leader && input.current.leader->gap <= 0.0) ||
        (input.current.follower && input.current.follower->gap <= 0.0)) {
        return LaneChangeDecision::Stay;
    }
    const double a_ego_old = idm_toward(input.ego_speed, input.current.leader, params);

    SideEvaluation left;
    SideEvaluation right;
    if (input.left) {
        left = evaluate_side(input, *input.left, a_ego_old, params);
    }
    if (input.right) {
        right = evaluate_side(input, *input.right, a_ego_old, params);
    }

    if (left.qualifies && right.qualifies) {
        if (left.ego_accel_new > right.ego_accel_new) {
            return LaneChangeDecision::ChangeLeft;
        }
        if (right.ego_accel_new > left.ego_accel_new) {
            return LaneChangeDecision::ChangeRight;
        }
        return LaneChangeDecision::Stay;
    }
    if (left.qualifies) {
        return LaneChangeDecision::ChangeLeft;
    }
    if (right.qualifies) {
        return LaneChangeDecision::ChangeRight;
    }
    return LaneChangeDecision::Stay;
}

VehicleDecision decide_vehicle(const VehicleState& ego,
                               const std::vector<PerceivedVehicle>& entries,
                               const DriverParams& params, double hazard_lookahead_m,
                               bool may_change_lane, const RoadGeometry& geometry) {
    const double ring = geometry.length_m;
    VehicleDecision decision;
    decision.target_lane = ego.lane;

    if (may_change_lane) {
        MobilInput input;
        input.ego_speed = ego.speed;
        input.ego_length = params.vehicle_length;

        const auto to_mobil = [&](int lane) -> MobilLane {
            const LaneNeighbors n =
                lane_neighbors(entries, ego, lane, params.vehicle_length, ring);
            MobilLane m;
            if (n.leader) {
                m.leader = MobilNeighbor{n.leader_gap, n.leader->speed};
            }
            if (n.follower) {
                m.follower = MobilNeighbor{n.follower_gap, n.follower->speed};
            }
            return m;
        };

        input.current = to_mobil(ego.lane);
        if (ego.lane + 1 < geometry.lanes_per_direction) {
            input.left = to_mobil(ego.lane + 1);
        }
        if (ego.lane - 1 >= 0) {
            input.right = to_mobil(ego.lane - 1);
        }

        switch (mobil_decision(input, params)) {
            case LaneChangeDecision::ChangeLeft:
                decision.target_lane = ego.lane + 1;
                break;
            case LaneChangeDecision::ChangeRight:
                decision.target_lane = ego.lane - 1;
                break;
            case LaneChangeDecision::Stay:
                break;
        }
        decision.changed_lane = decision.target_lane != ego.lane;
    }

    // Follow the perceived leader in the lane the vehicle will occupy.
    const auto leader = effective_leader(entries, ego, decision.target_lane,
                                         hazard_lookahead_m, ring);
    if (leader) {
        decision.perceived_leader_id = leader->leader_id;
        decision.accel = idm_acceleration(ego.speed, leader->approach_rate,
                                          std::max(leader->gap, kMinPerceivedGap), params);
    } else {
        decision.accel = idm_acceleration(ego.speed, 0.0, kInf, params);
    }
    decision.emergency = decision.accel <= -kEmergencyDecel;
    return decision;
}

LaneChangeLimiter::LaneChangeLimiter(int vehicle_count, double dt)
    : cooldown_steps_(static_cast<int>(std::ceil(kLaneChangeCooldownS / dt))) {
    last_change_step_.assign(vehicle_count, std::numeric_limits<int>::min() / 2);
}

bool LaneChangeLimiter::may_change(int vehicle_id, int step_index) const {
    return step_index - last_change_step_[vehicle_id] >= cooldown_steps_;
}

void LaneChangeLimiter::record_change(int vehicle_id, int step_index) {
    last_change_step_[vehicle_id] = step_index;
}

World commit_decisions(const World& world, const std::vector<VehicleDecision>& decisions,
                       double dt, int step_index, LaneChangeLimiter& limiter,
                       std::vector<SafetyEvent>& events) {
    const double ring = world.geometry.length_m;
    World next = world;

    for (std::size_t i = 0; i < next.vehicles.size(); ++i) {
        const VehicleDecision& d = decisions[i];
        VehicleState& v = next.vehicles[i];
        if (d.emergency) {
            events.push_back({step_index, v.id, d.perceived_leader_id,
                              SafetyEventKind::EmergencyBrake});
        }
        if (d.changed_lane) {
            limiter.record_change(v.id, step_index);
        }
        v.lane = d.target_lane;
        v.accel = d.accel;
        const double new_speed = v.speed + d.accel * dt;
        double dx;
        if (new_speed < 0.0) {
            // Stop exactly where the speed reaches zero.
            dx = -v.speed * v.speed / (2.0 * d.accel);
            v.speed = 0.0;
        } else {
            dx = v.speed * dt + 0.5 * d.accel * dt * dt;
            v.speed = new_speed;
        }
        v.position_m = wrap_position(v.position_m + dx, ring);
    }

    // Contact resolution per (direction, lane), on unwrapped coordinates so
    // overshoot past the leader is still detected. Ring order comes from the
    // pre-step positions, which were overlap-free.
    std::vector<char> clamped(next.vehicles.size(), 0);
    for (int dir = 0; dir < world.geometry.directions; ++dir) {
        for (int lane = 0; lane < world.geometry.lanes_per_direction; ++lane) {
            std::vector<int> members;
            for (std::size_t i = 0; i < next.vehicles.size(); ++i) {
                if (next.vehicles[i].direction == dir && next.vehicles[i].lane == lane) {
                    members.push_back(static_cast<int>(i));
                }
            }
            if (members.size() < 2) {
                continue;
            }
            std::sort(members.begin(), members.end(), [&](int a, int b) {
                if (world.vehicles[a].position_m != world.vehicles[b].position_m) {
                    return world.vehicles[a].position_m < world.vehicles[b].position_m;
                }
                return world.vehicles[a].id < world.vehicles[b].id;
            });

            // Unwrapped new positions in ring order.
            const int n = static_cast<int>(members.size());
            std::vector<double> pos(n);
            for (int k = 0; k < n; ++k) {
                const double old_p = world.vehicles[members[k]].position_m;
                const double new_p = next.vehicles[members[k]].position_m;
                double delta = new_p - old_p;
                if (delta < -0.5 * ring) {
                    delta += ring;  // wrapped forward across L
                } else if (delta > 0.5 * ring) {
                    delta -= ring;  // clamped slightly backward across 0
                }
                pos[k] = old_p + delta;
            }

            bool changed = true;
            for (int pass = 0; pass < n && changed; ++pass) {
                changed = false;
                for (int k = 0; k < n; ++k) {
                    const int lead_k = (k + 1) % n;
                    const double lead_pos = pos[lead_k] + (lead_k == 0 ? ring : 0.0);
                    const int f = members[k];
                    const int l = members[lead_k];
                    const double lead_len = next.length_of(next.vehicles[l]);
                    if (lead_pos - pos[k] - lead_len < 0.0) {
                        pos[k] = lead_pos - lead_len - kContactMargin;
                        next.vehicles[f].speed = 0.0;
                        changed = true;
                        if (!clamped[f]) {
                            clamped[f] = 1;
                            events.push_back({step_index, next.vehicles[f].id,
                                              next.vehicles[l].id,
                                              SafetyEventKind::ContactPrevented});
                        }
                    }
                }
            }
            for (int k = 0; k < n; ++k) {
                next.vehicles[members[k]].position_m = wrap_position(pos[k], ring);
            }
        }
    }
    return next;
}

StepResult step(const World& world, const PerceptionFn& perceive, double dt,
                const StepPolicies& policies, LaneChangeLimiter& limiter) {
    std::vector<VehicleDecision> decisions(world.vehicles.size());
    for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
        const VehicleState& ego = world.vehicles[i];
        const PerceptionSnapshot snap = perceive(ego);
        const int ci = class_index(ego.cls);
        decisions[i] = decide_vehicle(ego, snap.entries, policies.params_by_class[ci],
                                      policies.hazard_lookahead_by_class[ci],
                                      limiter.may_change(ego.id, policies.step_index),
                                      world.geometry);
    }
    StepResult result;
    result.world = commit_decisions(world, decisions, dt, policies.step_index, limiter,
                                    result.events);
    return result;
}

}  // namespace roadsim
