#include "roadsim/trace.hpp"

#include <cstring>

namespace roadsim {

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
}

void fnv_double(std::uint64_t& h, double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    fnv_bytes(h, &bits, sizeof(bits));
}

}  // namespace

SimTrace::SimTrace(ScenarioConfig config, const World& initial)
    : config_(std::move(config)), length_by_class_(initial.length_by_class) {
    classes_.reserve(initial.vehicles.size());
    directions_.reserve(initial.vehicles.size());
    for (const VehicleState& v : initial.vehicles) {
        classes_.push_back(v.cls);
        directions_.push_back(static_cast<std::uint8_t>(v.direction));
    }
}

void SimTrace::append_step(const World& world, const std::vector<SafetyEvent>& step_events) {
    StepRecord rec;
    const std::size_t n = world.vehicles.size();
    rec.position.reserve(n);
    rec.speed.reserve(n);
    rec.accel.reserve(n);
    rec.lane.reserve(n);
    for (const VehicleState& v : world.vehicles) {
        rec.position.push_back(v.position_m);
        rec.speed.push_back(v.speed);
        rec.accel.push_back(v.accel);
        rec.lane.push_back(static_cast<std::uint8_t>(v.lane));
    }
    steps_.push_back(std::move(rec));
    events_.insert(events_.end(), step_events.begin(), step_events.end());
}

VehicleState SimTrace::state(int step, int vehicle) const {
    VehicleState v;
    v.id = vehicle;
    v.cls = classes_[vehicle];
    v.direction = directions_[vehicle];
    v.lane = steps_[step].lane[vehicle];
    v.position_m = steps_[step].position[vehicle];
    v.speed = steps_[step].speed[vehicle];
    v.accel = steps_[step].accel[vehicle];
    return v;
}

int SimTrace::event_count(SafetyEventKind kind) const {
    int count = 0;
    for (const SafetyEvent& e : events_) {
        if (e.kind == kind) {
            ++count;
        }
    }
    return count;
}

std::uint64_t SimTrace::hash() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const StepRecord& rec : steps_) {
        for (std::size_t i = 0; i < rec.position.size(); ++i) {
            fnv_double(h, rec.position[i]);
            fnv_double(h, rec.speed[i]);
            fnv_bytes(h, &rec.lane[i], 1);
        }
    }
    for (const SafetyEvent& e : events_) {
        fnv_bytes(h, &e.time_step, sizeof(e.time_step));
        fnv_bytes(h, &e.follower_id, sizeof(e.follower_id));
        fnv_bytes(h, &e.leader_id, sizeof(e.leader_id));
        const auto kind = static_cast<std::uint8_t>(e.kind);
        fnv_bytes(h, &kind, 1);
    }
    return h;
}

}  // namespace roadsim
