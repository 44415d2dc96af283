#include "roadsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roadsim/csv.hpp"
#include "roadsim/errors.hpp"

namespace roadsim {

std::optional<double> ttc(double gap, double follower_speed, double leader_speed, double cap) {
    if (!(gap > 0.0)) {
        throw NonPositiveGap("ttc requires gap > 0");
    }
    if (follower_speed <= leader_speed) {
        return std::nullopt;
    }
    return std::min(gap / (follower_speed - leader_speed), cap);
}

namespace {

struct ClassAccumulator {
    double sum = 0.0;
    long count = 0;
    long capped = 0;
};

// Walks every (direction, lane) ring of one step in position order and feeds
// follower->leader TTC samples to the accumulators.
void accumulate_step_ttc(const SimTrace& trace, int step, double cap,
                         std::array<ClassAccumulator, 3>& acc) {
    const ScenarioConfig& cfg = trace.config();
    const double ring = cfg.geometry.length_m;
    const int n = trace.vehicle_count();

    for (int dir = 0; dir < cfg.geometry.directions; ++dir) {
        for (int lane = 0; lane < cfg.geometry.lanes_per_direction; ++lane) {
            std::vector<int> members;
            for (int i = 0; i < n; ++i) {
                if (trace.direction(i) == dir && trace.lane(step, i) == lane) {
                    members.push_back(i);
                }
            }
            if (members.size() < 2) {
                continue;
            }
            std::sort(members.begin(), members.end(), [&](int a, int b) {
                const double pa = trace.position(step, a);
                const double pb = trace.position(step, b);
                return pa != pb ? pa < pb : a < b;
            });
            for (std::size_t k = 0; k < members.size(); ++k) {
                const int follower = members[k];
                const int leader = members[(k + 1) % members.size()];
                const double gap = ring_gap(trace.position(step, follower),
                                            trace.position(step, leader),
                                            trace.vehicle_length(leader), ring);
                if (gap <= 0.0) {
                    continue;  // contact-resolution artifacts carry no TTC meaning
                }
                const auto sample =
                    ttc(gap, trace.speed(step, follower), trace.speed(step, leader), cap);
                if (!sample) {
                    continue;
                }
                ClassAccumulator& a = acc[class_index(trace.vehicle_class(follower))];
                a.sum += *sample;
                ++a.count;
                if (*sample >= cap) {
                    ++a.capped;
                }
            }
        }
    }
}

}  // namespace

TtcStats class_mean_ttc(const SimTrace& trace, VehicleClass cls, StepWindow window, double cap) {
    std::array<ClassAccumulator, 3> acc{};
    for (int step = window.begin; step < window.end; ++step) {
        accumulate_step_ttc(trace, step, cap, acc);
    }
    const ClassAccumulator& a = acc[class_index(cls)];
    if (a.count == 0) {
        throw EmptySampleSet(std::string("no TTC samples for class ") + class_name(cls));
    }
    return {a.sum / static_cast<double>(a.count), a.count, a.capped};
}

double mean_speed(const SimTrace& trace, StepWindow window, std::optional<VehicleClass> cls) {
    double sum = 0.0;
    long count = 0;
    for (int step = window.begin; step < window.end; ++step) {
        for (int i = 0; i < trace.vehicle_count(); ++i) {
            if (cls && trace.vehicle_class(i) != *cls) {
                continue;
            }
            sum += trace.speed(step, i);
            ++count;
        }
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

MetricsRecord compute_metrics(const SimTrace& trace, double cap) {
    return compute_metrics(trace, post_warmup_window(trace.config()), cap);
}

MetricsRecord compute_metrics(const SimTrace& trace, StepWindow window, double cap) {
    MetricsRecord rec;
    rec.window = window;
    rec.ttc_cap_s = cap;

    std::array<ClassAccumulator, 3> acc{};
    for (int step = window.begin; step < window.end; ++step) {
        accumulate_step_ttc(trace, step, cap, acc);
    }
    std::array<long, 3> class_members{};
    for (int i = 0; i < trace.vehicle_count(); ++i) {
        ++class_members[class_index(trace.vehicle_class(i))];
    }
    for (int c = 0; c < 3; ++c) {
        rec.ttc_samples[c] = acc[c].count;
        rec.ttc_capped[c] = acc[c].capped;
        rec.mean_ttc_s[c] = acc[c].count > 0 ? acc[c].sum / static_cast<double>(acc[c].count)
                                             : std::numeric_limits<double>::quiet_NaN();
        rec.mean_speed_mps[c] =
            class_members[c] > 0
                ? mean_speed(trace, window, static_cast<VehicleClass>(c))
                : std::numeric_limits<double>::quiet_NaN();
    }
    rec.fleet_mean_speed_mps = mean_speed(trace, window);

    for (const SafetyEvent& e : trace.events()) {
        if (e.time_step < window.begin || e.time_step >= window.end) {
            continue;
        }
        if (e.kind == SafetyEventKind::ContactPrevented) {
            ++rec.contact_events;
        } else {
            ++rec.emergency_events;
        }
    }
    return rec;
}

std::string metrics_csv_header() {
    return "schema,window_begin,window_end,ttc_cap_s,"
           "mean_ttc_rv_s,mean_ttc_av_s,mean_ttc_gv_s,"
           "ttc_samples_rv,ttc_samples_av,ttc_samples_gv,"
           "ttc_capped_rv,ttc_capped_av,ttc_capped_gv,"
           "mean_speed_rv_mps,mean_speed_av_mps,mean_speed_gv_mps,"
           "fleet_mean_speed_mps,contact_events,emergency_events\n";
}

std::string metrics_csv_row(const MetricsRecord& r) {
    std::vector<std::string> fields;
    fields.push_back("metrics_v1");
    fields.push_back(csv::format_int(r.window.begin));
    fields.push_back(csv::format_int(r.window.end));
    fields.push_back(csv::format_double(r.ttc_cap_s));
    for (int c = 0; c < 3; ++c) {
        fields.push_back(csv::format_double(r.mean_ttc_s[c]));
    }
    for (int c = 0; c < 3; ++c) {
        fields.push_back(csv::format_int(r.ttc_samples[c]));
    }
    for (int c = 0; c < 3; ++c) {
        fields.push_back(csv::format_int(r.ttc_capped[c]));
    }
    for (int c = 0; c < 3; ++c) {
        fields.push_back(csv::format_double(r.mean_speed_mps[c]));
    }
    fields.push_back(csv::format_double(r.fleet_mean_speed_mps));
    fields.push_back(csv::format_int(r.contact_events));
    fields.push_back(csv::format_int(r.emergency_events));
    return csv::join_row(fields);
}

}  // namespace roadsim
