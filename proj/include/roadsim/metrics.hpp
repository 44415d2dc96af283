#pragma once

#include <optional>
#include <string>

#include "roadsim/trace.hpp"

namespace roadsim {

// Post-warmup measurement window, as half-open step indices into the trace.
struct StepWindow {
    int begin = 0;
    int end = 0;
};

inline StepWindow post_warmup_window(const ScenarioConfig& config) {
    return {config.warmup_steps, config.steps};
}

inline constexpr double kDefaultTtcCapS = 100.0;

// Constant-speed time-to-collision projection on the bumper-to-bumper gap.
// Empty result = the gap is opening (no risk). Throws NonPositiveGap.
std::optional<double> ttc(double gap, double follower_speed, double leader_speed,
                          double cap = kDefaultTtcCapS);

struct TtcStats {
    double mean = 0.0;
    long sample_count = 0;
    long capped_count = 0;  // samples that hit the cap (included in the mean)
};

// Mean TTC over all same-lane follower/leader pairs where the follower is of
// the given class, across the window, measured on ground-truth states.
// Throws EmptySampleSet when no closing pair ever occurs.
TtcStats class_mean_ttc(const SimTrace& trace, VehicleClass cls, StepWindow window,
                        double cap = kDefaultTtcCapS);

// Time-and-fleet average of true speeds over the window, optionally
// restricted to one class.
double mean_speed(const SimTrace& trace, StepWindow window,
                  std::optional<VehicleClass> cls = std::nullopt);

// One run's summary statistics. TTC fields are NaN when a class has no
// risk-bearing samples (or no members).
struct MetricsRecord {
    StepWindow window;
    double ttc_cap_s = kDefaultTtcCapS;
    std::array<double, 3> mean_ttc_s;       // by class; NaN if empty
    std::array<long, 3> ttc_samples;        // by class
    std::array<long, 3> ttc_capped;         // by class
    std::array<double, 3> mean_speed_mps;   // by class; NaN if class absent
    double fleet_mean_speed_mps = 0.0;
    int contact_events = 0;
    int emergency_events = 0;
};

MetricsRecord compute_metrics(const SimTrace& trace, double cap = kDefaultTtcCapS);
MetricsRecord compute_metrics(const SimTrace& trace, StepWindow window, double cap);

// CSV row serialization for MetricsRecord; schema v1, documented in
// docs/csv_schemas.md.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& record);

}  // namespace roadsim
