#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roadsim/cba.hpp"
#include "roadsim/experiments.hpp"
#include "roadsim/scenario.hpp"

namespace roadsim {

struct ExperimentSettings {
    std::vector<int> vehicle_counts = default_vehicle_counts();
    std::vector<double> penetrations = default_penetrations();
    std::vector<int> penetration_vehicle_counts{600};
    int replications = 5;
};

// Parsed contents of one config file. Sections are optional; defaults apply
// wherever a field or section is omitted.
struct FileConfig {
    std::string description;
    ScenarioConfig scenario;
    ExperimentSettings experiment;
    cba::CbaInputs cba;
    bool has_scenario = false;
    bool has_experiment = false;
    bool has_cba = false;
};

// Loads and validates a JSON config. Unknown or ill-typed fields raise
// ConfigError naming the offending field path (e.g. "scenario.dt_s").
FileConfig load_config_file(const std::string& path);
FileConfig parse_config(const std::string& text);

// Effective scenario config as a JSON document (for run manifests).
std::string scenario_config_json(const ScenarioConfig& config, int indent = 2);

}  // namespace roadsim
