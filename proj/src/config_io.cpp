#include "roadsim/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "roadsim/errors.hpp"

namespace roadsim {

namespace {

using nlohmann::json;

// Object wrapper that tracks which keys were read and type-checks on access,
// so diagnostics can name the exact field.
class Obj {
  public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    double num(const char* key, double fallback) {
        if (!has(key)) {
            return fallback;
        }
        mark(key);
        const json& v = j_.at(key);
        if (!v.is_number()) {
            throw ConfigError(path_ + "." + key + ": expected a number");
        }
        return v.get<double>();
    }

    int integer(const char* key, int fallback) {
        if (!has(key)) {
            return fallback;
        }
        mark(key);
        const json& v = j_.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(path_ + "." + key + ": expected an integer");
        }
        return v.get<int>();
    }

    std::uint64_t uinteger(const char* key, std::uint64_t fallback) {
        if (!has(key)) {
            return fallback;
        }
        mark(key);
        const json& v = j_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
            throw ConfigError(path_ + "." + key + ": expected a nonnegative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const char* key, bool fallback) {
        if (!has(key)) {
            return fallback;
        }
        mark(key);
        const json& v = j_.at(key);
        if (!v.is_boolean()) {
            throw ConfigError(path_ + "." + key + ": expected a boolean");
        }
        return v.get<bool>();
    }

    std::string text(const char* key, std::string fallback) {
        if (!has(key)) {
            return fallback;
        }
        mark(key);
        const json& v = j_.at(key);
        if (!v.is_string()) {
            throw ConfigError(path_ + "." + key + ": expected a string");
        }
        return v.get<std::string>();
    }

    std::optional<Obj> child(const char* key) {
        if (!has(key)) {
            return std::nullopt;
        }
        mark(key);
        return Obj(j_.at(key), path_ + "." + key);
    }

    std::vector<double> num_array(const char* key, std::vector<double> fallback) {
        if (!has(key)) {
            return fallback;
        }
        mark(key);
        const json& v = j_.at(key);
        if (!v.is_array()) {
            throw ConfigError(path_ + "." + key + ": expected an array of numbers");
        }
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number()) {
                throw ConfigError(path_ + "." + key + ": expected an array of numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<int> int_array(const char* key, std::vector<int> fallback) {
        if (!has(key)) {
            return fallback;
        }
        mark(key);
        const json& v = j_.at(key);
        if (!v.is_array()) {
            throw ConfigError(path_ + "." + key + ": expected an array of integers");
        }
        std::vector<int> out;
        for (const json& e : v) {
            if (!e.is_number_integer()) {
                throw ConfigError(path_ + "." + key + ": expected an array of integers");
            }
            out.push_back(e.get<int>());
        }
        return out;
    }

    // Any key never read is a config mistake; reject it by name.
    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(path_ + ": unknown field '" + key + "'");
            }
        }
    }

  private:
    void mark(const char* key) { seen_.insert(key); }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

DriverParams parse_driver_params(Obj obj, DriverParams defaults) {
    DriverParams p = defaults;
    p.desired_speed_v0 = obj.num("desired_speed_v0_mps", p.desired_speed_v0);
    p.time_headway_T = obj.num("time_headway_T_s", p.time_headway_T);
    p.max_accel_a = obj.num("max_accel_a_mps2", p.max_accel_a);
    p.comfort_decel_b = obj.num("comfort_decel_b_mps2", p.comfort_decel_b);
    p.accel_exponent_delta = obj.num("accel_exponent_delta", p.accel_exponent_delta);
    p.min_gap_s0 = obj.num("min_gap_s0_m", p.min_gap_s0);
    p.vehicle_length = obj.num("vehicle_length_m", p.vehicle_length);
    p.politeness_p = obj.num("politeness_p", p.politeness_p);
    p.change_threshold_da = obj.num("change_threshold_da_mps2", p.change_threshold_da);
    p.safe_decel_bsafe = obj.num("safe_decel_bsafe_mps2", p.safe_decel_bsafe);
    obj.finish();
    return p;
}

PerceptionSettings parse_perception(Obj obj, PerceptionSettings defaults) {
    PerceptionSettings s = defaults;
    s.range_m = obj.num("range_m", s.range_m);
    s.pos_noise_sigma = obj.num("pos_noise_sigma_m", s.pos_noise_sigma);
    s.speed_noise_sigma = obj.num("speed_noise_sigma_mps", s.speed_noise_sigma);
    s.latency_steps = obj.integer("latency_steps", s.latency_steps);
    s.confidence_floor = obj.num("confidence_floor", s.confidence_floor);
    s.rsu_confidence = obj.num("rsu_confidence", s.rsu_confidence);
    s.use_roadside = obj.boolean("use_roadside", s.use_roadside);
    s.hazard_lookahead_m = obj.num("hazard_lookahead_m", s.hazard_lookahead_m);
    obj.finish();
    return s;
}

ScenarioConfig parse_scenario(Obj obj) {
    ScenarioConfig cfg;
    if (auto g = obj.child("geometry")) {
        cfg.geometry.length_m = g->num("length_m", cfg.geometry.length_m);
        cfg.geometry.lanes_per_direction =
            g->integer("lanes_per_direction", cfg.geometry.lanes_per_direction);
        cfg.geometry.directions = g->integer("directions", cfg.geometry.directions);
        g->finish();
    }
    cfg.total_vehicles = obj.integer("total_vehicles", cfg.total_vehicles);
    if (auto shares = obj.child("class_shares")) {
        for (VehicleClass c : kAllClasses) {
            cfg.class_shares[class_index(c)] =
                shares->num(class_name(c), cfg.class_shares[class_index(c)]);
        }
        shares->finish();
    }
    if (auto params = obj.child("params_by_class")) {
        for (VehicleClass c : kAllClasses) {
            if (auto p = params->child(class_name(c))) {
                cfg.params_by_class[class_index(c)] =
                    parse_driver_params(*p, cfg.params_by_class[class_index(c)]);
            }
        }
        params->finish();
    }
    if (auto perc = obj.child("perception_by_class")) {
        for (VehicleClass c : kAllClasses) {
            if (auto p = perc->child(class_name(c))) {
                cfg.perception_by_class[class_index(c)] =
                    parse_perception(*p, cfg.perception_by_class[class_index(c)]);
            }
        }
        perc->finish();
    }
    if (auto rs = obj.child("roadside")) {
        cfg.roadside.spacing_m = rs->num("spacing_m", cfg.roadside.spacing_m);
        cfg.roadside.sensing_radius_m = rs->num("sensing_radius_m", cfg.roadside.sensing_radius_m);
        rs->finish();
    }
    cfg.dt_s = obj.num("dt_s", cfg.dt_s);
    cfg.steps = obj.integer("steps", cfg.steps);
    cfg.warmup_steps = obj.integer("warmup_steps", cfg.warmup_steps);
    cfg.seed = obj.uinteger("seed", cfg.seed);
    obj.finish();
    return cfg;
}

ExperimentSettings parse_experiment(Obj obj) {
    ExperimentSettings e;
    e.vehicle_counts = obj.int_array("vehicle_counts", e.vehicle_counts);
    e.penetrations = obj.num_array("penetrations", e.penetrations);
    e.penetration_vehicle_counts =
        obj.int_array("penetration_vehicle_counts", e.penetration_vehicle_counts);
    e.replications = obj.integer("replications", e.replications);
    if (e.replications < 1) {
        throw ConfigError("experiment.replications: must be >= 1");
    }
    for (double p : e.penetrations) {
        if (p < 0.0 || p > 1.0) {
            throw ConfigError("experiment.penetrations: values must be in [0, 1]");
        }
    }
    obj.finish();
    return e;
}

cba::CbaInputs parse_cba(Obj obj) {
    cba::CbaInputs in;
    if (auto h = obj.child("highway")) {
        in.profile.length_km = h->num("length_km", in.profile.length_km);
        in.profile.baseline_maintenance_per_km =
            h->num("baseline_maintenance_per_km_cny10k", in.profile.baseline_maintenance_per_km);
        in.profile.smart_overhead_fraction =
            h->num("smart_overhead_fraction", in.profile.smart_overhead_fraction);
        in.profile.device_cost_per_km =
            h->num("device_cost_per_km_cny10k", in.profile.device_cost_per_km);
        in.profile.device_extra_initial_fraction =
            h->num("device_extra_initial_fraction", in.profile.device_extra_initial_fraction);
        in.profile.device_extra_annual_growth =
            h->num("device_extra_annual_growth", in.profile.device_extra_annual_growth);
        in.profile.upgrade_cycle_years =
            h->integer("upgrade_cycle_years", in.profile.upgrade_cycle_years);
        h->finish();
    }
    if (auto t = obj.child("traffic")) {
        in.traffic.anchor_year = t->integer("anchor_year", in.traffic.anchor_year);
        in.traffic.anchor_flow = t->num("anchor_flow_vehicles_per_year", in.traffic.anchor_flow);
        in.traffic.anchor_revenue = t->num("anchor_revenue_cny10k", in.traffic.anchor_revenue);
        in.traffic.flow_growth_rate = t->num("flow_growth_rate", in.traffic.flow_growth_rate);
        in.traffic.capacity_per_hour =
            t->num("capacity_per_hour_vehicles", in.traffic.capacity_per_hour);
        in.traffic.flow_cap = t->num("flow_cap_vehicles_per_year", in.traffic.flow_cap);
        in.traffic.penetration_step =
            t->num("penetration_step_per_year", in.traffic.penetration_step);
        in.traffic.uplift_low = t->num("uplift_low", in.traffic.uplift_low);
        in.traffic.uplift_high = t->num("uplift_high", in.traffic.uplift_high);
        in.traffic.uplift_threshold = t->num("uplift_threshold", in.traffic.uplift_threshold);
        t->finish();
        if (in.traffic.flow_cap > in.traffic.capacity_per_hour * 8760.0) {
            throw ConfigError("cba.traffic.flow_cap_vehicles_per_year: exceeds hourly capacity "
                              "times 8760");
        }
    }
    if (auto r = obj.child("revenue_history")) {
        in.history.start_year = r->integer("start_year", in.history.start_year);
        in.history.late_segment_start =
            r->integer("late_segment_start_year", in.history.late_segment_start);
        in.history.early_cagr = r->num("early_cagr", in.history.early_cagr);
        in.history.late_cagr = r->num("late_cagr", in.history.late_cagr);
        r->finish();
    }
    if (auto h = obj.child("horizon")) {
        in.horizon.first_year = h->integer("first_year", in.horizon.first_year);
        in.horizon.last_year = h->integer("last_year", in.horizon.last_year);
        h->finish();
        if (in.horizon.last_year < in.horizon.first_year) {
            throw ConfigError("cba.horizon: last_year must be >= first_year");
        }
    }
    in.guided_fee_cny_per_km = obj.num("guided_fee_cny_per_km", in.guided_fee_cny_per_km);
    obj.finish();
    return in;
}

}  // namespace

FileConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Obj top(root, "config");
    FileConfig out;
    out.description = top.text("description", "");
    if (auto s = top.child("scenario")) {
        out.scenario = parse_scenario(std::move(*s));
        out.has_scenario = true;
        out.scenario.validate();
    }
    if (auto e = top.child("experiment")) {
        out.experiment = parse_experiment(std::move(*e));
        out.has_experiment = true;
    }
    if (auto c = top.child("cba")) {
        out.cba = parse_cba(std::move(*c));
        out.has_cba = true;
    }
    top.finish();
    return out;
}

FileConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string scenario_config_json(const ScenarioConfig& cfg, int indent) {
    json j;
    j["geometry"] = {{"length_m", cfg.geometry.length_m},
                     {"lanes_per_direction", cfg.geometry.lanes_per_direction},
                     {"directions", cfg.geometry.directions}};
    j["total_vehicles"] = cfg.total_vehicles;
    for (VehicleClass c : kAllClasses) {
        j["class_shares"][class_name(c)] = cfg.class_shares[class_index(c)];
        const DriverParams& p = cfg.params(c);
        j["params_by_class"][class_name(c)] = {
            {"desired_speed_v0_mps", p.desired_speed_v0},
            {"time_headway_T_s", p.time_headway_T},
            {"max_accel_a_mps2", p.max_accel_a},
            {"comfort_decel_b_mps2", p.comfort_decel_b},
            {"accel_exponent_delta", p.accel_exponent_delta},
            {"min_gap_s0_m", p.min_gap_s0},
            {"vehicle_length_m", p.vehicle_length},
            {"politeness_p", p.politeness_p},
            {"change_threshold_da_mps2", p.change_threshold_da},
            {"safe_decel_bsafe_mps2", p.safe_decel_bsafe}};
        const PerceptionSettings& s = cfg.perception(c);
        j["perception_by_class"][class_name(c)] = {
            {"range_m", s.range_m},
            {"pos_noise_sigma_m", s.pos_noise_sigma},
            {"speed_noise_sigma_mps", s.speed_noise_sigma},
            {"latency_steps", s.latency_steps},
            {"confidence_floor", s.confidence_floor},
            {"rsu_confidence", s.rsu_confidence},
            {"use_roadside", s.use_roadside},
            {"hazard_lookahead_m", s.hazard_lookahead_m}};
    }
    j["roadside"] = {{"spacing_m", cfg.roadside.spacing_m},
                     {"sensing_radius_m", cfg.roadside.sensing_radius_m}};
    j["dt_s"] = cfg.dt_s;
    j["steps"] = cfg.steps;
    j["warmup_steps"] = cfg.warmup_steps;
    j["seed"] = cfg.seed;
    return j.dump(indent);
}

}  // namespace roadsim
