#include "odx/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include <nlohmann/json.hpp>

namespace odx {

namespace {

using json = nlohmann::json;

double finite_number(const json& value, const std::string& where) {
    if (!value.is_number()) throw ConfigError(where + " must be a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + " must be finite");
    return v;
}

double positive_number(const json& value, const std::string& where) {
    const double v = finite_number(value, where);
    if (!(v > 0.0)) throw ConfigError(where + " must be positive");
    return v;
}

int positive_int(const json& value, const std::string& where) {
    if (!value.is_number_integer()) throw ConfigError(where + " must be an integer");
    const int v = value.get<int>();
    if (v <= 0) throw ConfigError(where + " must be positive");
    return v;
}

// Applies every key of `section` through the per-key setters; an absent map
// entry is a typo worth failing loudly over.
void apply_section(const json& section, const std::string& name,
                   const std::map<std::string, std::function<void(const json&)>>& setters) {
    if (!section.is_object()) throw ConfigError("section " + name + " must be an object");
    for (const auto& [key, value] : section.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("unknown key " + name + "." + key);
        }
        it->second(value);
    }
}

void apply_expert(const json& section, ExpertConfig& expert) {
    apply_section(
        section, "expert",
        {
            {"ttc_threshold",
             [&](const json& v) { expert.ttc_threshold = positive_number(v, "expert.ttc_threshold"); }},
            {"stop_distance",
             [&](const json& v) { expert.stop_distance = positive_number(v, "expert.stop_distance"); }},
            {"lane_change_distance",
             [&](const json& v) {
                 expert.lane_change_distance = positive_number(v, "expert.lane_change_distance");
             }},
            {"hold_duration",
             [&](const json& v) { expert.hold_duration = positive_number(v, "expert.hold_duration"); }},
            {"waypoint_rate_hz",
             [&](const json& v) { expert.waypoint_rate_hz = positive_number(v, "expert.waypoint_rate_hz"); }},
            {"lookahead",
             [&](const json& v) { expert.lookahead = positive_number(v, "expert.lookahead"); }},
            {"lateral_kp", [&](const json& v) { expert.lateral_kp = finite_number(v, "expert.lateral_kp"); }},
            {"lateral_ki", [&](const json& v) { expert.lateral_ki = finite_number(v, "expert.lateral_ki"); }},
            {"lateral_kd", [&](const json& v) { expert.lateral_kd = finite_number(v, "expert.lateral_kd"); }},
            {"longitudinal_kp",
             [&](const json& v) { expert.longitudinal_kp = finite_number(v, "expert.longitudinal_kp"); }},
            {"longitudinal_ki",
             [&](const json& v) { expert.longitudinal_ki = finite_number(v, "expert.longitudinal_ki"); }},
            {"longitudinal_kd",
             [&](const json& v) { expert.longitudinal_kd = finite_number(v, "expert.longitudinal_kd"); }},
        });
}

void apply_vehicle(const json& section, VehicleParams& vehicle) {
    apply_section(
        section, "vehicle",
        {
            {"wheelbase",
             [&](const json& v) { vehicle.wheelbase = positive_number(v, "vehicle.wheelbase"); }},
            {"half_length",
             [&](const json& v) { vehicle.half_length = positive_number(v, "vehicle.half_length"); }},
            {"half_width",
             [&](const json& v) { vehicle.half_width = positive_number(v, "vehicle.half_width"); }},
            {"accel_max",
             [&](const json& v) { vehicle.accel_max = positive_number(v, "vehicle.accel_max"); }},
            {"brake_max",
             [&](const json& v) { vehicle.brake_max = positive_number(v, "vehicle.brake_max"); }},
            {"steer_max",
             [&](const json& v) { vehicle.steer_max = positive_number(v, "vehicle.steer_max"); }},
            {"drag", [&](const json& v) { vehicle.drag = positive_number(v, "vehicle.drag"); }},
            {"speed_max",
             [&](const json& v) { vehicle.speed_max = positive_number(v, "vehicle.speed_max"); }},
        });
}

void apply_infractions(const json& section, InfractionConfig& infractions) {
    apply_section(
        section, "infractions",
        {
            {"deviation_limit",
             [&](const json& v) {
                 infractions.deviation_limit = positive_number(v, "infractions.deviation_limit");
             }},
            {"blocked_speed",
             [&](const json& v) {
                 infractions.blocked_speed = positive_number(v, "infractions.blocked_speed");
             }},
            {"blocked_duration",
             [&](const json& v) {
                 infractions.blocked_duration = positive_number(v, "infractions.blocked_duration");
             }},
        });
}

void apply_penalties(const json& section, PenaltyConfig& penalties) {
    if (!section.is_object()) throw ConfigError("section penalties must be an object");
    for (const auto& [key, value] : section.items()) {
        const InfractionKind kind = infraction_kind_from_name(key);
        if (value.is_null()) {
            penalties.coefficients.erase(kind);
            continue;
        }
        const double coefficient = finite_number(value, "penalties." + key);
        if (coefficient < 0.0 || coefficient > 1.0) {
            throw ConfigError("penalties." + key + " must lie in [0, 1]");
        }
        penalties.coefficients[kind] = coefficient;
    }
}

void apply_fusion(const json& section, FusionConfig& fusion) {
    apply_section(
        section, "fusion",
        {
            {"feature_dim",
             [&](const json& v) { fusion.feature_dim = positive_int(v, "fusion.feature_dim"); }},
            {"qk_dim", [&](const json& v) { fusion.qk_dim = positive_int(v, "fusion.qk_dim"); }},
            {"v_dim", [&](const json& v) { fusion.v_dim = positive_int(v, "fusion.v_dim"); }},
            {"mlp_hidden",
             [&](const json& v) { fusion.mlp_hidden = positive_int(v, "fusion.mlp_hidden"); }},
            {"gru_hidden",
             [&](const json& v) { fusion.gru_hidden = positive_int(v, "fusion.gru_hidden"); }},
            {"stages", [&](const json& v) { fusion.stages = positive_int(v, "fusion.stages"); }},
        });
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    RunConfig config;
    for (const auto& [key, value] : j.items()) {
        if (key == "dt") {
            config.dt = positive_number(value, "dt");
            if (config.dt > 0.1 + 1e-12) throw ConfigError("dt must not exceed 0.1 s");
        } else if (key == "expert") {
            apply_expert(value, config.expert);
        } else if (key == "vehicle") {
            apply_vehicle(value, config.vehicle);
        } else if (key == "infractions") {
            apply_infractions(value, config.infractions);
        } else if (key == "penalties") {
            try {
                apply_penalties(value, config.penalties);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("penalties: ") + e.what());
            }
        } else if (key == "fusion") {
            apply_fusion(value, config.fusion);
        } else {
            throw ConfigError("unknown config section " + key);
        }
    }
    if (config.fusion.v_dim != config.fusion.feature_dim) {
        throw ConfigError("fusion.v_dim must equal fusion.feature_dim");
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return run_config_from_json(j);
}

}  // namespace odx
