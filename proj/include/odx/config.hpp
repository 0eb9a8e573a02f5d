#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "odx/expert_policy.hpp"
#include "odx/fusion.hpp"
#include "odx/scoring.hpp"
#include "odx/sim_harness.hpp"

namespace odx {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Everything a run can tune, bundled with library defaults. A config file
// overrides fields selectively; anything it does not mention keeps its
// default.
struct RunConfig {
    double dt = 0.05;  // s per simulation tick
    ExpertConfig expert;
    VehicleParams vehicle;
    InfractionConfig infractions;
    PenaltyConfig penalties;
    FusionConfig fusion;
};

// JSON object with optional sections "dt", "expert", "vehicle",
// "infractions", "penalties" and "fusion". Section fields use the C++ field
// names; "penalties" maps infraction kind names to coefficients in [0, 1]
// (null removes a kind). Unknown sections or keys raise ConfigError so typos
// cannot silently fall back to defaults.
RunConfig run_config_from_json(const nlohmann::json& j);

// Reads and applies a JSON config file. Throws ConfigError on unreadable
// files, malformed JSON, unknown keys or out-of-range values.
RunConfig load_run_config(const std::string& path);

}  // namespace odx
