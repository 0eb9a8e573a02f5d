#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "odx/agent.hpp"
#include "odx/expert_policy.hpp"
#include "odx/map_model.hpp"
#include "odx/sensor_pipeline.hpp"

namespace odx {

struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct VehicleParams {
    double wheelbase = 2.9;                    // m
    double half_length = 2.45;                 // bounding box half extents, m
    double half_width = 1.06;
    double accel_max = 3.0;                    // m/s^2 at full throttle
    double brake_max = 8.0;                    // m/s^2 at full brake
    double steer_max = 35.0 * M_PI / 180.0;    // wheel angle at |steer| = 1
    double drag = 0.1;                         // speed-proportional decay, 1/s
    double speed_max = 20.0;                   // m/s
};

// Kinematic bicycle step. Speed integrates throttle/brake/drag and clamps to
// [0, speed_max]; the position then advances at the new speed along the new
// heading, so a single step never moves farther than speed_max * dt.
// dt must lie in (0, 0.1].
AgentState step_dynamics(const AgentState& state, const ControlCommand& command,
                         double dt, const VehicleParams& params = {});

enum class BehaviorKind { kCruise, kParked, kHardBrake, kCutIn };

struct AgentBehavior {
    BehaviorKind kind = BehaviorKind::kCruise;
    // Speeds here are measured along the road reference line; on a curved
    // road an outer lane's ground speed scales up by the radius ratio.
    double cruise_speed = 0.0;    // m/s target when unconstrained
    double trigger_time = 0.0;    // s, when hard_brake / cut_in begins
    double resume_time = -1.0;    // s, hard_brake only; < 0 means never
    int target_lane_id = 0;       // cut_in destination lane
    double blend_duration = 1.5;  // s of lateral blend during a cut-in
    bool keep_distance = false;   // match the speed of traffic ahead
    double keep_gap = 10.0;       // m, range of the keep_distance rule
    bool loop = false;            // wrap s at the road end (ring roads)
};

struct AgentSpawn {
    LaneRef lane;
    double speed = 0.0;
    AgentBehavior behavior;
};

// A contiguous stretch of one lane; route legs chain into the ego route.
struct RouteLeg {
    int road_id = 0;
    int lane_id = 0;
    double s_begin = 0.0;
    double s_end = 0.0;
};

struct Scenario {
    std::string name;
    std::string map_path;     // resolved against the scenario file location
    double duration = 30.0;   // s
    std::uint64_t seed = 0;
    double route_spacing = 5.0;  // m between route samples
    LaneRef ego_spawn;
    double ego_speed = 0.0;
    std::vector<RouteLeg> route;
    std::vector<AgentSpawn> agents;
};

// Reads a scenario description from JSON. Throws ScenarioError on missing or
// malformed fields; relative map paths resolve against the scenario file.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir);

enum class InfractionKind { kCollisionVehicle, kCollisionStatic, kRouteDeviation, kBlocked };

const char* infraction_kind_name(InfractionKind kind);
InfractionKind infraction_kind_from_name(const std::string& name);

struct InfractionEvent {
    double time = 0.0;
    InfractionKind kind = InfractionKind::kCollisionVehicle;
    std::vector<int> agent_ids;  // participants, ego first where relevant
    std::string note;
};

// Oriented bounding-box overlap via separating axes; touching counts.
bool boxes_overlap(const AgentState& a, const AgentState& b);

// Shortest distance from a point to a polyline.
double distance_to_polyline(const Vec2& point, const std::vector<Vec2>& polyline);

struct InfractionConfig {
    double deviation_limit = 3.5;   // m off the route before it counts
    double blocked_speed = 0.1;     // m/s regarded as standing still
    double blocked_duration = 30.0; // s standing still before blocked fires
};

// Watches a rollout and emits events on onset: a collision pair reports once
// per contact episode, a deviation once per excursion, blocked once per stop.
// Only pairs involving the ego are checked; collisions against agents listed
// in static_ids classify as collisions with the static layout.
class InfractionMonitor {
   public:
    InfractionMonitor(std::vector<Vec2> route_polyline, std::set<int> static_ids = {},
                      InfractionConfig config = {});

    std::vector<InfractionEvent> update(const WorldSnapshot& snapshot);

   private:
    std::vector<Vec2> route_;
    std::set<int> static_ids_;
    InfractionConfig config_;
    std::set<int> touching_;       // other-agent ids currently in contact
    bool deviating_ = false;
    double blocked_since_ = -1.0;
    bool blocked_reported_ = false;
};

enum class PolicyKind { kFull, kBaseline };

const char* policy_kind_name(PolicyKind kind);

struct SimResult {
    std::string scenario_name;
    std::string policy_name;
    std::vector<WorldSnapshot> trace;    // includes the t = 0 snapshot
    std::vector<InfractionEvent> events;
    std::vector<RoutePoint> route;
    double route_length = 0.0;   // m along the route polyline
    double ego_distance = 0.0;   // m actually driven by the ego
    bool goal_reached = false;
    bool aborted = false;
    std::string abort_reason;
};

// Samples the legs through the lane graph at `spacing` meters. Throws
// ScenarioError when a leg references a road or lane that does not exist.
std::vector<RoutePoint> build_route(const RoadNetwork& network,
                                    const std::vector<RouteLeg>& legs,
                                    double spacing);

// Deterministic fixed-step rollout: background agents follow their scripts on
// lane rails, the ego runs the policy and the bicycle model, and the monitor
// collects infractions. A policy exception aborts the run and is reported in
// abort_reason rather than thrown.
SimResult run_scenario(const Scenario& scenario, const RoadNetwork& network,
                       PolicyKind policy_kind, const ExpertConfig& expert_config = {},
                       double dt = 0.05, const VehicleParams& vehicle = {},
                       const InfractionConfig& infractions = {});

// Convenience wrapper: loads the scenario file and its map, then runs.
SimResult run_scenario_file(const std::string& path, PolicyKind policy_kind,
                            const ExpertConfig& expert_config = {}, double dt = 0.05);

// Ground-truth radar returns for the ego's front (label 0) and rear (label 1)
// sensors: range, bearing within the field of view, radial closing speed and
// a small negative elevation from the 1 m mount looking at ground-level hulls.
std::vector<RadarPoint> synth_radar_returns(const WorldSnapshot& snapshot);

// Rollout persistence: one snapshot per line for traces, a single JSON array
// for events, and a run summary carrying the route polyline for scoring.
void write_trace_jsonl(const std::vector<WorldSnapshot>& trace, const std::string& path);
std::vector<WorldSnapshot> read_trace_jsonl(const std::string& path);
void write_events_json(const std::vector<InfractionEvent>& events, const std::string& path);
std::vector<InfractionEvent> read_events_json(const std::string& path);
void write_run_meta(const SimResult& result, const std::string& path);

struct RunMeta {
    std::string scenario_name;
    std::string policy_name;
    std::vector<Vec2> route_polyline;
    double route_length = 0.0;
    double ego_distance = 0.0;
    bool goal_reached = false;
    bool aborted = false;
    std::string abort_reason;
};

RunMeta read_run_meta(const std::string& path);

}  // namespace odx
