#include "odx/sim_harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "odx/log.hpp"
#include "odx/opendrive_parser.hpp"

namespace odx {

namespace {

using json = nlohmann::ordered_json;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void check_dt(double dt) {
    if (!(dt > 0.0) || dt > 0.1 + 1e-12) {
        throw std::invalid_argument("dt must lie in (0, 0.1] seconds, got " +
                                    std::to_string(dt));
    }
}

std::array<Vec2, 4> box_corners(const AgentState& a) {
    const Vec2 f = a.forward() * a.half_length;
    const Vec2 l = Vec2{-std::sin(a.heading), std::cos(a.heading)} * a.half_width;
    return {a.position + f + l, a.position + f - l, a.position - f + l,
            a.position - f - l};
}

// Interval of box corner projections onto a unit axis.
std::pair<double, double> project_box(const std::array<Vec2, 4>& corners,
                                      const Vec2& axis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Vec2& c : corners) {
        const double p = c.dot(axis);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    return {lo, hi};
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 <= 0.0) return (p - a).norm();
    const double t = clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

}  // namespace

AgentState step_dynamics(const AgentState& state, const ControlCommand& command,
                         double dt, const VehicleParams& params) {
    check_dt(dt);
    const double throttle = clamp(command.throttle, 0.0, 1.0);
    const double brake = clamp(command.brake, 0.0, 1.0);
    const double steer = clamp(command.steer, -1.0, 1.0);

    AgentState next = state;
    const double accel =
        throttle * params.accel_max - brake * params.brake_max - params.drag * state.speed;
    next.speed = clamp(state.speed + accel * dt, 0.0, params.speed_max);
    // Positive steer turns right, which in a counterclockwise-positive world
    // means the heading decreases.
    const double yaw_rate =
        (next.speed / params.wheelbase) * std::tan(steer * params.steer_max);
    next.heading = normalize_angle(state.heading - yaw_rate * dt);
    next.velocity = next.forward() * next.speed;
    next.position = state.position + next.velocity * dt;
    next.half_length = params.half_length;
    next.half_width = params.half_width;
    return next;
}

bool boxes_overlap(const AgentState& a, const AgentState& b) {
    const auto ca = box_corners(a);
    const auto cb = box_corners(b);
    const std::array<Vec2, 4> axes = {
        a.forward(), Vec2{-std::sin(a.heading), std::cos(a.heading)},
        b.forward(), Vec2{-std::sin(b.heading), std::cos(b.heading)}};
    for (const Vec2& axis : axes) {
        const auto [alo, ahi] = project_box(ca, axis);
        const auto [blo, bhi] = project_box(cb, axis);
        if (ahi < blo || bhi < alo) return false;
    }
    return true;
}

double distance_to_polyline(const Vec2& point, const std::vector<Vec2>& polyline) {
    if (polyline.empty()) {
        throw std::invalid_argument("distance_to_polyline: empty polyline");
    }
    if (polyline.size() == 1) return (point - polyline[0]).norm();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        best = std::min(best, point_segment_distance(point, polyline[i], polyline[i + 1]));
    }
    return best;
}

const char* infraction_kind_name(InfractionKind kind) {
    switch (kind) {
        case InfractionKind::kCollisionVehicle: return "collision_vehicle";
        case InfractionKind::kCollisionStatic: return "collision_static";
        case InfractionKind::kRouteDeviation: return "route_deviation";
        case InfractionKind::kBlocked: return "blocked";
    }
    return "unknown";
}

InfractionKind infraction_kind_from_name(const std::string& name) {
    if (name == "collision_vehicle") return InfractionKind::kCollisionVehicle;
    if (name == "collision_static") return InfractionKind::kCollisionStatic;
    if (name == "route_deviation") return InfractionKind::kRouteDeviation;
    if (name == "blocked") return InfractionKind::kBlocked;
    throw std::invalid_argument("unknown infraction kind: " + name);
}

const char* policy_kind_name(PolicyKind kind) {
    return kind == PolicyKind::kFull ? "full" : "baseline";
}

InfractionMonitor::InfractionMonitor(std::vector<Vec2> route_polyline,
                                     std::set<int> static_ids, InfractionConfig config)
    : route_(std::move(route_polyline)),
      static_ids_(std::move(static_ids)),
      config_(config) {}

std::vector<InfractionEvent> InfractionMonitor::update(const WorldSnapshot& snapshot) {
    std::vector<InfractionEvent> events;
    const AgentState& ego = snapshot.ego();

    for (const AgentState& other : snapshot.agents) {
        if (other.id == ego.id) continue;
        if (boxes_overlap(ego, other)) {
            if (touching_.insert(other.id).second) {
                InfractionEvent e;
                e.time = snapshot.time;
                e.kind = static_ids_.count(other.id) ? InfractionKind::kCollisionStatic
                                                     : InfractionKind::kCollisionVehicle;
                e.agent_ids = {ego.id, other.id};
                e.note = "contact with agent " + std::to_string(other.id);
                events.push_back(std::move(e));
            }
        } else {
            touching_.erase(other.id);
        }
    }

    if (!route_.empty()) {
        const double off = distance_to_polyline(ego.position, route_);
        if (off > config_.deviation_limit) {
            if (!deviating_) {
                deviating_ = true;
                InfractionEvent e;
                e.time = snapshot.time;
                e.kind = InfractionKind::kRouteDeviation;
                e.agent_ids = {ego.id};
                std::ostringstream note;
                note << off << " m off the route";
                e.note = note.str();
                events.push_back(std::move(e));
            }
        } else {
            deviating_ = false;
        }
    }

    if (ego.speed < config_.blocked_speed) {
        if (blocked_since_ < 0.0) blocked_since_ = snapshot.time;
        if (!blocked_reported_ &&
            snapshot.time - blocked_since_ > config_.blocked_duration) {
            blocked_reported_ = true;
            InfractionEvent e;
            e.time = snapshot.time;
            e.kind = InfractionKind::kBlocked;
            e.agent_ids = {ego.id};
            e.note = "stationary since t=" + std::to_string(blocked_since_);
            events.push_back(std::move(e));
        }
    } else {
        blocked_since_ = -1.0;
        blocked_reported_ = false;
    }
    return events;
}

std::vector<RoutePoint> build_route(const RoadNetwork& network,
                                    const std::vector<RouteLeg>& legs, double spacing) {
    if (!(spacing > 0.0)) throw ScenarioError("route spacing must be positive");
    if (legs.empty()) throw ScenarioError("route has no legs");
    std::vector<RoutePoint> route;
    for (const RouteLeg& leg : legs) {
        const Road* road = network.find_road(leg.road_id);
        if (road == nullptr) {
            throw ScenarioError("route leg references unknown road " +
                                std::to_string(leg.road_id));
        }
        const double lo = 0.0, hi = road->length;
        const double s0 = clamp(leg.s_begin, lo, hi);
        const double s1 = clamp(leg.s_end, lo, hi);
        const double dir = s1 >= s0 ? 1.0 : -1.0;
        const double span = std::abs(s1 - s0);
        const std::size_t n = static_cast<std::size_t>(std::floor(span / spacing + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = s0 + dir * spacing * static_cast<double>(i);
            route.push_back({});
            RoutePoint& p = route.back();
            try {
                const LanePoint lp =
                    eval_lane_center(*road, road->section_index_at(s), leg.lane_id, s);
                p.position = lp.position;
                p.heading = dir > 0.0 ? lp.heading : normalize_angle(lp.heading + M_PI);
                p.lane_width = lp.lane_width;
            } catch (const std::exception& e) {
                throw ScenarioError("route leg on road " + std::to_string(leg.road_id) +
                                    ": " + e.what());
            }
            p.lane = {leg.road_id, leg.lane_id, s};
        }
        // Close the leg exactly at s_end when the stride missed it.
        const double tail = s0 + dir * spacing * static_cast<double>(n - 1);
        if (std::abs(tail - s1) > 1e-6) {
            RoutePoint p;
            const LanePoint lp =
                eval_lane_center(*road, road->section_index_at(s1), leg.lane_id, s1);
            p.position = lp.position;
            p.heading = dir > 0.0 ? lp.heading : normalize_angle(lp.heading + M_PI);
            p.lane_width = lp.lane_width;
            p.lane = {leg.road_id, leg.lane_id, s1};
            route.push_back(p);
        }
    }
    return route;
}

namespace {

AgentState spawn_agent(int id, const RoadNetwork& network, const LaneRef& lane,
                       double speed, const VehicleParams& vehicle) {
    const Road* road = network.find_road(lane.road_id);
    if (road == nullptr) {
        throw ScenarioError("spawn references unknown road " + std::to_string(lane.road_id));
    }
    LanePoint lp;
    try {
        lp = eval_lane_center(*road, road->section_index_at(lane.s), lane.lane_id, lane.s);
    } catch (const std::exception& e) {
        throw ScenarioError("spawn on road " + std::to_string(lane.road_id) + ": " +
                            std::string(e.what()));
    }
    AgentState a;
    a.id = id;
    a.position = lp.position;
    a.heading = lp.heading;
    a.speed = speed;
    a.velocity = a.forward() * speed;
    a.lane = lane;
    a.half_length = vehicle.half_length;
    a.half_width = vehicle.half_width;
    return a;
}

// Script-side state of one background agent; `speed` is its along-lane speed
// which can differ from the world-frame |velocity| during a cut-in blend.
struct RailState {
    AgentBehavior behavior;
    int source_lane_id = 0;
    double s = 0.0;
    double speed = 0.0;
};

double scripted_target_speed(const RailState& rail, double t) {
    switch (rail.behavior.kind) {
        case BehaviorKind::kParked:
            return 0.0;
        case BehaviorKind::kHardBrake:
            if (t >= rail.behavior.trigger_time &&
                (rail.behavior.resume_time < 0.0 || t < rail.behavior.resume_time)) {
                return 0.0;
            }
            return rail.behavior.cruise_speed;
        case BehaviorKind::kCruise:
        case BehaviorKind::kCutIn:
            return rail.behavior.cruise_speed;
    }
    return 0.0;
}

}  // namespace

SimResult run_scenario(const Scenario& scenario, const RoadNetwork& network,
                       PolicyKind policy_kind, const ExpertConfig& expert_config,
                       double dt, const VehicleParams& vehicle,
                       const InfractionConfig& infractions) {
    check_dt(dt);
    if (!(scenario.duration > 0.0)) throw ScenarioError("duration must be positive");

    SimResult result;
    result.scenario_name = scenario.name;
    result.policy_name = policy_kind_name(policy_kind);
    result.route = build_route(network, scenario.route, scenario.route_spacing);

    std::vector<Vec2> polyline;
    polyline.reserve(result.route.size());
    for (const RoutePoint& p : result.route) polyline.push_back(p.position);
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        result.route_length += (polyline[i] - polyline[i - 1]).norm();
    }

    std::set<int> static_ids;
    std::vector<RailState> rails;
    WorldSnapshot snap;
    snap.time = 0.0;
    snap.ego_id = 0;
    snap.agents.push_back(spawn_agent(0, network, scenario.ego_spawn, scenario.ego_speed, vehicle));
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const AgentSpawn& spawn = scenario.agents[i];
        const int id = static_cast<int>(i) + 1;
        const double speed = spawn.behavior.kind == BehaviorKind::kParked ? 0.0 : spawn.speed;
        snap.agents.push_back(spawn_agent(id, network, spawn.lane, speed, vehicle));
        if (spawn.behavior.kind == BehaviorKind::kParked) static_ids.insert(id);
        RailState rail;
        rail.behavior = spawn.behavior;
        rail.source_lane_id = spawn.lane.lane_id;
        rail.s = spawn.lane.s;
        rail.speed = speed;
        rails.push_back(rail);
    }

    ExpertPolicy policy(expert_config, policy_kind == PolicyKind::kBaseline);
    InfractionMonitor monitor(polyline, static_ids, infractions);

    result.trace.push_back(snap);
    auto absorb = [&result](std::vector<InfractionEvent> events) {
        for (auto& e : events) result.events.push_back(std::move(e));
    };
    absorb(monitor.update(snap));

    const auto steps =
        static_cast<std::size_t>(std::ceil(scenario.duration / dt - 1e-9));
    const double goal_radius = 2.0;

    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const WorldSnapshot& prev = result.trace.back();

        PolicyDecision decision;
        try {
            decision = policy.step(prev, result.route, dt);
        } catch (const std::exception& e) {
            result.aborted = true;
            result.abort_reason = std::string("policy fault at t=") +
                                  std::to_string(prev.time) + ": " + e.what();
            log_warn("run_scenario: " + result.abort_reason);
            break;
        }

        WorldSnapshot next;
        next.time = t;
        next.ego_id = 0;
        next.agents.reserve(prev.agents.size());

        AgentState ego = step_dynamics(prev.ego(), decision.command, dt, vehicle);
        const std::size_t nearest = nearest_route_index(result.route, ego.position);
        ego.lane = result.route[nearest].lane;
        result.ego_distance += (ego.position - prev.ego().position).norm();
        next.agents.push_back(ego);

        for (std::size_t i = 0; i < rails.size(); ++i) {
            RailState& rail = rails[i];
            const AgentState& before = prev.agents[i + 1];
            const Road* road = network.find_road(scenario.agents[i].lane.road_id);

            double target = scripted_target_speed(rail, t);
            if (rail.behavior.keep_distance) {
                for (const AgentState& front : prev.agents) {
                    if (front.id == before.id) continue;
                    if (front.lane.road_id != before.lane.road_id ||
                        front.lane.lane_id != before.lane.lane_id) {
                        continue;
                    }
                    const double gap = front.lane.s - rail.s;
                    if (gap > 0.0 && gap < rail.behavior.keep_gap) {
                        target = std::min(target, front.speed);
                    }
                }
            }
            const double dv = clamp(target - rail.speed, -vehicle.brake_max * dt,
                                    vehicle.accel_max * dt);
            rail.speed += dv;
            rail.s += rail.speed * dt;
            if (rail.s > road->length) {
                if (rail.behavior.loop) {
                    rail.s = std::fmod(rail.s, road->length);
                } else {
                    rail.s = road->length;
                    rail.speed = 0.0;
                }
            }

            AgentState agent = before;
            const std::size_t section = road->section_index_at(rail.s);
            int lane_id = rail.source_lane_id;
            if (rail.behavior.kind == BehaviorKind::kCutIn &&
                t >= rail.behavior.trigger_time) {
                const double alpha =
                    clamp((t - rail.behavior.trigger_time) / rail.behavior.blend_duration,
                          0.0, 1.0);
                const LanePoint from =
                    eval_lane_center(*road, section, rail.source_lane_id, rail.s);
                const LanePoint to =
                    eval_lane_center(*road, section, rail.behavior.target_lane_id, rail.s);
                agent.position = from.position + (to.position - from.position) * alpha;
                agent.heading = from.heading;
                lane_id = alpha >= 0.5 ? rail.behavior.target_lane_id : rail.source_lane_id;
            } else {
                const LanePoint lp = eval_lane_center(*road, section, lane_id, rail.s);
                agent.position = lp.position;
                agent.heading = lp.heading;
            }
            agent.velocity = (agent.position - before.position) / dt;
            agent.speed = agent.velocity.norm();
            agent.lane = {before.lane.road_id, lane_id, rail.s};
            next.agents.push_back(agent);
        }

        result.trace.push_back(next);
        absorb(monitor.update(result.trace.back()));

        if (nearest + 1 == result.route.size() &&
            (ego.position - result.route.back().position).norm() < goal_radius) {
            result.goal_reached = true;
            break;
        }
    }
    return result;
}

SimResult run_scenario_file(const std::string& path, PolicyKind policy_kind,
                            const ExpertConfig& expert_config, double dt) {
    const Scenario scenario = load_scenario(path);
    const ParseResult parsed = parse_opendrive_file(scenario.map_path);
    if (!parsed.ok()) {
        throw ScenarioError("map " + scenario.map_path + " failed to parse cleanly");
    }
    return run_scenario(scenario, parsed.network, policy_kind, expert_config, dt);
}

std::vector<RadarPoint> synth_radar_returns(const WorldSnapshot& snapshot) {
    std::vector<RadarPoint> returns;
    const AgentState& ego = snapshot.ego();
    const Pose2 ego_pose{ego.position, ego.heading};
    for (const AgentState& other : snapshot.agents) {
        if (other.id == ego.id) continue;
        const Vec2 local = ego_pose.world_to_local(other.position);
        const double range = local.norm();
        if (range < 1e-6 || range > kRadarMaxDepth) continue;
        const Vec2 dp = other.position - ego.position;
        const Vec2 dv = other.velocity - ego.velocity;
        const double closing = -dp.dot(dv) / range;
        // The mount sits 1 m up pitched slightly upward, so ground-level hulls
        // always appear a little below the boresight.
        const double elevation = std::atan2(-kRadarHeightM, range) - kRadarPitchRad;

        const double front_az = std::atan2(local.y, local.x);
        if (std::abs(front_az) <= kRadarHalfFov) {
            returns.push_back({closing, range, front_az, elevation, 0});
            continue;
        }
        const double rear_az = std::atan2(-local.y, -local.x);
        if (std::abs(rear_az) <= kRadarHalfFov) {
            returns.push_back({closing, range, rear_az, elevation, 1});
        }
    }
    return returns;
}

namespace {

json agent_to_json(const AgentState& a) {
    json j;
    j["id"] = a.id;
    j["x"] = a.position.x;
    j["y"] = a.position.y;
    j["heading"] = a.heading;
    j["speed"] = a.speed;
    j["vx"] = a.velocity.x;
    j["vy"] = a.velocity.y;
    j["road"] = a.lane.road_id;
    j["lane"] = a.lane.lane_id;
    j["s"] = a.lane.s;
    j["half_length"] = a.half_length;
    j["half_width"] = a.half_width;
    return j;
}

AgentState agent_from_json(const json& j) {
    AgentState a;
    a.id = j.at("id").get<int>();
    a.position = {j.at("x").get<double>(), j.at("y").get<double>()};
    a.heading = j.at("heading").get<double>();
    a.speed = j.at("speed").get<double>();
    a.velocity = {j.at("vx").get<double>(), j.at("vy").get<double>()};
    a.lane = {j.at("road").get<int>(), j.at("lane").get<int>(), j.at("s").get<double>()};
    a.half_length = j.at("half_length").get<double>();
    a.half_width = j.at("half_width").get<double>();
    return a;
}

}  // namespace

void write_trace_jsonl(const std::vector<WorldSnapshot>& trace, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ScenarioError("cannot open " + path + " for writing");
    for (const WorldSnapshot& snap : trace) {
        json j;
        j["t"] = snap.time;
        j["ego"] = snap.ego_id;
        j["agents"] = json::array();
        for (const AgentState& a : snap.agents) j["agents"].push_back(agent_to_json(a));
        out << j.dump() << '\n';
    }
    if (!out) throw ScenarioError("short write to " + path);
}

std::vector<WorldSnapshot> read_trace_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open " + path);
    std::vector<WorldSnapshot> trace;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            WorldSnapshot snap;
            snap.time = j.at("t").get<double>();
            snap.ego_id = j.at("ego").get<int>();
            for (const json& a : j.at("agents")) snap.agents.push_back(agent_from_json(a));
            trace.push_back(std::move(snap));
        } catch (const json::exception& e) {
            throw ScenarioError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return trace;
}

void write_events_json(const std::vector<InfractionEvent>& events, const std::string& path) {
    json arr = json::array();
    for (const InfractionEvent& e : events) {
        json j;
        j["t"] = e.time;
        j["kind"] = infraction_kind_name(e.kind);
        j["agents"] = e.agent_ids;
        j["note"] = e.note;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ScenarioError("cannot open " + path + " for writing");
    out << arr.dump(2) << '\n';
    if (!out) throw ScenarioError("short write to " + path);
}

std::vector<InfractionEvent> read_events_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open " + path);
    std::vector<InfractionEvent> events;
    try {
        const json arr = json::parse(in);
        for (const json& j : arr) {
            InfractionEvent e;
            e.time = j.at("t").get<double>();
            e.kind = infraction_kind_from_name(j.at("kind").get<std::string>());
            e.agent_ids = j.at("agents").get<std::vector<int>>();
            e.note = j.value("note", std::string{});
            events.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return events;
}

void write_run_meta(const SimResult& result, const std::string& path) {
    json j;
    j["scenario"] = result.scenario_name;
    j["policy"] = result.policy_name;
    j["goal_reached"] = result.goal_reached;
    j["aborted"] = result.aborted;
    j["abort_reason"] = result.abort_reason;
    j["route_length_m"] = result.route_length;
    j["ego_distance_m"] = result.ego_distance;
    j["route"] = json::array();
    for (const RoutePoint& p : result.route) {
        j["route"].push_back(json::array({p.position.x, p.position.y}));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ScenarioError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw ScenarioError("short write to " + path);
}

RunMeta read_run_meta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open " + path);
    RunMeta meta;
    try {
        const json j = json::parse(in);
        meta.scenario_name = j.at("scenario").get<std::string>();
        meta.policy_name = j.at("policy").get<std::string>();
        meta.goal_reached = j.at("goal_reached").get<bool>();
        meta.aborted = j.at("aborted").get<bool>();
        meta.abort_reason = j.value("abort_reason", std::string{});
        meta.route_length = j.at("route_length_m").get<double>();
        meta.ego_distance = j.at("ego_distance_m").get<double>();
        for (const json& p : j.at("route")) {
            meta.route_polyline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
    } catch (const json::exception& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return meta;
}

namespace {

BehaviorKind behavior_kind_from_name(const std::string& name) {
    if (name == "cruise") return BehaviorKind::kCruise;
    if (name == "parked") return BehaviorKind::kParked;
    if (name == "hard_brake") return BehaviorKind::kHardBrake;
    if (name == "cut_in") return BehaviorKind::kCutIn;
    throw ScenarioError("unknown behavior kind: " + name);
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir) {
    Scenario sc;
    try {
        const json j = json::parse(json_text);
        sc.name = j.at("name").get<std::string>();
        sc.map_path = j.at("map").get<std::string>();
        sc.duration = j.value("duration_s", 30.0);
        sc.seed = j.value("seed", std::uint64_t{0});
        sc.route_spacing = j.value("route_spacing_m", 5.0);

        const json& ego = j.at("ego");
        sc.ego_spawn = {ego.at("road").get<int>(), ego.at("lane").get<int>(),
                        ego.at("s").get<double>()};
        sc.ego_speed = ego.value("speed", 0.0);

        for (const json& leg : j.at("route")) {
            sc.route.push_back({leg.at("road").get<int>(), leg.at("lane").get<int>(),
                                leg.at("s_begin").get<double>(),
                                leg.at("s_end").get<double>()});
        }

        for (const json& a : j.value("agents", json::array())) {
            AgentSpawn spawn;
            spawn.lane = {a.at("road").get<int>(), a.at("lane").get<int>(),
                          a.at("s").get<double>()};
            spawn.speed = a.value("speed", 0.0);
            spawn.behavior.cruise_speed = spawn.speed;
            if (a.contains("behavior")) {
                const json& b = a.at("behavior");
                spawn.behavior.kind = behavior_kind_from_name(b.value("kind", "cruise"));
                spawn.behavior.cruise_speed = b.value("cruise_speed", spawn.speed);
                spawn.behavior.trigger_time = b.value("trigger_time_s", 0.0);
                spawn.behavior.resume_time = b.value("resume_time_s", -1.0);
                spawn.behavior.target_lane_id = b.value("target_lane", 0);
                spawn.behavior.blend_duration = b.value("blend_s", 1.5);
            }
            spawn.behavior.keep_distance = a.value("keep_distance", false);
            spawn.behavior.keep_gap = a.value("keep_gap_m", 10.0);
            spawn.behavior.loop = a.value("loop", false);
            sc.agents.push_back(std::move(spawn));
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario JSON: ") + e.what());
    }
    if (!(sc.duration > 0.0)) throw ScenarioError("duration_s must be positive");

    namespace fs = std::filesystem;
    if (!sc.map_path.empty() && fs::path(sc.map_path).is_relative() && !base_dir.empty()) {
        sc.map_path = (fs::path(base_dir) / sc.map_path).string();
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace odx
