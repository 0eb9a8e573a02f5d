#pragma once

#include <optional>
#include <vector>

#include "odx/agent.hpp"
#include "odx/geometry.hpp"

namespace odx {

// Decomposition of a relative velocity against a relative position.
struct VelocityProjection {
    Vec2 along;     // component of dv projected onto the dp direction
    Vec2 residual;  // dp minus the part of dp explained by the dv direction
};

// along = dp * (dp.dv)/(dp.dp); residual = dp - dv * (dp.dv)/(dv.dv).
// |residual| measures how far the mover misses the target point if it keeps
// its current velocity. Throws std::domain_error when |dp| is ~zero; the
// residual falls back to dp itself when |dv| is ~zero (no motion, no miss
// distance to speak of).
VelocityProjection project_velocity(const Vec2& dp, const Vec2& dv);

struct TtcResult {
    double ttc = 0.0;     // seconds; +inf when not closing
    bool reachable = false;  // |residual| within the lane half... see impl
    double closing_speed = 0.0;  // m/s along the line of sight, >0 approaching
};

// Scalar time-to-collision along the line of sight. closing = -(dp.dv)/|dp|;
// ttc = |dp|/closing when closing > 0, +inf otherwise. reachable is true when
// the projection residual stays within `reach_distance`.
TtcResult time_to_collision(const Vec2& dp, const Vec2& dv, double reach_distance);

// True when the target offset dp lies inside the forward cone of the agent:
// the angle between the agent's forward axis and dp is at most
// asin(d/|dp|). Offsets closer than d are always "in front".
bool bearing_check(const AgentState& ego, const Vec2& dp, double d);

enum class Clearance { kClear, kWait };

// Gap check before moving into an adjacent lane: wait while any other agent
// occupies the target lane within `distance_threshold` meters of the ego.
// Throws std::invalid_argument when the target lane is not adjacent to the
// ego's current lane on the same road.
Clearance lane_change_clearance(const AgentState& ego,
                                const std::vector<AgentState>& others,
                                const LaneRef& target_lane,
                                double distance_threshold);

enum class HazardKind { kNone, kTtcFront, kBlockedBearing, kLaneChangeConflict };

const char* hazard_kind_name(HazardKind kind);

struct HazardVerdict {
    HazardKind kind = HazardKind::kNone;
    double ttc = 0.0;                 // seconds; set for kTtcFront
    std::optional<int> offender_id;   // agent that triggered the verdict
};

struct ControlCommand {
    double steer = 0.0;     // [-1, 1], positive steers right
    double throttle = 0.0;  // [0, 1]
    double brake = 0.0;     // [0, 1]; throttle * brake == 0 always
};

class PidController {
   public:
    PidController(double kp, double ki, double kd);

    double step(double error, double dt);
    void reset();

   private:
    double kp_, ki_, kd_;
    double integral_ = 0.0;
    double prev_error_ = 0.0;
    bool has_prev_ = false;
};

struct ExpertConfig {
    double ttc_threshold = 3.0;          // s, emergency brake below this
    double stop_distance = 6.0;          // m, proximity stop
    double lane_change_distance = 10.0;  // m, clearance gap for lane changes
    double hold_duration = 2.0;          // s, wait after a lane-change conflict
    double waypoint_rate_hz = 2.0;       // desired speed = rate * point spacing
    double lookahead = 20.0;             // m of route scanned for lane changes
    double lateral_kp = 1.25, lateral_ki = 0.75, lateral_kd = 0.3;
    double longitudinal_kp = 5.0, longitudinal_ki = 0.5, longitudinal_kd = 1.0;
};

struct PolicyDecision {
    ControlCommand command;
    HazardVerdict hazard;
    std::vector<Vec2> waypoints;  // ego-frame aim points actually tracked
};

// Rule-based driving policy. Hazard rules are checked in fixed priority
// order (lane-change conflict, then time-to-collision, then raw proximity);
// when none fires, two PID loops track the route. The baseline variant skips
// the predictive rules and brakes only on proximity inside the forward
// half-plane, which is exactly what makes it collide in the harder scenes.
class ExpertPolicy {
   public:
    explicit ExpertPolicy(ExpertConfig config = {}, bool baseline_only = false);

    PolicyDecision step(const WorldSnapshot& world,
                        const std::vector<RoutePoint>& route, double dt);
    void reset();

    bool baseline_only() const { return baseline_only_; }
    const ExpertConfig& config() const { return config_; }

   private:
    HazardVerdict assess_hazards(const WorldSnapshot& world,
                                 const std::vector<RoutePoint>& route,
                                 std::size_t nearest_index);

    ExpertConfig config_;
    bool baseline_only_;
    PidController lateral_, longitudinal_;
    double hold_until_ = -1.0;  // sim time until which a conflict hold lasts
};

// Index of the route point closest to `position`.
std::size_t nearest_route_index(const std::vector<RoutePoint>& route,
                                const Vec2& position);

}  // namespace odx
