#include "odx/expert_policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "odx/log.hpp"

namespace odx {

namespace {

constexpr double kTinySquared = 1e-12;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

VelocityProjection project_velocity(const Vec2& dp, const Vec2& dv) {
    const double pp = dp.dot(dp);
    if (pp <= kTinySquared) {
        throw std::domain_error("project_velocity: zero relative position");
    }
    const double pv = dp.dot(dv);
    VelocityProjection out;
    out.along = dp * (pv / pp);
    const double vv = dv.dot(dv);
    out.residual = vv <= kTinySquared ? dp : dp - dv * (pv / vv);
    return out;
}

TtcResult time_to_collision(const Vec2& dp, const Vec2& dv, double reach_distance) {
    const VelocityProjection proj = project_velocity(dp, dv);
    TtcResult out;
    out.closing_speed = -dp.dot(dv) / dp.norm();
    out.ttc = out.closing_speed > 0.0 ? dp.norm() / out.closing_speed
                                      : std::numeric_limits<double>::infinity();
    out.reachable = proj.residual.norm() <= reach_distance;
    return out;
}

bool bearing_check(const AgentState& ego, const Vec2& dp, double d) {
    const double range = dp.norm();
    if (range <= d) return true;
    const double cos_theta = clamp(ego.forward().dot(dp) / range, -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    return theta <= std::asin(clamp(d / range, 0.0, 1.0));
}

Clearance lane_change_clearance(const AgentState& ego,
                                const std::vector<AgentState>& others,
                                const LaneRef& target_lane,
                                double distance_threshold) {
    const bool same_road = target_lane.road_id == ego.lane.road_id;
    const int diff = std::abs(target_lane.lane_id - ego.lane.lane_id);
    // Ids skip 0, so -1 and +1 are neighbours across the reference line.
    const bool adjacent =
        same_road && (diff == 1 || (std::abs(target_lane.lane_id) == 1 &&
                                    target_lane.lane_id == -ego.lane.lane_id));
    if (!adjacent) {
        throw std::invalid_argument(
            "lane_change_clearance: target lane " + std::to_string(target_lane.lane_id) +
            " is not adjacent to lane " + std::to_string(ego.lane.lane_id) + " on road " +
            std::to_string(ego.lane.road_id));
    }
    for (const AgentState& other : others) {
        if (other.id == ego.id) continue;
        if (other.lane.road_id != target_lane.road_id ||
            other.lane.lane_id != target_lane.lane_id) {
            continue;
        }
        if ((other.position - ego.position).norm() < distance_threshold) {
            return Clearance::kWait;
        }
    }
    return Clearance::kClear;
}

const char* hazard_kind_name(HazardKind kind) {
    switch (kind) {
        case HazardKind::kNone: return "none";
        case HazardKind::kTtcFront: return "ttc_front";
        case HazardKind::kBlockedBearing: return "blocked_bearing";
        case HazardKind::kLaneChangeConflict: return "lane_change_conflict";
    }
    return "unknown";
}

PidController::PidController(double kp, double ki, double kd)
    : kp_(kp), ki_(ki), kd_(kd) {}

double PidController::step(double error, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("PidController: dt must be positive");
    integral_ = clamp(integral_ + error * dt, -10.0, 10.0);
    const double derivative = has_prev_ ? (error - prev_error_) / dt : 0.0;
    prev_error_ = error;
    has_prev_ = true;
    return kp_ * error + ki_ * integral_ + kd_ * derivative;
}

void PidController::reset() {
    integral_ = 0.0;
    prev_error_ = 0.0;
    has_prev_ = false;
}

std::size_t nearest_route_index(const std::vector<RoutePoint>& route,
                                const Vec2& position) {
    if (route.empty()) throw std::invalid_argument("nearest_route_index: empty route");
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < route.size(); ++i) {
        const double d2 = (route[i].position - position).squared_norm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

ExpertPolicy::ExpertPolicy(ExpertConfig config, bool baseline_only)
    : config_(config),
      baseline_only_(baseline_only),
      lateral_(config.lateral_kp, config.lateral_ki, config.lateral_kd),
      longitudinal_(config.longitudinal_kp, config.longitudinal_ki,
                    config.longitudinal_kd) {}

void ExpertPolicy::reset() {
    lateral_.reset();
    longitudinal_.reset();
    hold_until_ = -1.0;
}

HazardVerdict ExpertPolicy::assess_hazards(const WorldSnapshot& world,
                                           const std::vector<RoutePoint>& route,
                                           std::size_t nearest_index) {
    const AgentState& ego = world.ego();
    const double lane_width = route[nearest_index].lane_width;
    HazardVerdict verdict;

    if (!baseline_only_) {
        // A commanded lane change shows up as upcoming route points on a
        // different lane of the current road.
        std::optional<LaneRef> target;
        double travelled = 0.0;
        for (std::size_t i = nearest_index + 1; i < route.size(); ++i) {
            travelled += (route[i].position - route[i - 1].position).norm();
            if (travelled > config_.lookahead) break;
            if (route[i].lane.road_id != ego.lane.road_id) break;
            if (route[i].lane.lane_id != ego.lane.lane_id) {
                target = route[i].lane;
                break;
            }
        }
        if (target &&
            lane_change_clearance(ego, world.agents, *target,
                                  config_.lane_change_distance) == Clearance::kWait) {
            hold_until_ = world.time + config_.hold_duration;
            verdict.kind = HazardKind::kLaneChangeConflict;
            double best = std::numeric_limits<double>::infinity();
            for (const AgentState& other : world.agents) {
                if (other.id == ego.id || !other.lane.same_lane(*target)) continue;
                const double d = (other.position - ego.position).norm();
                if (d < best) {
                    best = d;
                    verdict.offender_id = other.id;
                }
            }
            return verdict;
        }
        if (world.time < hold_until_) {
            verdict.kind = HazardKind::kLaneChangeConflict;
            return verdict;
        }

        HazardVerdict worst;
        worst.ttc = std::numeric_limits<double>::infinity();
        for (const AgentState& other : world.agents) {
            if (other.id == ego.id) continue;
            const Vec2 dp = other.position - ego.position;
            if (dp.squared_norm() <= kTinySquared) continue;
            const Vec2 dv = other.velocity - ego.velocity;
            const TtcResult ttc = time_to_collision(dp, dv, lane_width);
            if (ttc.ttc < config_.ttc_threshold && ttc.reachable &&
                bearing_check(ego, dp, lane_width) && ttc.ttc < worst.ttc) {
                worst.kind = HazardKind::kTtcFront;
                worst.ttc = ttc.ttc;
                worst.offender_id = other.id;
            }
        }
        if (worst.kind == HazardKind::kTtcFront) return worst;
    }

    double best_range = std::numeric_limits<double>::infinity();
    for (const AgentState& other : world.agents) {
        if (other.id == ego.id) continue;
        const Vec2 dp = other.position - ego.position;
        const double range = dp.norm();
        if (range >= config_.stop_distance || range >= best_range) continue;
        // The full policy uses the bearing cone; the baseline settles for the
        // forward half-plane, so it reacts to things it could never hit but
        // still misses crossing and merging traffic until rule zero distance.
        const bool in_front = baseline_only_ ? ego.forward().dot(dp) > 0.0
                                             : bearing_check(ego, dp, lane_width);
        if (in_front) {
            best_range = range;
            verdict.kind = HazardKind::kBlockedBearing;
            verdict.offender_id = other.id;
        }
    }
    return verdict;
}

PolicyDecision ExpertPolicy::step(const WorldSnapshot& world,
                                  const std::vector<RoutePoint>& route, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("ExpertPolicy: dt must be positive");
    PolicyDecision out;
    if (route.empty()) {
        out.command = {0.0, 0.0, 0.5};
        return out;
    }
    const AgentState& ego = world.ego();
    const std::size_t nearest = nearest_route_index(route, ego.position);
    const Pose2 ego_pose{ego.position, ego.heading};
    for (std::size_t i = nearest + 1; i < route.size() && out.waypoints.size() < 4; ++i) {
        out.waypoints.push_back(ego_pose.world_to_local(route[i].position));
    }
    if (out.waypoints.empty()) {
        // Route exhausted: roll to a stop at the goal.
        lateral_.reset();
        longitudinal_.reset();
        out.command = {0.0, 0.0, 0.5};
        return out;
    }

    out.hazard = assess_hazards(world, route, nearest);
    if (out.hazard.kind != HazardKind::kNone) {
        lateral_.reset();
        longitudinal_.reset();
        out.command = {0.0, 0.0, 1.0};
        return out;
    }

    Vec2 aim = out.waypoints[0];
    if (out.waypoints.size() >= 2) aim = (out.waypoints[0] + out.waypoints[1]) * 0.5;
    const double theta = std::atan2(aim.y, aim.x);
    out.command.steer = clamp(-lateral_.step(theta, dt), -1.0, 1.0);

    double spacing = 0.0;
    std::size_t spans = 0;
    for (std::size_t i = nearest + 1; i < route.size() && spans < 4; ++i, ++spans) {
        spacing += (route[i].position - route[i - 1].position).norm();
    }
    spacing /= static_cast<double>(spans);
    const double v_des = config_.waypoint_rate_hz * spacing;
    const double accel = longitudinal_.step(v_des - ego.speed, dt);
    if (accel >= 0.0) {
        out.command.throttle = clamp(accel, 0.0, 1.0);
    } else {
        out.command.brake = clamp(-accel, 0.0, 1.0);
    }
    return out;
}

}  // namespace odx
