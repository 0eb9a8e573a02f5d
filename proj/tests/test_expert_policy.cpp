#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "odx/expert_policy.hpp"
#include "test_util.hpp"

using odx::testing::make_rng;

namespace odx {
namespace {

AgentState make_agent(int id, double x, double y, double heading, double speed,
                      int road = 1, int lane = -1, double s = 0.0) {
    AgentState a;
    a.id = id;
    a.position = {x, y};
    a.heading = heading;
    a.speed = speed;
    a.velocity = Vec2{std::cos(heading), std::sin(heading)} * speed;
    a.lane = {road, lane, s};
    return a;
}

// Straight route along +x on road 1, one point every `spacing` meters.
std::vector<RoutePoint> straight_route(double length, double spacing,
                                       int lane_id = -1, double width = 3.5) {
    std::vector<RoutePoint> route;
    for (double s = 0.0; s <= length + 1e-9; s += spacing) {
        RoutePoint p;
        p.position = {s, 0.0};
        p.heading = 0.0;
        p.lane = {1, lane_id, s};
        p.lane_width = width;
        route.push_back(p);
    }
    return route;
}

WorldSnapshot make_world(double time, std::vector<AgentState> agents, int ego_id = 0) {
    WorldSnapshot w;
    w.time = time;
    w.agents = std::move(agents);
    w.ego_id = ego_id;
    return w;
}

// Miss distance from first principles: the closest the relative position
// gets when integrated forward along the relative velocity.
double min_range_forward(const Vec2& dp, const Vec2& dv) {
    double best = dp.norm();
    const double horizon = 100.0;
    const int steps = 200000;
    for (int i = 1; i <= steps; ++i) {
        const double t = horizon * static_cast<double>(i) / steps;
        best = std::min(best, (dp + dv * t).norm());
    }
    return best;
}

// In-front test rebuilt from the geometry instead of the angle comparison:
// inside the cone means ahead of the shoulder line and within one lane
// half-width... of perpendicular offset off the forward ray.
bool bearing_oracle(const AgentState& ego, const Vec2& dp, double d) {
    const double range = dp.norm();
    if (range <= d) return true;
    const Vec2 f = ego.forward();
    return f.dot(dp) >= 0.0 && std::abs(f.cross(dp)) <= d;
}

TEST_SUITE("expert_policy") {

TEST_CASE("velocity projection matches the worked example") {
    const auto proj = project_velocity({3.0, 4.0}, {-1.0, -2.0});
    CHECK(proj.along.x == doctest::Approx(-1.32).epsilon(1e-12));
    CHECK(proj.along.y == doctest::Approx(-1.76).epsilon(1e-12));
    CHECK(proj.residual.x == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(proj.residual.y == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(proj.residual.norm() == doctest::Approx(std::sqrt(0.8)).epsilon(1e-12));
}

TEST_CASE("velocity projection along component is parallel to dp") {
    auto rng = make_rng(0x9e1a7);
    std::uniform_real_distribution<double> coord(-20.0, 20.0);
    for (int i = 0; i < 500; ++i) {
        const Vec2 dp{coord(rng), coord(rng)};
        const Vec2 dv{coord(rng), coord(rng)};
        if (dp.norm() < 1e-3) continue;
        const auto proj = project_velocity(dp, dv);
        CHECK(std::abs(dp.cross(proj.along)) < 1e-9 * dp.norm());
        // Residual is orthogonal to dv whenever dv is nontrivial.
        if (dv.norm() > 1e-3) CHECK(std::abs(dv.dot(proj.residual)) < 1e-6);
    }
}

TEST_CASE("velocity projection rejects a zero offset") {
    CHECK_THROWS_AS(project_velocity({0.0, 0.0}, {1.0, 0.0}), std::domain_error);
}

TEST_CASE("zero relative velocity leaves the residual at dp") {
    const auto proj = project_velocity({5.0, 2.0}, {0.0, 0.0});
    CHECK(proj.residual.x == 5.0);
    CHECK(proj.residual.y == 2.0);
    CHECK(proj.along.norm() == 0.0);
}

TEST_CASE("time to collision on the worked example") {
    // Miss distance is sqrt(0.8) ~ 0.894, between the two reach widths below.
    const auto r = time_to_collision({3.0, 4.0}, {-1.0, -2.0}, 1.0);
    CHECK(r.closing_speed == doctest::Approx(2.2).epsilon(1e-12));
    CHECK(r.ttc == doctest::Approx(5.0 / 2.2).epsilon(1e-12));
    CHECK(r.reachable);
    CHECK_FALSE(time_to_collision({3.0, 4.0}, {-1.0, -2.0}, 0.5).reachable);
}

TEST_CASE("head-on closing gives range over speed exactly") {
    const auto r = time_to_collision({10.0, 0.0}, {-2.0, 0.0}, 3.5);
    CHECK(r.ttc == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(r.reachable);
}

TEST_CASE("purely radial closing reproduces the constructed time") {
    auto rng = make_rng(0x77c0);
    std::uniform_real_distribution<double> coord(-30.0, 30.0);
    std::uniform_real_distribution<double> speed(0.5, 15.0);
    for (int i = 0; i < 300; ++i) {
        Vec2 dp{coord(rng), coord(rng)};
        if (dp.norm() < 1.0) continue;
        const double k = speed(rng);
        const Vec2 dv = dp * (-k / dp.norm());  // straight at the ego
        const auto r = time_to_collision(dp, dv, 0.5);
        CHECK(r.ttc == doctest::Approx(dp.norm() / k).epsilon(1e-9));
        CHECK(r.reachable);
    }
}

TEST_CASE("time to collision is invariant under uniform scaling") {
    auto rng = make_rng(0x5ca1e);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_real_distribution<double> scale(0.1, 1000.0);
    for (int i = 0; i < 300; ++i) {
        const Vec2 dp{coord(rng), coord(rng)};
        const Vec2 dv{coord(rng), coord(rng)};
        if (dp.norm() < 0.5) continue;
        const double k = scale(rng);
        const auto a = time_to_collision(dp, dv, 1.0);
        const auto b = time_to_collision(dp * k, dv * k, k);
        if (std::isinf(a.ttc)) {
            CHECK(std::isinf(b.ttc));
        } else {
            CHECK(b.ttc == doctest::Approx(a.ttc).epsilon(1e-9));
        }
        CHECK(a.reachable == b.reachable);
    }
}

TEST_CASE("receding traffic never reports a finite time") {
    const auto r = time_to_collision({10.0, 0.0}, {3.0, 0.0}, 3.5);
    CHECK(std::isinf(r.ttc));
    CHECK(r.closing_speed < 0.0);
    const auto stationary = time_to_collision({10.0, 0.0}, {0.0, 0.0}, 3.5);
    CHECK(std::isinf(stationary.ttc));
}

TEST_CASE("residual magnitude equals the simulated miss distance") {
    auto rng = make_rng(0xd157);
    std::uniform_real_distribution<double> coord(-25.0, 25.0);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 40; ++i) {
        const Vec2 dp{coord(rng), coord(rng)};
        const Vec2 dv{coord(rng), coord(rng)};
        if (dp.norm() < 1.0 || dv.norm() < 0.5) continue;
        if (dp.dot(dv) >= -0.1) continue;  // keep genuinely closing cases
        const auto proj = project_velocity(dp, dv);
        if (proj.residual.norm() < 0.05) continue;  // grid too coarse for near-hits
        const double miss = min_range_forward(dp, dv);
        CHECK(proj.residual.norm() == doctest::Approx(miss).epsilon(1e-3));
        ++checked;
    }
    CHECK(checked == 40);
}

TEST_CASE("reachability uses the residual against the reach distance") {
    // Passing traffic offset 2 m laterally, parallel motion: misses by 2.
    const auto near_miss = time_to_collision({-10.0, 2.0}, {4.0, 0.0}, 1.9);
    CHECK_FALSE(near_miss.reachable);
    const auto hit = time_to_collision({-10.0, 2.0}, {4.0, 0.0}, 2.1);
    CHECK(hit.reachable);
}

TEST_CASE("bearing accepts anything closer than the width no matter the side") {
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 5.0);
    CHECK(bearing_check(ego, {-2.0, 0.0}, 3.5));  // directly behind but close
    CHECK(bearing_check(ego, {0.0, 3.4}, 3.5));
    CHECK_FALSE(bearing_check(ego, {-20.0, 0.0}, 3.5));
}

TEST_CASE("bearing cone boundary sits at asin of width over range") {
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 5.0);
    const double range = 10.0, d = 3.5;
    const double limit = std::asin(d / range);
    const Vec2 inside{range * std::cos(limit * 0.999), range * std::sin(limit * 0.999)};
    const Vec2 outside{range * std::cos(limit * 1.001), range * std::sin(limit * 1.001)};
    CHECK(bearing_check(ego, inside, d));
    CHECK_FALSE(bearing_check(ego, outside, d));
}

TEST_CASE("bearing is invariant under rotating ego and offset together") {
    auto rng = make_rng(0xbea1);
    std::uniform_real_distribution<double> coord(-30.0, 30.0);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    for (int i = 0; i < 500; ++i) {
        const Vec2 dp{coord(rng), coord(rng)};
        if (dp.norm() < 0.1) continue;
        const double base = angle(rng), extra = angle(rng);
        const auto ego0 = make_agent(0, 3.0, -7.0, base, 2.0);
        const auto ego1 = make_agent(0, 3.0, -7.0, base + extra, 2.0);
        CHECK(bearing_check(ego0, dp, 3.5) ==
              bearing_check(ego1, dp.rotated(extra), 3.5));
    }
}

TEST_CASE("bearing agrees with the half-plane plus ray-offset construction") {
    auto rng = make_rng(0xc04e);
    std::uniform_real_distribution<double> coord(-40.0, 40.0);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    std::uniform_real_distribution<double> width(0.5, 6.0);
    for (int i = 0; i < 2000; ++i) {
        const auto ego = make_agent(0, coord(rng), coord(rng), angle(rng), 1.0);
        const Vec2 target{coord(rng), coord(rng)};
        const Vec2 dp = target - ego.position;
        const double d = width(rng);
        const double range = dp.norm();
        if (range < 1e-6) continue;
        // Skip knife-edge samples where both formulations sit on a boundary.
        if (std::abs(range - d) < 1e-6) continue;
        const Vec2 f = ego.forward();
        if (std::abs(std::abs(f.cross(dp)) - d) < 1e-6) continue;
        if (std::abs(f.dot(dp)) < 1e-6) continue;
        CHECK(bearing_check(ego, dp, d) == bearing_oracle(ego, dp, d));
    }
}

TEST_CASE("lane change clearance waits on close traffic in the target lane") {
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 8.0, 1, -1, 50.0);
    LaneRef target{1, -2, 50.0};

    auto blocker = make_agent(1, 7.0, -3.5, 0.0, 8.0, 1, -2, 57.0);
    CHECK(lane_change_clearance(ego, {blocker}, target, 10.0) == Clearance::kWait);

    blocker.position = {9.5, -3.5};  // hypot ~ 10.12 > 10
    blocker.lane.s = 59.5;
    CHECK(lane_change_clearance(ego, {blocker}, target, 10.0) == Clearance::kClear);

    auto bystander = make_agent(2, 3.0, 0.0, 0.0, 8.0, 1, -1, 53.0);
    CHECK(lane_change_clearance(ego, {bystander}, target, 10.0) == Clearance::kClear);

    auto far_road = make_agent(3, 2.0, -3.5, 0.0, 8.0, 2, -2, 2.0);
    CHECK(lane_change_clearance(ego, {far_road}, target, 10.0) == Clearance::kClear);
}

TEST_CASE("lane change clearance treats the two innermost lanes as neighbours") {
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 8.0, 1, 1, 50.0);
    const auto blocker = make_agent(1, 4.0, -3.5, 0.0, 8.0, 1, -1, 54.0);
    CHECK(lane_change_clearance(ego, {blocker}, {1, -1, 50.0}, 10.0) ==
          Clearance::kWait);
}

TEST_CASE("lane change clearance rejects non-adjacent targets") {
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 8.0, 1, -1, 50.0);
    CHECK_THROWS_AS(lane_change_clearance(ego, {}, {1, -3, 50.0}, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(lane_change_clearance(ego, {}, {2, -2, 50.0}, 10.0),
                    std::invalid_argument);
}

TEST_CASE("pid terms act independently") {
    PidController p(2.0, 0.0, 0.0);
    CHECK(p.step(3.0, 0.1) == doctest::Approx(6.0));

    PidController i(0.0, 4.0, 0.0);
    CHECK(i.step(1.0, 0.5) == doctest::Approx(2.0));   // integral 0.5
    CHECK(i.step(1.0, 0.5) == doctest::Approx(4.0));   // integral 1.0

    PidController d(0.0, 0.0, 1.5);
    CHECK(d.step(1.0, 0.5) == doctest::Approx(0.0));   // no previous sample
    CHECK(d.step(2.0, 0.5) == doctest::Approx(3.0));   // (2-1)/0.5 * 1.5
}

TEST_CASE("pid reset clears state and bad dt throws") {
    PidController c(1.0, 1.0, 1.0);
    c.step(5.0, 0.1);
    c.reset();
    CHECK(c.step(1.0, 1.0) == doctest::Approx(1.0 + 1.0 + 0.0));
    CHECK_THROWS_AS(c.step(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("nearest route index picks the closest sample") {
    const auto route = straight_route(50.0, 5.0);
    CHECK(nearest_route_index(route, {12.4, 1.0}) == 2);
    CHECK(nearest_route_index(route, {12.6, -1.0}) == 3);
    CHECK(nearest_route_index(route, {-100.0, 0.0}) == 0);
    CHECK(nearest_route_index(route, {999.0, 0.0}) == route.size() - 1);
    CHECK_THROWS_AS(nearest_route_index({}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("closing lead inside three seconds triggers the full brake") {
    ExpertPolicy policy;
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 10.0, 1, -1, 0.0);
    const auto lead = make_agent(1, 10.0, 0.0, 0.0, 5.0, 1, -1, 10.0);
    const auto route = straight_route(200.0, 5.0);
    const auto d = policy.step(make_world(0.0, {ego, lead}), route, 0.05);
    CHECK(d.hazard.kind == HazardKind::kTtcFront);
    CHECK(d.hazard.ttc == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(d.hazard.offender_id == 1);
    CHECK(d.command.brake == 1.0);
    CHECK(d.command.throttle == 0.0);
}

TEST_CASE("receding lead is ignored and the cruise controller runs") {
    ExpertPolicy policy;
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 10.0, 1, -1, 0.0);
    const auto lead = make_agent(1, 10.0, 0.0, 0.0, 15.0, 1, -1, 10.0);
    const auto route = straight_route(200.0, 5.0);
    const auto d = policy.step(make_world(0.0, {ego, lead}), route, 0.05);
    CHECK(d.hazard.kind == HazardKind::kNone);
    CHECK(d.command.throttle * d.command.brake == 0.0);
}

TEST_CASE("anything parked closer than six meters in the cone stops the car") {
    ExpertPolicy policy;
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 4.0, 1, -1, 0.0);
    const auto lead = make_agent(1, 5.0, 0.0, 0.0, 4.0, 1, -1, 5.0);
    const auto d = policy.step(make_world(0.0, {ego, lead}),
                               straight_route(100.0, 5.0), 0.05);
    CHECK(d.hazard.kind == HazardKind::kBlockedBearing);
    CHECK(d.hazard.offender_id == 1);
    CHECK(d.command.brake == 1.0);
}

TEST_CASE("traffic behind does not stop the car") {
    ExpertPolicy policy;
    const auto ego = make_agent(0, 20.0, 0.0, 0.0, 10.0, 1, -1, 20.0);
    const auto rear = make_agent(1, 15.0, 0.0, 0.0, 10.0, 1, -1, 15.0);
    const auto d = policy.step(make_world(0.0, {ego, rear}),
                               straight_route(200.0, 5.0), 0.05);
    CHECK(d.hazard.kind == HazardKind::kNone);
}

TEST_CASE("baseline skips the predictive rule and keeps driving at a closing lead") {
    ExpertPolicy baseline({}, true);
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 10.0, 1, -1, 0.0);
    const auto lead = make_agent(1, 10.0, 0.0, 0.0, 5.0, 1, -1, 10.0);
    const auto route = straight_route(200.0, 5.0);
    const auto d = baseline.step(make_world(0.0, {ego, lead}), route, 0.05);
    CHECK(d.hazard.kind == HazardKind::kNone);
    CHECK(d.command.brake < 1.0);
}

TEST_CASE("baseline half-plane is wider than the bearing cone") {
    // 4 m ahead, 3.9 m to the side: inside the half-plane, outside the cone.
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 3.0, 1, -1, 0.0);
    const auto side = make_agent(1, 4.0, 3.9, 0.0, 3.0, 1, -2, 4.0);
    const auto route = straight_route(100.0, 5.0);

    ExpertPolicy baseline({}, true);
    const auto db = baseline.step(make_world(0.0, {ego, side}), route, 0.05);
    CHECK(db.hazard.kind == HazardKind::kBlockedBearing);

    ExpertPolicy full;
    const auto df = full.step(make_world(0.0, {ego, side}), route, 0.05);
    CHECK(df.hazard.kind == HazardKind::kNone);
}

TEST_CASE("commanded lane change waits for a blocked target lane") {
    // Route swaps from lane -1 to lane -2 ten meters ahead.
    std::vector<RoutePoint> route = straight_route(200.0, 5.0);
    for (auto& p : route) {
        if (p.position.x >= 10.0) {
            p.lane.lane_id = -2;
            p.position.y = -3.5;
        }
    }
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 8.0, 1, -1, 0.0);
    const auto blocker = make_agent(1, 2.0, -3.5, 0.0, 8.0, 1, -2, 2.0);

    ExpertPolicy policy;
    const auto d = policy.step(make_world(0.0, {ego, blocker}), route, 0.05);
    CHECK(d.hazard.kind == HazardKind::kLaneChangeConflict);
    CHECK(d.hazard.offender_id == 1);
    CHECK(d.command.brake == 1.0);

    // The hold persists for two seconds even after the blocker vanishes.
    const auto held = policy.step(make_world(1.9, {ego}), route, 0.05);
    CHECK(held.hazard.kind == HazardKind::kLaneChangeConflict);
    const auto released = policy.step(make_world(2.0, {ego}), route, 0.05);
    CHECK(released.hazard.kind == HazardKind::kNone);
}

TEST_CASE("baseline ignores lane-change conflicts entirely") {
    std::vector<RoutePoint> route = straight_route(200.0, 5.0);
    for (auto& p : route) {
        if (p.position.x >= 10.0) {
            p.lane.lane_id = -2;
            p.position.y = -3.5;
        }
    }
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 8.0, 1, -1, 0.0);
    const auto blocker = make_agent(1, 9.0, -3.5, 0.0, 8.0, 1, -2, 9.0);
    ExpertPolicy baseline({}, true);
    const auto d = baseline.step(make_world(0.0, {ego, blocker}), route, 0.05);
    CHECK(d.hazard.kind == HazardKind::kNone);
}

TEST_CASE("a route jumping two lanes over is a contract violation") {
    std::vector<RoutePoint> route = straight_route(100.0, 5.0);
    for (auto& p : route) {
        if (p.position.x >= 10.0) {
            p.lane.lane_id = -3;
            p.position.y = -7.0;
        }
    }
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 8.0, 1, -1, 0.0);
    ExpertPolicy policy;
    CHECK_THROWS_AS(policy.step(make_world(0.0, {ego}), route, 0.05),
                    std::invalid_argument);
}

TEST_CASE("steady cruise at the desired speed needs no brake") {
    // 5 m spacing at 2 Hz asks for 10 m/s; start exactly there.
    ExpertPolicy policy;
    auto ego = make_agent(0, 0.0, 0.0, 0.0, 10.0, 1, -1, 0.0);
    const auto route = straight_route(400.0, 5.0);
    for (int i = 0; i < 40; ++i) {
        const auto d = policy.step(make_world(i * 0.05, {ego}), route, 0.05);
        CHECK(d.command.brake == 0.0);
        CHECK(d.command.steer == doctest::Approx(0.0).epsilon(1e-12));
        ego.position.x += ego.speed * 0.05;
        ego.lane.s = ego.position.x;
    }
}

TEST_CASE("desired speed follows the waypoint spacing") {
    // Spacing 2.5 m asks for 5 m/s; a car already at 10 m/s must brake.
    ExpertPolicy policy;
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 10.0, 1, -1, 0.0);
    const auto d = policy.step(make_world(0.0, {ego}), straight_route(100.0, 2.5), 0.05);
    CHECK(d.command.brake > 0.0);
    CHECK(d.command.throttle == 0.0);

    // Spacing 5 m asks for 10; a car at 5 m/s must accelerate.
    ExpertPolicy policy2;
    const auto slow = make_agent(0, 0.0, 0.0, 0.0, 5.0, 1, -1, 0.0);
    const auto d2 = policy2.step(make_world(0.0, {slow}), straight_route(100.0, 5.0), 0.05);
    CHECK(d2.command.throttle > 0.0);
    CHECK(d2.command.brake == 0.0);
}

TEST_CASE("a route bending right produces positive steer") {
    std::vector<RoutePoint> route;
    for (int i = 0; i <= 20; ++i) {
        RoutePoint p;
        const double s = i * 5.0;
        p.position = {s, -0.002 * s * s};  // gentle right-hand drift
        p.lane = {1, -1, s};
        route.push_back(p);
    }
    ExpertPolicy policy;
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 10.0, 1, -1, 0.0);
    const auto d = policy.step(make_world(0.0, {ego}), route, 0.05);
    CHECK(d.command.steer > 0.0);

    // Mirrored to the left, the same magnitude with the opposite sign.
    for (auto& p : route) p.position.y = -p.position.y;
    ExpertPolicy mirrored;
    const auto dm = mirrored.step(make_world(0.0, {ego}), route, 0.05);
    CHECK(dm.command.steer == doctest::Approx(-d.command.steer).epsilon(1e-12));
}

TEST_CASE("waypoints come back in the ego frame") {
    ExpertPolicy policy;
    const auto ego = make_agent(0, 3.0, 4.0, M_PI / 2.0, 5.0, 1, -1, 0.0);
    std::vector<RoutePoint> route;
    for (int i = 0; i <= 4; ++i) {
        RoutePoint p;
        p.position = {3.0, 4.0 + 5.0 * i};  // straight up, ahead of the ego
        p.lane = {1, -1, 5.0 * i};
        route.push_back(p);
    }
    const auto d = policy.step(make_world(0.0, {ego}), route, 0.05);
    REQUIRE(d.waypoints.size() == 4);
    CHECK(d.waypoints[0].x == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(d.waypoints[0].y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.waypoints[3].x == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("an exhausted or empty route rolls the car to a stop") {
    ExpertPolicy policy;
    const auto ego = make_agent(0, 55.0, 0.0, 0.0, 3.0, 1, -1, 50.0);
    const auto d = policy.step(make_world(0.0, {ego}), straight_route(50.0, 5.0), 0.05);
    CHECK(d.waypoints.empty());
    CHECK(d.command.brake == 0.5);
    CHECK(d.command.throttle == 0.0);

    const auto e = policy.step(make_world(0.0, {ego}), {}, 0.05);
    CHECK(e.command.brake == 0.5);
}

TEST_CASE("throttle and brake are mutually exclusive over random worlds") {
    auto rng = make_rng(0xfeed);
    std::uniform_real_distribution<double> pos(-30.0, 230.0);
    std::uniform_real_distribution<double> lat(-8.0, 8.0);
    std::uniform_real_distribution<double> speed(0.0, 15.0);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    const auto route = straight_route(200.0, 5.0);
    ExpertPolicy policy;
    ExpertPolicy baseline({}, true);
    for (int i = 0; i < 400; ++i) {
        auto ego = make_agent(0, pos(rng), lat(rng), angle(rng), speed(rng), 1, -1, 0.0);
        ego.lane.s = std::min(std::max(ego.position.x, 0.0), 200.0);
        auto other = make_agent(1, pos(rng), lat(rng), angle(rng), speed(rng), 1, -1, 0.0);
        other.lane.s = std::min(std::max(other.position.x, 0.0), 200.0);
        for (ExpertPolicy* p : {&policy, &baseline}) {
            const auto d = p->step(make_world(i * 0.05, {ego, other}), route, 0.05);
            CHECK(d.command.throttle * d.command.brake == 0.0);
            CHECK(d.command.steer >= -1.0);
            CHECK(d.command.steer <= 1.0);
            CHECK(d.command.throttle >= 0.0);
            CHECK(d.command.throttle <= 1.0);
            CHECK(d.command.brake >= 0.0);
            CHECK(d.command.brake <= 1.0);
        }
    }
}

TEST_CASE("hazard kind names are stable") {
    CHECK(std::string(hazard_kind_name(HazardKind::kNone)) == "none");
    CHECK(std::string(hazard_kind_name(HazardKind::kTtcFront)) == "ttc_front");
    CHECK(std::string(hazard_kind_name(HazardKind::kBlockedBearing)) == "blocked_bearing");
    CHECK(std::string(hazard_kind_name(HazardKind::kLaneChangeConflict)) ==
          "lane_change_conflict");
}

TEST_CASE("policy step validates dt") {
    ExpertPolicy policy;
    const auto ego = make_agent(0, 0.0, 0.0, 0.0, 5.0, 1, -1, 0.0);
    CHECK_THROWS_AS(policy.step(make_world(0.0, {ego}), straight_route(50.0, 5.0), 0.0),
                    std::invalid_argument);
}

}  // TEST_SUITE

}  // namespace
}  // namespace odx
