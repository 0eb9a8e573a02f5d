#include "odx/map_model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "odx/geometry.hpp"
#include "test_util.hpp"

using namespace odx;

namespace {

// Independent endpoint oracle: integrate (cos h, sin h) along the plan view
// with Simpson's rule, taking headings from eval() but rebuilding positions
// from scratch. Catches any mismatch between the analytic position formulas
// and the heading they claim to follow.
Vec2 integrate_plan_view(const Road& road, int steps_per_meter = 64) {
    Vec2 p{road.plan_view.front().x0, road.plan_view.front().y0};
    for (const GeometrySegment& seg : road.plan_view) {
        const int n = std::max(8, 2 * static_cast<int>(seg.length * steps_per_meter / 2));
        const double h = seg.length / n;
        double sx = 0.0, sy = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            const double heading = seg.eval(i * h).heading;
            sx += w * std::cos(heading);
            sy += w * std::sin(heading);
        }
        p.x += sx * h / 3.0;
        p.y += sy * h / 3.0;
    }
    return p;
}

Road road_from_segments(std::vector<GeometrySegment> segments, double length) {
    Road road;
    road.id = 1;
    road.length = length;
    road.plan_view = std::move(segments);
    return road;
}

}  // namespace

TEST_SUITE("map_model") {

TEST_CASE("angles wrap into the half-open interval") {
    CHECK(normalize_angle(0.0) == 0.0);
    CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(3.0 * M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(-0.5) == doctest::Approx(-0.5));
    CHECK(normalize_angle(7.0) == doctest::Approx(7.0 - 2.0 * M_PI));
}

TEST_CASE("pose frames round trip") {
    Pose2 pose{{3.0, -2.0}, 0.7};
    const Vec2 world{10.0, 4.0};
    const Vec2 local = pose.world_to_local(world);
    const Vec2 back = pose.local_to_world(local);
    CHECK(back.x == doctest::Approx(world.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(world.y).epsilon(1e-12));
    CHECK(pose.forward().cross(pose.left()) == doctest::Approx(1.0));
}

TEST_CASE("line segment evaluates along its heading") {
    const GeometrySegment seg = make_line(0.0, 0.0, 0.0, 0.0, 100.0);
    const Pose2 p = seg.eval(5.0);
    CHECK(p.position.x == 5.0);
    CHECK(p.position.y == 0.0);
    CHECK(p.heading == 0.0);

    const GeometrySegment slanted = make_line(0.0, 1.0, 2.0, M_PI / 6.0, 10.0);
    const Pose2 q = slanted.eval(4.0);
    CHECK(q.position.x == doctest::Approx(1.0 + 4.0 * std::cos(M_PI / 6.0)).epsilon(1e-15));
    CHECK(q.position.y == doctest::Approx(2.0 + 4.0 * std::sin(M_PI / 6.0)).epsilon(1e-15));
}

TEST_CASE("arc quarter circle hits the closed-form circle") {
    // curvature 0.1 -> radius 10, quarter turn after s = 5*pi
    const GeometrySegment seg = make_arc(0.0, 0.0, 0.0, 0.0, 5.0 * M_PI, 0.1);
    const Pose2 end = seg.eval(5.0 * M_PI);
    CHECK(std::abs(end.position.x - 10.0) < 1e-9);
    CHECK(std::abs(end.position.y - 10.0) < 1e-9);
    CHECK(std::abs(end.heading - M_PI / 2.0) < 1e-12);

    // Sample 100 points against the independent circle parametrization.
    for (int i = 0; i <= 100; ++i) {
        const double s = 5.0 * M_PI * i / 100.0;
        const Pose2 p = seg.eval(s);
        const double cx = std::sin(0.1 * s) / 0.1;
        const double cy = (1.0 - std::cos(0.1 * s)) / 0.1;
        CHECK(std::abs(p.position.x - cx) < 1e-9);
        CHECK(std::abs(p.position.y - cy) < 1e-9);
    }
}

TEST_CASE("arc with zero curvature is rejected") {
    CHECK_THROWS_AS(make_arc(0.0, 0.0, 0.0, 0.0, 10.0, 0.0), std::invalid_argument);
}

TEST_CASE("degenerate parametric cubic equals a line") {
    ParamPoly3Data poly;
    poly.bu = 30.0;  // u = 30 p, v = 0
    const GeometrySegment seg = make_param_poly3(0.0, 0.0, 0.0, 0.0, 30.0, poly);
    for (double s : {0.0, 1.0, 7.5, 15.0, 29.0, 30.0}) {
        const Pose2 p = seg.eval(s);
        CHECK(std::abs(p.position.x - s) < 1e-9);
        CHECK(std::abs(p.position.y) < 1e-12);
        CHECK(std::abs(p.heading) < 1e-12);
    }
}

TEST_CASE("parametric cubic endpoint lands on the curve endpoint") {
    // u = 30 p, v = 2 p^2 + p^3; true arclength integral computed externally.
    const double kLength = 30.217227485922717;
    ParamPoly3Data poly;
    poly.bu = 30.0;
    poly.cv = 2.0;
    poly.dv = 1.0;
    const GeometrySegment seg = make_param_poly3(0.0, 0.0, 0.0, 0.0, kLength, poly);

    const Pose2 end = seg.eval(kLength);
    CHECK(std::abs(end.position.x - 30.0) < 1e-6);
    CHECK(std::abs(end.position.y - 3.0) < 1e-6);
    CHECK(std::abs(end.heading - std::atan2(7.0, 30.0)) < 1e-6);

    // s behaves as arclength: chord lengths between close samples match ds.
    const double ds = kLength / 400.0;
    for (int i = 0; i < 400; ++i) {
        const Vec2 a = seg.eval(i * ds).position;
        const Vec2 b = seg.eval((i + 1) * ds).position;
        CHECK((b - a).norm() == doctest::Approx(ds).epsilon(2e-4));
    }
}

TEST_CASE("reference line spans segments continuously") {
    std::vector<GeometrySegment> segs;
    segs.push_back(make_arc(0.0, 0.0, 0.0, 0.0, 10.0 * M_PI, 0.05));
    segs.push_back(make_line(10.0 * M_PI, 20.0, 20.0, M_PI / 2.0, 50.0));
    const Road road = road_from_segments(std::move(segs), 10.0 * M_PI + 50.0);

    const Pose2 before = eval_reference_line(road, 10.0 * M_PI - 1e-9);
    const Pose2 after = eval_reference_line(road, 10.0 * M_PI + 1e-9);
    CHECK((after.position - before.position).norm() < 1e-6);

    const Pose2 end = eval_reference_line(road, road.length);
    CHECK(std::abs(end.position.x - 20.0) < 1e-9);
    CHECK(std::abs(end.position.y - 70.0) < 1e-9);
}

TEST_CASE("reference line rejects out-of-range arclength") {
    const Road road = road_from_segments({make_line(0.0, 0.0, 0.0, 0.0, 10.0)}, 10.0);
    CHECK_THROWS_AS(eval_reference_line(road, -0.001), std::out_of_range);
    CHECK_THROWS_AS(eval_reference_line(road, 10.001), std::out_of_range);
    CHECK_NOTHROW(eval_reference_line(road, 10.0 + 1e-7));  // inside slack
}

TEST_CASE("heading quadrature reproduces endpoints") {
    std::vector<Road> roads;
    roads.push_back(road_from_segments({make_line(0.0, 0.0, 0.0, 0.3, 40.0)}, 40.0));
    {
        std::vector<GeometrySegment> segs;
        segs.push_back(make_arc(0.0, 0.0, 0.0, 0.0, 10.0 * M_PI, 0.05));
        segs.push_back(make_line(10.0 * M_PI, 20.0, 20.0, M_PI / 2.0, 50.0));
        roads.push_back(road_from_segments(std::move(segs), 10.0 * M_PI + 50.0));
    }
    {
        ParamPoly3Data poly;
        poly.bu = 30.0;
        poly.cv = 2.0;
        poly.dv = 1.0;
        const double len = 30.217227485922717;
        roads.push_back(
            road_from_segments({make_param_poly3(0.0, 5.0, -2.0, 0.3, len, poly)}, len));
    }

    for (const Road& road : roads) {
        const Vec2 integrated = integrate_plan_view(road);
        const Vec2 evaluated = eval_reference_line(road, road.length).position;
        CHECK((integrated - evaluated).norm() < 1e-4);
    }
}

TEST_CASE("spiral expansion is continuous and tracks the clothoid") {
    const double length = 30.0;
    const double c0 = 0.0, c1 = 0.02;
    const auto segs = expand_spiral(0.0, 0.0, 0.0, 0.0, length, c0, c1);
    CHECK(segs.size() >= 60);  // 0.5 m chords

    // Chained segments meet exactly.
    for (std::size_t i = 1; i < segs.size(); ++i) {
        const Pose2 end = segs[i - 1].eval(segs[i - 1].length);
        CHECK(std::abs(end.position.x - segs[i].x0) < 1e-9);
        CHECK(std::abs(end.position.y - segs[i].y0) < 1e-9);
        CHECK(std::abs(normalize_angle(end.heading - segs[i].hdg0)) < 1e-9);
    }

    // Independent clothoid quadrature: h(s) = c0 s + (c1 - c0) s^2 / (2 L).
    const int n = 30000;
    const double h = length / n;
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double heading = c0 * s + (c1 - c0) * s * s / (2.0 * length);
        sx += w * std::cos(heading);
        sy += w * std::sin(heading);
    }
    // Midpoint-curvature chords carry an endpoint error of about
    // delta_kappa * chord^2 / 12 ~= 4e-4 m here; test with headroom.
    const Vec2 expected{sx * h / 3.0, sy * h / 3.0};
    const GeometrySegment& last = segs.back();
    const Pose2 end = last.eval(last.length);
    CHECK((end.position - expected).norm() < 1e-3);
}

TEST_CASE("lane center offsets a single right lane by half its width") {
    RoadNetwork network = odx::testing::straight_single_lane_network(100.0, 4.0);
    const LanePoint p = eval_lane_center(network.roads[0], 0, -1, 10.0);
    CHECK(p.position.x == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(p.position.y == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(p.lane_width == doctest::Approx(4.0));
    CHECK(p.heading == 0.0);
    CHECK(p.s == 10.0);
}

TEST_CASE("stacked right lanes accumulate offsets") {
    RoadNetwork network = odx::testing::straight_single_lane_network(100.0, 3.5);
    Lane outer;
    outer.id = -2;
    outer.type = "driving";
    outer.width_polys.push_back({0.0, 3.5, 0.0, 0.0, 0.0});
    network.roads[0].lane_sections[0].lanes.push_back(outer);

    const LanePoint inner = eval_lane_center(network.roads[0], 0, -1, 0.0);
    const LanePoint outer_pt = eval_lane_center(network.roads[0], 0, -2, 0.0);
    CHECK(inner.position.y == doctest::Approx(-1.75).epsilon(1e-15));
    CHECK(outer_pt.position.y == doctest::Approx(-5.25).epsilon(1e-15));
}

TEST_CASE("left lanes mirror the offset sign") {
    RoadNetwork network = odx::testing::straight_single_lane_network(100.0, 3.5);
    Lane left;
    left.id = 1;
    left.type = "driving";
    left.width_polys.push_back({0.0, 3.0, 0.0, 0.0, 0.0});
    network.roads[0].lane_sections[0].lanes.push_back(left);

    const LanePoint p = eval_lane_center(network.roads[0], 0, 1, 20.0);
    CHECK(p.position.y == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("right lane on a right-hand bend rides the smaller radius") {
    // curvature -0.1 -> radius 10 circle centered at (0, -10)
    Road road = road_from_segments({make_arc(0.0, 0.0, 0.0, 0.0, 5.0 * M_PI, -0.1)}, 5.0 * M_PI);
    Lane lane;
    lane.id = -1;
    lane.width_polys.push_back({0.0, 2.0, 0.0, 0.0, 0.0});
    LaneSection section;
    section.lanes.push_back(lane);
    road.lane_sections.push_back(section);

    const Vec2 center{0.0, -10.0};
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const LanePoint p = eval_lane_center(road, 0, -1, 5.0 * M_PI * frac);
        CHECK((p.position - center).norm() == doctest::Approx(9.0).epsilon(1e-9));
    }
}

TEST_CASE("lane id zero sits exactly on the reference line") {
    RoadNetwork network = odx::testing::straight_single_lane_network(50.0, 3.5);
    Lane center;
    center.id = 0;
    center.type = "none";
    network.roads[0].lane_sections[0].lanes.push_back(center);

    const LanePoint p = eval_lane_center(network.roads[0], 0, 0, 17.0);
    const Pose2 ref = eval_reference_line(network.roads[0], 17.0);
    CHECK(p.position.x == ref.position.x);
    CHECK(p.position.y == ref.position.y);
}

TEST_CASE("unknown lane id raises a lookup error") {
    RoadNetwork network = odx::testing::straight_single_lane_network(50.0);
    CHECK_THROWS_AS(eval_lane_center(network.roads[0], 0, -7, 1.0), std::out_of_range);
    CHECK_THROWS_AS(eval_lane_center(network.roads[0], 3, -1, 1.0), std::out_of_range);
}

TEST_CASE("lane point labels copy the owning lane's flags") {
    RoadNetwork network = odx::testing::straight_single_lane_network(50.0);
    network.roads[0].lane_sections[0].lanes[0].lane_change = LaneChange::kLeft;
    network.roads[0].lane_sections[0].lanes[0].junction_member = true;

    const LanePoint p = eval_lane_center(network.roads[0], 0, -1, 5.0);
    CHECK(p.labels.junction);
    CHECK(p.labels.left_change_ok);
    CHECK_FALSE(p.labels.right_change_ok);
}

TEST_CASE("width records switch at their start offsets") {
    Lane lane;
    lane.width_polys.push_back({0.0, 3.5, 0.0, 0.0, 0.0});
    lane.width_polys.push_back({10.0, 3.0, 0.0, 0.0, 0.0});
    CHECK(lane_width_at(lane, 0.0) == doctest::Approx(3.5));
    CHECK(lane_width_at(lane, 9.999) == doctest::Approx(3.5));
    CHECK(lane_width_at(lane, 12.0) == doctest::Approx(3.0));
}

TEST_CASE("width cubic evaluates the linear taper") {
    Lane lane;
    lane.width_polys.push_back({0.0, 3.0, 0.1, 0.0, 0.0});
    CHECK(lane_width_at(lane, 5.0) == doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("negative evaluated width is a domain error") {
    Lane lane;
    lane.width_polys.push_back({0.0, 3.0, -1.5, 0.0, 0.0});
    CHECK_NOTHROW(lane_width_at(lane, 1.0));
    CHECK_THROWS_AS(lane_width_at(lane, 3.0), std::domain_error);
}

TEST_CASE("section lookup picks the covering section") {
    Road road = road_from_segments({make_line(0.0, 0.0, 0.0, 0.0, 300.0)}, 300.0);
    LaneSection s1, s2;
    s1.s0 = 0.0;
    s2.s0 = 150.0;
    road.lane_sections = {s1, s2};
    CHECK(road.section_index_at(0.0) == 0);
    CHECK(road.section_index_at(149.999) == 0);
    CHECK(road.section_index_at(150.0) == 1);
    CHECK(road.section_index_at(300.0) == 1);
    CHECK(road.section_end(0) == doctest::Approx(150.0));
    CHECK(road.section_end(1) == doctest::Approx(300.0));
}

}  // TEST_SUITE
