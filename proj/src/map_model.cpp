#include "odx/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace odx {

namespace {

constexpr double kSRangeSlack = 1e-6;
constexpr int kPolyTableSteps = 512;

}  // namespace

Vec2 ParamPoly3Data::point_at_p(double p) const {
    const double u = au + p * (bu + p * (cu + p * du));
    const double v = av + p * (bv + p * (cv + p * dv));
    return {u, v};
}

double ParamPoly3Data::heading_at_p(double p) const {
    const double du_dp = bu + p * (2.0 * cu + p * 3.0 * du);
    const double dv_dp = bv + p * (2.0 * cv + p * 3.0 * dv);
    return std::atan2(dv_dp, du_dp);
}

Pose2 GeometrySegment::eval(double ds) const {
    ds = std::clamp(ds, 0.0, length);
    switch (kind) {
        case GeometryKind::kLine: {
            Pose2 pose;
            pose.position = {x0 + ds * std::cos(hdg0), y0 + ds * std::sin(hdg0)};
            pose.heading = normalize_angle(hdg0);
            return pose;
        }
        case GeometryKind::kArc: {
            const double h = hdg0 + curvature * ds;
            Pose2 pose;
            pose.position = {x0 + (std::sin(h) - std::sin(hdg0)) / curvature,
                             y0 - (std::cos(h) - std::cos(hdg0)) / curvature};
            pose.heading = normalize_angle(h);
            return pose;
        }
        case GeometryKind::kParamPoly3: {
            // Map s to the curve parameter by arclength fraction so the
            // segment endpoint lands exactly on p_max even when the length
            // attribute disagrees slightly with the true curve length.
            const double p_max = poly.normalized ? 1.0 : length;
            const double target = (length > 0.0 ? ds / length : 0.0) * poly.total_len();
            const auto& table = poly.cum_len;
            double p = p_max;
            if (!table.empty() && target < table.back()) {
                const auto it = std::lower_bound(table.begin(), table.end(), target);
                const std::size_t hi = std::max<std::size_t>(1, it - table.begin());
                const double seg_len = table[hi] - table[hi - 1];
                const double frac = seg_len > 0.0 ? (target - table[hi - 1]) / seg_len : 0.0;
                p = (static_cast<double>(hi - 1) + frac) * p_max /
                    static_cast<double>(table.size() - 1);
            }
            const Vec2 local = poly.point_at_p(p) - poly.point_at_p(0.0);
            Pose2 pose;
            pose.position = Vec2{x0, y0} + local.rotated(hdg0);
            pose.heading = normalize_angle(hdg0 + poly.heading_at_p(p));
            return pose;
        }
    }
    throw std::logic_error("unknown geometry kind");
}

GeometrySegment make_line(double s0, double x0, double y0, double hdg0, double length) {
    GeometrySegment seg;
    seg.s0 = s0;
    seg.x0 = x0;
    seg.y0 = y0;
    seg.hdg0 = hdg0;
    seg.length = length;
    seg.kind = GeometryKind::kLine;
    return seg;
}

GeometrySegment make_arc(double s0, double x0, double y0, double hdg0, double length,
                         double curvature) {
    if (curvature == 0.0) throw std::invalid_argument("arc curvature must be nonzero");
    GeometrySegment seg = make_line(s0, x0, y0, hdg0, length);
    seg.kind = GeometryKind::kArc;
    seg.curvature = curvature;
    return seg;
}

GeometrySegment make_param_poly3(double s0, double x0, double y0, double hdg0, double length,
                                 ParamPoly3Data poly) {
    GeometrySegment seg = make_line(s0, x0, y0, hdg0, length);
    seg.kind = GeometryKind::kParamPoly3;
    seg.poly = std::move(poly);

    // Cumulative curve length over a uniform p grid (trapezoid on |dC/dp|).
    const double p_max = seg.poly.normalized ? 1.0 : length;
    seg.poly.cum_len.assign(kPolyTableSteps + 1, 0.0);
    double acc = 0.0;
    Vec2 prev = seg.poly.point_at_p(0.0);
    for (int i = 1; i <= kPolyTableSteps; ++i) {
        const double p = p_max * static_cast<double>(i) / kPolyTableSteps;
        const Vec2 cur = seg.poly.point_at_p(p);
        acc += (cur - prev).norm();
        seg.poly.cum_len[static_cast<std::size_t>(i)] = acc;
        prev = cur;
    }
    return seg;
}

std::vector<GeometrySegment> expand_spiral(double s0, double x0, double y0, double hdg0,
                                           double length, double curv_start, double curv_end,
                                           double max_chord) {
    if (length <= 0.0) throw std::invalid_argument("spiral length must be positive");
    const int chords = std::max(1, static_cast<int>(std::ceil(length / max_chord)));
    const double ds = length / chords;
    std::vector<GeometrySegment> out;
    out.reserve(static_cast<std::size_t>(chords));

    double s_cursor = s0;
    Pose2 pose{{x0, y0}, hdg0};
    for (int i = 0; i < chords; ++i) {
        const double s_mid = (static_cast<double>(i) + 0.5) * ds;
        const double k = curv_start + (curv_end - curv_start) * s_mid / length;
        GeometrySegment seg =
            std::abs(k) < 1e-12
                ? make_line(s_cursor, pose.position.x, pose.position.y, pose.heading, ds)
                : make_arc(s_cursor, pose.position.x, pose.position.y, pose.heading, ds, k);
        pose = seg.eval(ds);
        s_cursor += ds;
        out.push_back(std::move(seg));
    }
    return out;
}

const Lane* LaneSection::find_lane(int lane_id) const {
    for (const Lane& lane : lanes) {
        if (lane.id == lane_id) return &lane;
    }
    return nullptr;
}

std::size_t Road::section_index_at(double s) const {
    if (lane_sections.empty()) throw std::out_of_range("road has no lane sections");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < lane_sections.size(); ++i) {
        if (lane_sections[i].s0 <= s + kSRangeSlack) idx = i;
    }
    return idx;
}

double Road::section_end(std::size_t section_index) const {
    if (section_index + 1 < lane_sections.size()) return lane_sections[section_index + 1].s0;
    return length;
}

const Road* RoadNetwork::find_road(int road_id) const {
    for (const Road& road : roads) {
        if (road.id == road_id) return &road;
    }
    return nullptr;
}

double RoadNetwork::total_centerline_length() const {
    double total = 0.0;
    for (const Road& road : roads) total += road.length;
    return total;
}

std::size_t RoadNetwork::driving_lane_count() const {
    std::size_t n = 0;
    for (const Road& road : roads) {
        for (const LaneSection& section : road.lane_sections) {
            for (const Lane& lane : section.lanes) {
                if (lane.is_driving()) ++n;
            }
        }
    }
    return n;
}

Pose2 eval_reference_line(const Road& road, double s) {
    if (s < -kSRangeSlack || s > road.length + kSRangeSlack) {
        throw std::out_of_range("reference line s=" + std::to_string(s) +
                                " outside road [0, " + std::to_string(road.length) + "]");
    }
    if (road.plan_view.empty()) throw std::out_of_range("road has an empty plan view");

    const GeometrySegment* seg = &road.plan_view.front();
    for (const GeometrySegment& g : road.plan_view) {
        if (g.s0 <= s + kSRangeSlack) seg = &g;
    }
    return seg->eval(s - seg->s0);
}

double lane_width_at(const Lane& lane, double s_local) {
    if (lane.width_polys.empty()) return 0.0;
    const LaneWidthPoly* rec = &lane.width_polys.front();
    for (const LaneWidthPoly& poly : lane.width_polys) {
        if (poly.s_offset <= s_local + kSRangeSlack) rec = &poly;
    }
    const double width = rec->eval(s_local - rec->s_offset);
    if (width < -1e-9) {
        throw std::domain_error("lane " + std::to_string(lane.id) + " width is negative (" +
                                std::to_string(width) + ") at s_local=" +
                                std::to_string(s_local));
    }
    return width;
}

LanePoint eval_lane_center(const Road& road, std::size_t section_index, int lane_id, double s) {
    if (section_index >= road.lane_sections.size()) {
        throw std::out_of_range("lane section index out of range");
    }
    const LaneSection& section = road.lane_sections[section_index];
    const Pose2 ref = eval_reference_line(road, s);
    const double s_local = s - section.s0;

    LanePoint point;
    point.s = s;
    point.heading = ref.heading;

    if (lane_id == 0) {
        point.position = ref.position;
        return point;
    }

    const Lane* target = section.find_lane(lane_id);
    if (target == nullptr) {
        throw std::out_of_range("lane id " + std::to_string(lane_id) + " not in section of road " +
                                std::to_string(road.id));
    }

    // Cumulative half-width offset; positive t is left of the reference line.
    const int step = lane_id > 0 ? 1 : -1;
    double inner = 0.0;
    for (int id = step; id != lane_id; id += step) {
        const Lane* between = section.find_lane(id);
        if (between != nullptr) inner += lane_width_at(*between, s_local);
    }
    const double width = lane_width_at(*target, s_local);
    const double t = static_cast<double>(step) * (inner + 0.5 * width);

    point.position = ref.position + ref.left() * t;
    point.lane_width = width;
    point.labels.junction = target->junction_member;
    point.labels.left_change_ok =
        target->lane_change == LaneChange::kLeft || target->lane_change == LaneChange::kBoth;
    point.labels.right_change_ok =
        target->lane_change == LaneChange::kRight || target->lane_change == LaneChange::kBoth;
    return point;
}

}  // namespace odx
