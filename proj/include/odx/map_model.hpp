#ifndef ODX_MAP_MODEL_HPP_
#define ODX_MAP_MODEL_HPP_

#include <optional>
#include <string>
#include <vector>

#include "odx/geometry.hpp"

namespace odx {

// Road network domain model. All types are immutable after construction and
// safe for concurrent reads.

enum class GeometryKind { kLine, kArc, kParamPoly3 };

// Cubic pair (u(p), v(p)) in the segment's local frame. When `normalized`
// the parameter p runs over [0,1], otherwise over [0, length]. s along the
// segment is mapped to p through the cumulative-arclength table so that s
// behaves as true arclength and the segment endpoint lands exactly on
// p_max. The table is filled by finalize().
struct ParamPoly3Data {
    double au = 0.0, bu = 0.0, cu = 0.0, du = 0.0;
    double av = 0.0, bv = 0.0, cv = 0.0, dv = 0.0;
    bool normalized = true;

    std::vector<double> cum_len;  // arclength at uniform p steps, cum_len[0] = 0

    Vec2 point_at_p(double p) const;
    double heading_at_p(double p) const;  // relative to segment frame
    double total_len() const { return cum_len.empty() ? 0.0 : cum_len.back(); }
};

struct GeometrySegment {
    double s0 = 0.0;  // start arclength along the road
    double x0 = 0.0;
    double y0 = 0.0;
    double hdg0 = 0.0;
    double length = 0.0;
    GeometryKind kind = GeometryKind::kLine;

    double curvature = 0.0;  // arc only, != 0
    ParamPoly3Data poly;     // paramPoly3 only

    // Pose at distance ds from the segment start, 0 <= ds <= length.
    Pose2 eval(double ds) const;
};

GeometrySegment make_line(double s0, double x0, double y0, double hdg0, double length);
GeometrySegment make_arc(double s0, double x0, double y0, double hdg0, double length,
                         double curvature);
GeometrySegment make_param_poly3(double s0, double x0, double y0, double hdg0, double length,
                                 ParamPoly3Data poly);

// Spiral support: a clothoid (curvature linear in s) is approximated by
// constant-curvature arc chords of at most `max_chord` length, each chord
// using the curvature at its midpoint. Returns position-continuous segments.
std::vector<GeometrySegment> expand_spiral(double s0, double x0, double y0, double hdg0,
                                           double length, double curv_start, double curv_end,
                                           double max_chord = 0.5);

enum class LaneChange { kNone, kLeft, kRight, kBoth };

struct LaneWidthPoly {
    double s_offset = 0.0;  // relative to lane-section start
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double eval(double ds) const { return a + ds * (b + ds * (c + ds * d)); }
};

struct Lane {
    int id = 0;  // signed, 0 = reference line; negative ids right of reference
    std::string type = "driving";
    std::vector<LaneWidthPoly> width_polys;  // ordered by s_offset
    LaneChange lane_change = LaneChange::kNone;
    bool junction_member = false;
    std::optional<int> predecessor_id;
    std::optional<int> successor_id;

    bool is_driving() const { return type == "driving"; }
};

struct LaneSection {
    double s0 = 0.0;  // start arclength along the road
    std::vector<Lane> lanes;  // all ids except 0, any order

    const Lane* find_lane(int lane_id) const;
};

struct RoadLink {
    int element_id = 0;
    bool is_junction = false;
};

struct Road {
    int id = 0;
    std::string name;
    double length = 0.0;
    std::vector<GeometrySegment> plan_view;    // contiguous in s, covers [0, length]
    std::vector<LaneSection> lane_sections;    // ordered by s0
    std::optional<int> junction_id;
    std::optional<RoadLink> predecessor;
    std::optional<RoadLink> successor;

    // Index of the lane section covering arclength s.
    std::size_t section_index_at(double s) const;
    // Extent of a lane section along the road: [s0, end).
    double section_end(std::size_t section_index) const;
};

struct Junction {
    int id = 0;
    std::string name;
    std::vector<int> connecting_road_ids;
};

struct RoadNetwork {
    std::vector<Road> roads;
    std::vector<Junction> junctions;

    const Road* find_road(int road_id) const;
    double total_centerline_length() const;
    std::size_t driving_lane_count() const;
};

// A discretized lane-center sample with the semantic labels attached to it.
struct LaneLabels {
    bool junction = false;
    bool left_change_ok = false;
    bool right_change_ok = false;

    bool operator==(const LaneLabels&) const = default;
};

struct LanePoint {
    Vec2 position;         // world frame
    double heading = 0.0;  // radians in (-pi, pi]
    double s = 0.0;        // arclength along the owning road
    double lane_width = 0.0;
    LaneLabels labels;
};

// Pose on the road reference line at arclength s. Throws std::out_of_range
// when s is outside [0, length] beyond a 1e-6 m slack.
Pose2 eval_reference_line(const Road& road, double s);

// Lane-center point: reference pose offset laterally by the cumulative
// widths of the lanes between the reference line and the target lane plus
// half the target lane width (signed, OpenDRIVE convention: negative ids to
// the right of the reference when facing increasing s). Throws
// std::out_of_range on bad indices / unknown lane ids.
LanePoint eval_lane_center(const Road& road, std::size_t section_index, int lane_id, double s);

// Evaluates the active width record at lane-section-local arclength.
// Throws std::domain_error when the evaluated width is negative.
double lane_width_at(const Lane& lane, double s_local);

}  // namespace odx

#endif  // ODX_MAP_MODEL_HPP_
