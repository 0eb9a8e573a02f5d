#pragma once

#include <string>
#include <vector>

#include "odx/bev.hpp"
#include "odx/geometry.hpp"
#include "odx/map_model.hpp"

namespace odx {

// A contiguous run of sampled centerline points from a single lane. Chunks
// produced by discretize_lanes hold at most kRoughLanePoints points each and
// are disjoint (no shared boundary points between consecutive chunks).
inline constexpr int kRoughLanePoints = 10;

struct RoughLane {
    int road_id = 0;
    int lane_id = 0;
    std::vector<LanePoint> points;
};

// One polyline segment in ego frame: start point, end point, and the label
// triple carried by the end point.
struct LaneVector {
    Vec2 d_prev;
    Vec2 d_curr;
    LaneLabels labels;
};

// Samples every driving lane at s = 0, ds, 2*ds, ... up to the lane section's
// end, cutting the stream into RoughLane chunks of exactly kRoughLanePoints
// points (the final chunk per lane keeps whatever remains). Total points per
// lane segment = floor(span/ds) + 1. Ordering is deterministic: roads in
// network order, sections by s, lanes by id descending, chunks by s.
std::vector<RoughLane> discretize_lanes(const RoadNetwork& network, double ds = 1.0);

// Keeps rough lanes with at least one point inside the square window of
// half-extent `half_extent` centered on the ego, axes aligned with the ego
// heading (membership is inclusive: |x| <= half_extent && |y| <= half_extent).
// Retained lanes have every point transformed into the ego frame; points are
// never clipped so downstream vectorization sees unbroken polylines.
std::vector<RoughLane> select_window(const std::vector<RoughLane>& rough_lanes,
                                     const Pose2& ego_pose, double half_extent = 14.0);

// Turns a rough lane of P points into P-1 vectors; vector i connects point
// i-1 to point i and carries point i's labels. A single-point lane yields an
// empty list (logged as a warning).
std::vector<LaneVector> vectorize(const RoughLane& rough_lane);

// Draws lane centerlines into a single-channel occupancy grid: a pixel is set
// to 1.0 exactly when its center lies within stroke_width/2 of any polyline
// segment. Points are expected in the grid's metric frame (ego frame for the
// default window).
BevGrid rasterize_bev(const std::vector<RoughLane>& lanes, const BevGridConfig& config,
                      double stroke_width = 0.3);

// Default raster window: 256 x 256 px spanning the 28 x 28 m ego window.
BevGridConfig default_raster_config();

// Line-delimited JSON: one record per rough lane,
// {"road_id":..., "lane_id":..., "points":[[x,y],...], "labels":[[j,l,r],...]}.
void write_rough_lanes_jsonl(const std::vector<RoughLane>& lanes, const std::string& path);
std::vector<RoughLane> read_rough_lanes_jsonl(const std::string& path);

}  // namespace odx
