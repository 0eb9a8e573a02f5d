#pragma once

#include <cstdint>
#include <vector>

#include "odx/geometry.hpp"

namespace odx {

// Where an agent sits on the lane graph.
struct LaneRef {
    int road_id = 0;
    int lane_id = 0;
    double s = 0.0;

    bool same_lane(const LaneRef& o) const {
        return road_id == o.road_id && lane_id == o.lane_id;
    }
};

struct AgentState {
    int id = 0;
    Vec2 position;          // world frame
    double heading = 0.0;   // radians
    double speed = 0.0;     // m/s, equals |velocity|
    Vec2 velocity;          // world frame m/s
    LaneRef lane;
    double half_length = 2.45;  // bounding box half extents
    double half_width = 1.06;

    Vec2 forward() const { return {std::cos(heading), std::sin(heading)}; }
};

struct WorldSnapshot {
    double time = 0.0;
    std::vector<AgentState> agents;  // unique ids, ego included
    int ego_id = 0;

    const AgentState* find(int agent_id) const {
        for (const AgentState& a : agents) {
            if (a.id == agent_id) return &a;
        }
        return nullptr;
    }
    const AgentState& ego() const { return *find(ego_id); }
};

// One sample of the route the ego is asked to follow: a lane-center point
// plus the lane it came from, so policies can reason about commanded lane
// changes and lane widths without a map in hand.
struct RoutePoint {
    Vec2 position;
    double heading = 0.0;
    LaneRef lane;
    double lane_width = 3.5;
};

}  // namespace odx
