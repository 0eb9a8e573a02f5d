#include "odx/map_features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "odx/log.hpp"

namespace odx {

namespace {

// Points sampled along one lane piece: floor(span/ds) + 1, with a small
// tolerance so spans that are exact multiples of ds keep their endpoint.
int sample_count(double span, double ds) {
    return static_cast<int>(std::floor(span / ds + 1e-9)) + 1;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

}  // namespace

std::vector<RoughLane> discretize_lanes(const RoadNetwork& network, double ds) {
    if (!(ds > 0.0)) throw std::invalid_argument("sampling step must be positive");

    std::vector<RoughLane> out;
    for (const Road& road : network.roads) {
        for (std::size_t si = 0; si < road.lane_sections.size(); ++si) {
            const LaneSection& section = road.lane_sections[si];
            const double span = road.section_end(si) - section.s0;
            if (span < 0.0) continue;
            for (const Lane& lane : section.lanes) {
                if (!lane.is_driving()) continue;

                RoughLane chunk;
                chunk.road_id = road.id;
                chunk.lane_id = lane.id;
                const int n = sample_count(span, ds);
                for (int k = 0; k < n; ++k) {
                    const double s = std::min(section.s0 + k * ds, road.length);
                    chunk.points.push_back(eval_lane_center(road, si, lane.id, s));
                    if (static_cast<int>(chunk.points.size()) >= kRoughLanePoints) {
                        out.push_back(chunk);
                        chunk.points.clear();
                    }
                }
                if (!chunk.points.empty()) out.push_back(std::move(chunk));
            }
        }
    }
    return out;
}

std::vector<RoughLane> select_window(const std::vector<RoughLane>& rough_lanes,
                                     const Pose2& ego_pose, double half_extent) {
    if (!std::isfinite(ego_pose.position.x) || !std::isfinite(ego_pose.position.y) ||
        !std::isfinite(ego_pose.heading)) {
        throw std::invalid_argument("ego pose must be finite");
    }

    std::vector<RoughLane> out;
    for (const RoughLane& lane : rough_lanes) {
        bool any_inside = false;
        for (const LanePoint& p : lane.points) {
            const Vec2 local = ego_pose.world_to_local(p.position);
            if (std::abs(local.x) <= half_extent && std::abs(local.y) <= half_extent) {
                any_inside = true;
                break;
            }
        }
        if (!any_inside) continue;

        RoughLane local_lane;
        local_lane.road_id = lane.road_id;
        local_lane.lane_id = lane.lane_id;
        local_lane.points.reserve(lane.points.size());
        for (const LanePoint& p : lane.points) {
            LanePoint q = p;
            q.position = ego_pose.world_to_local(p.position);
            q.heading = normalize_angle(p.heading - ego_pose.heading);
            local_lane.points.push_back(q);
        }
        out.push_back(std::move(local_lane));
    }
    return out;
}

std::vector<LaneVector> vectorize(const RoughLane& rough_lane) {
    if (rough_lane.points.size() < 2) {
        log_message(LogLevel::kWarn, "rough lane " + std::to_string(rough_lane.road_id) + "/" +
                                         std::to_string(rough_lane.lane_id) +
                                         " has fewer than 2 points; nothing to vectorize");
        return {};
    }
    std::vector<LaneVector> vectors;
    vectors.reserve(rough_lane.points.size() - 1);
    for (std::size_t i = 1; i < rough_lane.points.size(); ++i) {
        vectors.push_back({rough_lane.points[i - 1].position, rough_lane.points[i].position,
                           rough_lane.points[i].labels});
    }
    return vectors;
}

BevGridConfig default_raster_config() {
    BevGridConfig config;
    config.width_px = 256;
    config.height_px = 256;
    config.meters_per_pixel = 28.0 / 256.0;
    config.x_max = 14.0;
    config.y_max = 14.0;
    return config;
}

BevGrid rasterize_bev(const std::vector<RoughLane>& lanes, const BevGridConfig& config,
                      double stroke_width) {
    BevGrid grid(config, 1);
    const double mpp = config.meters_per_pixel;
    const double half = stroke_width / 2.0;

    for (const RoughLane& lane : lanes) {
        for (std::size_t i = 1; i < lane.points.size(); ++i) {
            const Vec2 a = lane.points[i - 1].position;
            const Vec2 b = lane.points[i].position;

            // Only pixels whose centers fall inside the segment's inflated
            // bounding box can be within half a stroke of it.
            const double x_lo = std::min(a.x, b.x) - half - mpp;
            const double x_hi = std::max(a.x, b.x) + half + mpp;
            const double y_lo = std::min(a.y, b.y) - half - mpp;
            const double y_hi = std::max(a.y, b.y) + half + mpp;
            const int row_lo =
                std::max(0, static_cast<int>(std::floor((config.x_max - x_hi) / mpp)));
            const int row_hi = std::min(config.height_px - 1,
                                        static_cast<int>(std::floor((config.x_max - x_lo) / mpp)));
            const int col_lo =
                std::max(0, static_cast<int>(std::floor((config.y_max - y_hi) / mpp)));
            const int col_hi = std::min(config.width_px - 1,
                                        static_cast<int>(std::floor((config.y_max - y_lo) / mpp)));

            for (int r = row_lo; r <= row_hi; ++r) {
                const double cx = config.x_max - (r + 0.5) * mpp;
                for (int c = col_lo; c <= col_hi; ++c) {
                    const double cy = config.y_max - (c + 0.5) * mpp;
                    if (point_segment_distance({cx, cy}, a, b) <= half) {
                        grid.at(0, r, c) = 1.0f;
                    }
                }
            }
        }
    }
    return grid;
}

void write_rough_lanes_jsonl(const std::vector<RoughLane>& lanes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const RoughLane& lane : lanes) {
        nlohmann::ordered_json record;
        record["road_id"] = lane.road_id;
        record["lane_id"] = lane.lane_id;
        auto& points = record["points"] = nlohmann::ordered_json::array();
        auto& labels = record["labels"] = nlohmann::ordered_json::array();
        for (const LanePoint& p : lane.points) {
            points.push_back({p.position.x, p.position.y});
            labels.push_back({p.labels.junction ? 1 : 0, p.labels.left_change_ok ? 1 : 0,
                              p.labels.right_change_ok ? 1 : 0});
        }
        out << record.dump() << "\n";
    }
}

std::vector<RoughLane> read_rough_lanes_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<RoughLane> lanes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        RoughLane lane;
        lane.road_id = record.at("road_id").get<int>();
        lane.lane_id = record.at("lane_id").get<int>();
        const auto& points = record.at("points");
        const auto& labels = record.at("labels");
        if (points.size() != labels.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": points/labels length mismatch");
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            LanePoint p;
            p.position = {points[i].at(0).get<double>(), points[i].at(1).get<double>()};
            p.labels.junction = labels[i].at(0).get<int>() != 0;
            p.labels.left_change_ok = labels[i].at(1).get<int>() != 0;
            p.labels.right_change_ok = labels[i].at(2).get<int>() != 0;
            lane.points.push_back(p);
        }
        lanes.push_back(std::move(lane));
    }
    return lanes;
}

}  // namespace odx
