#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "odx/bev.hpp"

namespace odx {

struct LidarPoint {
    double x = 0.0;  // ego frame, +x forward
    double y = 0.0;  // +y left
    double z = 0.0;  // up
};

// One radar return. Azimuth is measured in the owning sensor's frame; the
// location label tells the two mounts apart after front/rear sets are merged.
struct RadarPoint {
    double velocity = 0.0;  // radial m/s, positive = approaching
    double depth = 0.0;     // meters, 0..100
    double azimuth = 0.0;   // radians, |azimuth| <= 17.5 deg
    double altitude = 0.0;  // radians
    int location_label = 0;  // 0 = front sensor, 1 = rear sensor
};

inline constexpr double kRadarMaxDepth = 100.0;
inline constexpr double kRadarHalfFov = 17.5 * M_PI / 180.0;
inline constexpr std::size_t kRadarPoints = 81;      // N rows kept per frame
inline constexpr std::size_t kRadarFeatureDim = 5;   // velocity,depth,azimuth,altitude,label

// Mounting constants, used only when synthesizing returns from simulator
// ground truth.
inline constexpr double kRadarPitchRad = 5.0 * M_PI / 180.0;
inline constexpr double kRadarHeightM = 1.0;

using RadarRow = std::array<double, kRadarFeatureDim>;

// Fixed-size feature block: rows sorted ascending by time-to-reach, rows at
// index >= valid_count all zero.
struct RadarFeatureMatrix {
    std::vector<RadarRow> rows;
    std::size_t valid_count = 0;
};

// Histograms a point cloud into a two-channel top-down grid over the
// 32 x 32 m window (26 m ahead, 6 m behind, 16 m to each side) at
// 0.125 m/cell. Channel 0 counts points below 2 m, channel 1 the rest.
// Window membership follows the grid convention: max edges included, min
// edges excluded.
BevGrid lidar_to_bev(const std::vector<LidarPoint>& points);
BevGridConfig lidar_bev_config();

// Keeps the n returns that reach the ego soonest: time-to-reach is
// depth/velocity for approaching points and +infinity otherwise, with ties
// broken by smaller depth, then input order. Short inputs are zero-padded.
// Throws std::invalid_argument when a point violates the radar envelope
// (depth in [0, 100], |azimuth| within the 35 deg field of view).
RadarFeatureMatrix radar_select(const std::vector<RadarPoint>& points,
                                std::size_t n = kRadarPoints);

// Dense affinity over the valid rows: W_ij = exp(-|azimuth_i - azimuth_j|),
// each valid row normalized to sum 1. Padded rows are zero except for a unit
// diagonal, which keeps the product in radar_features from moving padding.
std::vector<std::vector<double>> radar_graph_weights(const RadarFeatureMatrix& matrix);

// Weighted feature aggregation: output row i = sum_j W_ij * row_j. Plain
// loops on purpose — this is the reference implementation the linear-algebra
// paths elsewhere are checked against. Throws std::invalid_argument on shape
// mismatch.
RadarFeatureMatrix radar_features(const RadarFeatureMatrix& matrix,
                                  const std::vector<std::vector<double>>& weights);

// LiDAR file I/O. Binary layout: 8-byte magic "LPC00001", little-endian
// uint32 point count, then float32 x,y,z per point. Files without the magic
// are read as whitespace-separated "x y z" text lines.
std::vector<LidarPoint> read_lidar_file(const std::string& path);
void write_lidar_binary(const std::vector<LidarPoint>& points, const std::string& path);

// Radar CSV with the exact header "velocity,depth,azimuth,altitude,label".
std::vector<RadarPoint> read_radar_csv(const std::string& path);
void write_radar_csv(const std::vector<RadarPoint>& points, const std::string& path);
void write_radar_matrix_csv(const RadarFeatureMatrix& matrix, const std::string& path);

}  // namespace odx
