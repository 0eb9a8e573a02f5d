#include "odx/sensor_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace odx {

namespace {

constexpr char kLidarMagic[8] = {'L', 'P', 'C', '0', '0', '0', '0', '1'};
constexpr char kRadarHeader[] = "velocity,depth,azimuth,altitude,label";

double time_to_reach(const RadarPoint& p) {
    return p.velocity > 0.0 ? p.depth / p.velocity : std::numeric_limits<double>::infinity();
}

void check_radar_point(const RadarPoint& p, std::size_t index) {
    const bool ok = p.depth >= 0.0 && p.depth <= kRadarMaxDepth &&
                    std::abs(p.azimuth) <= kRadarHalfFov + 1e-12 && std::isfinite(p.velocity) &&
                    std::isfinite(p.altitude) &&
                    (p.location_label == 0 || p.location_label == 1);
    if (!ok) {
        throw std::invalid_argument("radar point " + std::to_string(index) +
                                    " outside the sensor envelope");
    }
}

}  // namespace

BevGridConfig lidar_bev_config() {
    BevGridConfig config;
    config.width_px = 256;
    config.height_px = 256;
    config.meters_per_pixel = 0.125;
    config.x_max = 26.0;  // 26 m ahead, 6 m behind
    config.y_max = 16.0;
    return config;
}

BevGrid lidar_to_bev(const std::vector<LidarPoint>& points) {
    BevGrid grid(lidar_bev_config(), 2);
    for (const LidarPoint& p : points) {
        int row = 0, col = 0;
        if (!grid.cell_of({p.x, p.y}, row, col)) continue;
        const int channel = p.z < 2.0 ? 0 : 1;
        grid.at(channel, row, col) += 1.0f;
    }
    return grid;
}

RadarFeatureMatrix radar_select(const std::vector<RadarPoint>& points, std::size_t n) {
    for (std::size_t i = 0; i < points.size(); ++i) check_radar_point(points[i], i);

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ta = time_to_reach(points[a]);
        const double tb = time_to_reach(points[b]);
        if (ta != tb) return ta < tb;
        if (points[a].depth != points[b].depth) return points[a].depth < points[b].depth;
        return a < b;
    });

    RadarFeatureMatrix matrix;
    matrix.rows.assign(n, RadarRow{});
    matrix.valid_count = std::min(n, points.size());
    for (std::size_t i = 0; i < matrix.valid_count; ++i) {
        const RadarPoint& p = points[order[i]];
        matrix.rows[i] = {p.velocity, p.depth, p.azimuth, p.altitude,
                          static_cast<double>(p.location_label)};
    }
    return matrix;
}

std::vector<std::vector<double>> radar_graph_weights(const RadarFeatureMatrix& matrix) {
    const std::size_t n = matrix.rows.size();
    std::vector<std::vector<double>> weights(n, std::vector<double>(n, 0.0));

    for (std::size_t i = 0; i < n; ++i) {
        if (i >= matrix.valid_count) {
            weights[i][i] = 1.0;
            continue;
        }
        double row_sum = 0.0;
        for (std::size_t j = 0; j < matrix.valid_count; ++j) {
            const double w = std::exp(-std::abs(matrix.rows[i][2] - matrix.rows[j][2]));
            weights[i][j] = w;
            row_sum += w;
        }
        for (std::size_t j = 0; j < matrix.valid_count; ++j) weights[i][j] /= row_sum;
    }
    return weights;
}

RadarFeatureMatrix radar_features(const RadarFeatureMatrix& matrix,
                                  const std::vector<std::vector<double>>& weights) {
    const std::size_t n = matrix.rows.size();
    if (weights.size() != n) throw std::invalid_argument("weight matrix row count mismatch");
    for (const auto& row : weights) {
        if (row.size() != n) throw std::invalid_argument("weight matrix column count mismatch");
    }

    RadarFeatureMatrix out;
    out.rows.assign(n, RadarRow{});
    out.valid_count = matrix.valid_count;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = weights[i][j];
            if (w == 0.0) continue;
            for (std::size_t k = 0; k < kRadarFeatureDim; ++k) {
                out.rows[i][k] += w * matrix.rows[j][k];
            }
        }
    }
    // A padded identity block would copy zero rows onto themselves; force
    // exact zeros so padding survives round trips bit-for-bit.
    for (std::size_t i = out.valid_count; i < n; ++i) out.rows[i] = RadarRow{};
    return out;
}

std::vector<LidarPoint> read_lidar_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    char magic[8] = {};
    in.read(magic, 8);
    if (in.gcount() == 8 && std::memcmp(magic, kLidarMagic, 8) == 0) {
        unsigned char count_buf[4];
        in.read(reinterpret_cast<char*>(count_buf), 4);
        if (!in) throw std::runtime_error(path + " has a truncated point count");
        const std::uint32_t count = static_cast<std::uint32_t>(count_buf[0]) |
                                    (static_cast<std::uint32_t>(count_buf[1]) << 8) |
                                    (static_cast<std::uint32_t>(count_buf[2]) << 16) |
                                    (static_cast<std::uint32_t>(count_buf[3]) << 24);
        std::vector<LidarPoint> points(count);
        std::vector<float> raw(static_cast<std::size_t>(count) * 3);
        in.read(reinterpret_cast<char*>(raw.data()),
                static_cast<std::streamsize>(raw.size() * sizeof(float)));
        if (!in) throw std::runtime_error(path + " point data is truncated");
        for (std::uint32_t i = 0; i < count; ++i) {
            points[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
        }
        return points;
    }

    // No magic: treat the file as "x y z" text lines.
    in.clear();
    in.seekg(0);
    std::vector<LidarPoint> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        LidarPoint p;
        if (!(ss >> p.x >> p.y >> p.z)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected three coordinates");
        }
        points.push_back(p);
    }
    return points;
}

void write_lidar_binary(const std::vector<LidarPoint>& points, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kLidarMagic, 8);
    const std::uint32_t count = static_cast<std::uint32_t>(points.size());
    const char bytes[4] = {static_cast<char>(count & 0xff), static_cast<char>((count >> 8) & 0xff),
                           static_cast<char>((count >> 16) & 0xff),
                           static_cast<char>((count >> 24) & 0xff)};
    out.write(bytes, 4);
    for (const LidarPoint& p : points) {
        const float xyz[3] = {static_cast<float>(p.x), static_cast<float>(p.y),
                              static_cast<float>(p.z)};
        out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
}

std::vector<RadarPoint> read_radar_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kRadarHeader) {
        throw std::runtime_error(path + ": expected header '" + kRadarHeader + "'");
    }

    std::vector<RadarPoint> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        RadarPoint p;
        char comma;
        double label;
        if (!(ss >> p.velocity >> comma >> p.depth >> comma >> p.azimuth >> comma >>
              p.altitude >> comma >> label)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad radar row");
        }
        p.location_label = static_cast<int>(label);
        points.push_back(p);
    }
    return points;
}

namespace {

void write_radar_rows(const std::vector<RadarRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << kRadarHeader << "\n";
    out.precision(17);
    for (const RadarRow& row : rows) {
        out << row[0] << "," << row[1] << "," << row[2] << "," << row[3] << "," << row[4]
            << "\n";
    }
}

}  // namespace

void write_radar_csv(const std::vector<RadarPoint>& points, const std::string& path) {
    std::vector<RadarRow> rows;
    rows.reserve(points.size());
    for (const RadarPoint& p : points) {
        rows.push_back({p.velocity, p.depth, p.azimuth, p.altitude,
                        static_cast<double>(p.location_label)});
    }
    write_radar_rows(rows, path);
}

void write_radar_matrix_csv(const RadarFeatureMatrix& matrix, const std::string& path) {
    write_radar_rows(matrix.rows, path);
}

}  // namespace odx
