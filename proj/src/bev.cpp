#include "odx/bev.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace odx {

namespace {

constexpr char kMagic[8] = {'B', 'E', 'V', 'G', '0', '0', '0', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
    char buf[4];
    buf[0] = static_cast<char>(v & 0xff);
    buf[1] = static_cast<char>((v >> 8) & 0xff);
    buf[2] = static_cast<char>((v >> 16) & 0xff);
    buf[3] = static_cast<char>((v >> 24) & 0xff);
    out.write(buf, 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) |
           (static_cast<std::uint32_t>(buf[3]) << 24);
}

}  // namespace

BevGrid::BevGrid(BevGridConfig config, int channels)
    : config_(config), channels_(channels) {
    if (config_.width_px <= 0 || config_.height_px <= 0) {
        throw std::invalid_argument("grid dimensions must be positive");
    }
    if (!(config_.meters_per_pixel > 0.0)) {
        throw std::invalid_argument("meters_per_pixel must be positive");
    }
    if (channels_ < 1) throw std::invalid_argument("grid needs at least one channel");
    data_.assign(static_cast<std::size_t>(channels_) * config_.height_px * config_.width_px,
                 0.0f);
}

float& BevGrid::at(int channel, int row, int col) {
    return data_[(static_cast<std::size_t>(channel) * config_.height_px + row) *
                     config_.width_px +
                 col];
}

float BevGrid::at(int channel, int row, int col) const {
    return data_[(static_cast<std::size_t>(channel) * config_.height_px + row) *
                     config_.width_px +
                 col];
}

bool BevGrid::cell_of(const Vec2& point, int& row, int& col) const {
    const double r = (config_.x_max - point.x) / config_.meters_per_pixel;
    const double c = (config_.y_max - point.y) / config_.meters_per_pixel;
    if (r < 0.0 || c < 0.0) return false;
    const int ri = static_cast<int>(r);
    const int ci = static_cast<int>(c);
    if (ri >= config_.height_px || ci >= config_.width_px) return false;
    row = ri;
    col = ci;
    return true;
}

double BevGrid::channel_sum(int channel) const {
    double total = 0.0;
    const std::size_t plane = static_cast<std::size_t>(config_.height_px) * config_.width_px;
    const std::size_t base = static_cast<std::size_t>(channel) * plane;
    for (std::size_t i = 0; i < plane; ++i) total += data_[base + i];
    return total;
}

void write_pgm(const BevGrid& grid, int channel, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << grid.width() << " " << grid.height() << "\n255\n";

    float max_value = 0.0f;
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c) {
            max_value = std::max(max_value, grid.at(channel, r, c));
        }
    }
    const float scale = max_value > 0.0f ? 255.0f / max_value : 0.0f;
    std::vector<unsigned char> row(static_cast<std::size_t>(grid.width()));
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c) {
            const float v = grid.at(channel, r, c) * scale;
            row[static_cast<std::size_t>(c)] =
                static_cast<unsigned char>(std::clamp(v, 0.0f, 255.0f));
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
}

void write_bev_tensor(const BevGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, static_cast<std::uint32_t>(grid.channels()));
    put_u32(out, static_cast<std::uint32_t>(grid.height()));
    put_u32(out, static_cast<std::uint32_t>(grid.width()));
    for (float v : grid.data()) {
        static_assert(sizeof(float) == 4);
        char buf[4];
        std::memcpy(buf, &v, 4);
        out.write(buf, 4);
    }
}

BevGrid read_bev_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error(path + " is not a BEVG0001 tensor");
    }
    const std::uint32_t channels = get_u32(in);
    const std::uint32_t height = get_u32(in);
    const std::uint32_t width = get_u32(in);
    if (!in || channels == 0 || height == 0 || width == 0) {
        throw std::runtime_error(path + " has a bad tensor header");
    }

    // The dump carries no metric metadata; reconstruct with a unit window.
    BevGridConfig config;
    config.width_px = static_cast<int>(width);
    config.height_px = static_cast<int>(height);
    config.meters_per_pixel = 1.0;
    config.x_max = height / 2.0;
    config.y_max = width / 2.0;
    BevGrid grid(config, static_cast<int>(channels));

    std::vector<char> raw(static_cast<std::size_t>(channels) * height * width * 4);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!in) throw std::runtime_error(path + " tensor data is truncated");
    for (std::uint32_t ch = 0; ch < channels; ++ch) {
        for (std::uint32_t r = 0; r < height; ++r) {
            for (std::uint32_t c = 0; c < width; ++c) {
                const std::size_t i =
                    ((static_cast<std::size_t>(ch) * height + r) * width + c) * 4;
                float v;
                std::memcpy(&v, raw.data() + i, 4);
                grid.at(static_cast<int>(ch), static_cast<int>(r), static_cast<int>(c)) = v;
            }
        }
    }
    return grid;
}

}  // namespace odx
