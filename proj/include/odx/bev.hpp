#ifndef ODX_BEV_HPP_
#define ODX_BEV_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "odx/geometry.hpp"

namespace odx {

// Ego-centric metric window for a grid. x is ego-forward, y is ego-left.
// Pixel (row, col) covers x in [x_max - (row+1)*mpp, x_max - row*mpp) and
// y in [y_max - (col+1)*mpp, y_max - col*mpp): the front of the window is
// the top image row and the vehicle's left is the left image column.
struct BevGridConfig {
    int width_px = 256;
    int height_px = 256;
    double meters_per_pixel = 0.0;
    double x_max = 0.0;  // forward extent
    double y_max = 0.0;  // left extent

    double x_min() const { return x_max - height_px * meters_per_pixel; }
    double y_min() const { return y_max - width_px * meters_per_pixel; }
};

// Uniform 2D grid over an ego-centric metric window, one or more channels,
// non-negative cells. Data is row-major per channel.
class BevGrid {
public:
    BevGrid(BevGridConfig config, int channels);

    const BevGridConfig& config() const { return config_; }
    int channels() const { return channels_; }
    int width() const { return config_.width_px; }
    int height() const { return config_.height_px; }

    float& at(int channel, int row, int col);
    float at(int channel, int row, int col) const;

    // Maps an ego-frame point to (row, col); false when outside the window.
    bool cell_of(const Vec2& point, int& row, int& col) const;

    double channel_sum(int channel) const;
    const std::vector<float>& data() const { return data_; }

private:
    BevGridConfig config_;
    int channels_;
    std::vector<float> data_;
};

// Single-channel 8-bit portable graymap (P5), cells scaled so the channel
// max maps to 255.
void write_pgm(const BevGrid& grid, int channel, const std::string& path);

// Binary tensor dump: 8-byte magic "BEVG0001", then little-endian uint32
// channels/height/width, then row-major float32 data.
void write_bev_tensor(const BevGrid& grid, const std::string& path);
BevGrid read_bev_tensor(const std::string& path);

}  // namespace odx

#endif  // ODX_BEV_HPP_
