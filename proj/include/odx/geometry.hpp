#ifndef ODX_GEOMETRY_HPP_
#define ODX_GEOMETRY_HPP_

#include <cmath>

namespace odx {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    Vec2 operator/(double k) const { return {x / k, y / k}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }

    Vec2 rotated(double angle) const {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }
};

inline Vec2 operator*(double k, const Vec2& v) { return v * k; }

// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

struct Pose2 {
    Vec2 position;
    double heading = 0.0;  // radians, CCW from +x

    // Expresses a world-frame point in this pose's local frame
    // (pose at origin, heading along +x).
    Vec2 world_to_local(const Vec2& world) const {
        return (world - position).rotated(-heading);
    }

    Vec2 local_to_world(const Vec2& local) const {
        return position + local.rotated(heading);
    }

    Vec2 forward() const { return {std::cos(heading), std::sin(heading)}; }
    Vec2 left() const { return {-std::sin(heading), std::cos(heading)}; }
};

}  // namespace odx

#endif  // ODX_GEOMETRY_HPP_
