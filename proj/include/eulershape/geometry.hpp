#pragma once

#include <cmath>

namespace eulershape {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Unit vector at angle theta (radians, counterclockwise from +x).
inline Vec2 direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Rotate counterclockwise by theta about the origin.
inline Vec2 rotate(Vec2 p, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

}  // namespace eulershape
