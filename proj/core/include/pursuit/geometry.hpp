#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace pursuit {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(Vec2 v) { return dot(v, v); }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Rescales `v` so its length does not exceed `limit`.
Vec2 clamp_norm(Vec2 v, double limit);

/// Closed point-in-polygon test: points on an edge or vertex count as inside.
bool contains(std::span<const Vec2> polygon, Vec2 p);

/// Euclidean distance from `p` to the segment [a, b].
double segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Distance from `p` to the polygon's boundary (zero on the boundary).
double boundary_distance(std::span<const Vec2> polygon, Vec2 p);

/// True when no two non-adjacent edges touch and no adjacent edges overlap.
bool is_simple(std::span<const Vec2> polygon);

struct Box {
    Vec2 lo;
    Vec2 hi;
    bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

Box bounding_box(std::span<const Vec2> polygon);

}  // namespace pursuit
