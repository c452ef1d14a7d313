#include "pursuit/geometry.hpp"

#include <algorithm>
#include <limits>

namespace pursuit {

Vec2 clamp_norm(Vec2 v, double limit) {
    const double n = norm(v);
    if (n <= limit || n == 0.0) {
        return v;
    }
    return v * (limit / n);
}

namespace {

bool on_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const Vec2 ap = p - a;
    const double scale = std::max({std::abs(ab.x), std::abs(ab.y), 1.0});
    if (std::abs(cross(ab, ap)) > 1e-12 * scale * scale) {
        return false;
    }
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
           p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool segments_touch(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    return (o1 == 0 && on_segment(q1, p1, p2)) || (o2 == 0 && on_segment(q2, p1, p2)) ||
           (o3 == 0 && on_segment(p1, q1, q2)) || (o4 == 0 && on_segment(p2, q1, q2));
}

}  // namespace

bool contains(std::span<const Vec2> polygon, Vec2 p) {
    const std::size_t n = polygon.size();
    if (n < 3) {
        return false;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = polygon[i];
        const Vec2 b = polygon[j];
        if (on_segment(p, a, b)) {
            return true;
        }
        // Half-open rule on y so shared vertices are counted once.
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross) {
                inside = !inside;
            }
        }
    }
    return inside;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = squared_norm(ab);
    if (len2 == 0.0) {
        return distance(p, a);
    }
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

double boundary_distance(std::span<const Vec2> polygon, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        best = std::min(best, segment_distance(p, polygon[j], polygon[i]));
    }
    return best;
}

bool is_simple(std::span<const Vec2> polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (polygon[i] == polygon[(i + 1) % n]) {
            return false;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a1 = polygon[i];
        const Vec2 a2 = polygon[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec2 b1 = polygon[j];
            const Vec2 b2 = polygon[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                // Adjacent edges share one vertex; they must not fold back onto each other.
                const Vec2 shared = (j == i + 1) ? a2 : a1;
                const Vec2 u = (j == i + 1) ? a1 : a2;
                const Vec2 w = (j == i + 1) ? b2 : b1;
                if (orientation(u, shared, w) == 0 && dot(u - shared, w - shared) > 0.0) {
                    return false;
                }
                continue;
            }
            if (segments_touch(a1, a2, b1, b2)) {
                return false;
            }
        }
    }
    return true;
}

Box bounding_box(std::span<const Vec2> polygon) {
    Box box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
            {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const Vec2 v : polygon) {
        box.lo.x = std::min(box.lo.x, v.x);
        box.lo.y = std::min(box.lo.y, v.y);
        box.hi.x = std::max(box.hi.x, v.x);
        box.hi.y = std::max(box.hi.y, v.y);
    }
    return box;
}

}  // namespace pursuit
