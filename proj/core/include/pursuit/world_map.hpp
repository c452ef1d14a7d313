#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pursuit/geometry.hpp"
#include "pursuit/rng.hpp"

namespace pursuit {

enum class RegionKind : std::uint8_t { Hidden = 0, NoFly = 1, Building = 2, Lawn = 3 };

std::string_view to_string(RegionKind kind);

struct Region {
    RegionKind kind = RegionKind::Building;
    std::vector<Vec2> polygon;
};

/// Small set of region kinds.
class RegionSet {
public:
    constexpr RegionSet() = default;
    constexpr RegionSet(std::initializer_list<RegionKind> kinds) {
        for (auto k : kinds) insert(k);
    }
    constexpr void insert(RegionKind k) { bits_ |= bit(k); }
    constexpr bool has(RegionKind k) const { return (bits_ & bit(k)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool operator==(const RegionSet&) const = default;

private:
    static constexpr std::uint8_t bit(RegionKind k) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
    std::uint8_t bits_ = 0;
};

enum class ClassifyMode { Air, Ground };

/// Static arena geometry in the internal frame [0,width] x [0,height].
///
/// `origin` is the configured-frame coordinate of the internal (0,0) corner;
/// configured point p maps to p - origin.
struct WorldMap {
    double width = 0.0;
    double height = 0.0;
    Vec2 origin;
    std::vector<Region> regions;
    std::vector<Vec2> sois;
    std::vector<Vec2> stations;
    std::vector<Vec2> criminal_starts;  // optional fixed spawn points

    bool in_arena(Vec2 p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
    bool in_region(RegionKind kind, Vec2 p) const;
    double diagonal() const { return std::hypot(width, height); }
    Vec2 to_internal(Vec2 configured) const { return configured - origin; }
    Vec2 to_configured(Vec2 internal) const { return internal + origin; }
};

/// AIR reports NOFLY membership; GROUND reports BUILDING, LAWN and HIDDEN membership.
RegionSet classify_point(const WorldMap& map, Vec2 p, ClassifyMode mode);

/// Uniform draw over the arena, rejecting BUILDING interiors (1000 tries).
Vec2 sample_criminal_start(const WorldMap& map, Rng& rng);

double nearest_soi_distance(const WorldMap& map, Vec2 p);

}  // namespace pursuit
