#include "pursuit/world_map.hpp"

#include <limits>

#include "pursuit/errors.hpp"

namespace pursuit {

bool WorldMap::in_region(RegionKind kind, Vec2 p) const {
    for (const auto& r : regions) {
        if (r.kind == kind && contains(r.polygon, p)) {
            return true;
        }
    }
    return false;
}

RegionSet classify_point(const WorldMap& map, Vec2 p, ClassifyMode mode) {
    RegionSet out;
    for (const auto& r : map.regions) {
        const bool relevant = mode == ClassifyMode::Air ? r.kind == RegionKind::NoFly : r.kind != RegionKind::NoFly;
        if (relevant && !out.has(r.kind) && contains(r.polygon, p)) {
            out.insert(r.kind);
        }
    }
    return out;
}

Vec2 sample_criminal_start(const WorldMap& map, Rng& rng) {
    constexpr int kMaxTries = 1000;
    for (int i = 0; i < kMaxTries; ++i) {
        const Vec2 p{uniform(rng, 0.0, map.width), uniform(rng, 0.0, map.height)};
        if (!map.in_region(RegionKind::Building, p)) {
            return p;
        }
    }
    throw DegenerateMapError("no free ground found after 1000 samples");
}

double nearest_soi_distance(const WorldMap& map, Vec2 p) {
    if (map.sois.empty()) {
        throw MissingTargetError("map has no spots of interest");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2 s : map.sois) {
        best = std::min(best, distance(p, s));
    }
    return best;
}

}  // namespace pursuit
