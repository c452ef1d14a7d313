#include "pursuit/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pursuit/errors.hpp"

namespace pursuit {

double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return theta - two_pi * std::ceil((theta - std::numbers::pi) / two_pi);
}

UavState integrate_uav(const UavState& state, Vec2 accel, double dt, const RobotSpec& spec) {
    if (!is_finite(state.position) || !is_finite(state.velocity) || !is_finite(accel) || !std::isfinite(dt)) {
        throw NumericError("integrate_uav: non-finite input");
    }
    if (dt <= 0.0) {
        throw NumericError("integrate_uav: dt must be positive");
    }
    const Vec2 a = clamp_norm(accel, spec.a_max);
    UavState next;
    next.position.x = state.position.x + state.velocity.x * dt + a.x / 2.0 * dt * dt;
    next.position.y = state.position.y + state.velocity.y * dt + a.y / 2.0 * dt * dt;
    next.velocity = clamp_norm(state.velocity + a * dt, spec.v_max);
    return next;
}

UgvCommand clamp_ugv_command(const UgvState& current, UgvCommand requested, const RobotSpec& spec) {
    auto bound = [](double value, double centre, double delta, double limit) {
        const double lo = std::max(centre - delta, -limit);
        const double hi = std::min(centre + delta, limit);
        // An out-of-bounds current command still moves toward the admissible range.
        if (lo > hi) {
            return centre > 0.0 ? hi : lo;
        }
        return std::clamp(value, lo, hi);
    };
    return {bound(requested.v_lin, current.v_lin, spec.a_max, spec.v_max),
            bound(requested.v_ang, current.v_ang, spec.w_delta, spec.w_max)};
}

UgvState integrate_ugv(const UgvState& state, UgvCommand cmd, double dt, double terrain_factor) {
    if (!is_finite(state.position) || !std::isfinite(state.heading) || !std::isfinite(cmd.v_lin) ||
        !std::isfinite(cmd.v_ang) || !std::isfinite(dt) || !std::isfinite(terrain_factor)) {
        throw NumericError("integrate_ugv: non-finite input");
    }
    if (dt <= 0.0) {
        throw NumericError("integrate_ugv: dt must be positive");
    }
    UgvState next;
    next.v_lin = cmd.v_lin;
    next.v_ang = cmd.v_ang;
    next.heading = wrap_angle(state.heading + cmd.v_ang * dt);
    const double step = terrain_factor * cmd.v_lin * dt;
    next.position = state.position + Vec2{std::cos(next.heading), std::sin(next.heading)} * step;
    return next;
}

SafetyReport pairwise_safety(std::span<const TaggedPosition> positions, double rho) {
    SafetyReport report;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            const double h = squared_norm(positions[i].position - positions[j].position) - rho * rho;
            report.pairs.push_back({positions[i].id, positions[j].id, h});
            if (!(h > 0.0)) {
                report.all_safe = false;
            }
        }
    }
    return report;
}

bool position_allowed(const WorldMap& map, Platform platform, Vec2 p) {
    if (!is_finite(p) || !map.in_arena(p)) {
        return false;
    }
    const RegionKind forbidden = platform == Platform::Uav ? RegionKind::NoFly : RegionKind::Building;
    return !map.in_region(forbidden, p);
}

Vec2 resolve_position(const WorldMap& map, Platform platform, Vec2 proposed, Vec2 previous) {
    return position_allowed(map, platform, proposed) ? proposed : previous;
}

}  // namespace pursuit
