#pragma once

#include <span>
#include <string>
#include <vector>

#include "pursuit/geometry.hpp"
#include "pursuit/robot.hpp"
#include "pursuit/world_map.hpp"

namespace pursuit {

struct UavState {
    Vec2 position;
    Vec2 velocity;
};

struct UgvState {
    Vec2 position;
    double heading = 0.0;  // radians in (-pi, pi]
    double v_lin = 0.0;
    double v_ang = 0.0;
};

struct UgvCommand {
    double v_lin = 0.0;
    double v_ang = 0.0;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);

/// Constant-acceleration step: x' = x + v dt + a/2 dt^2, v' = v + a dt.
/// The acceleration is first limited to |a| <= a_max and the new velocity to |v'| <= v_max.
UavState integrate_uav(const UavState& state, Vec2 accel, double dt, const RobotSpec& spec);

/// Limits a requested command to within +-a_max (linear) / +-w_delta (angular) of the
/// current command, intersected with the absolute bounds +-v_max / +-w_max.
UgvCommand clamp_ugv_command(const UgvState& current, UgvCommand requested, const RobotSpec& spec);

/// Unicycle step with the heading updated before the displacement.
UgvState integrate_ugv(const UgvState& state, UgvCommand cmd, double dt, double terrain_factor);

struct SafetyPair {
    std::string first;
    std::string second;
    double h = 0.0;  // |x_i - x_j|^2 - rho^2
};

struct SafetyReport {
    std::vector<SafetyPair> pairs;
    bool all_safe = true;
};

struct TaggedPosition {
    std::string id;
    Vec2 position;
};

/// Safety margins over every unordered pair of the given (same-team) robots.
SafetyReport pairwise_safety(std::span<const TaggedPosition> positions, double rho);

/// Returns `previous` when `proposed` leaves the arena or enters a region the
/// platform may not occupy (NOFLY for UAVs, BUILDING for UGVs).
Vec2 resolve_position(const WorldMap& map, Platform platform, Vec2 proposed, Vec2 previous);

bool position_allowed(const WorldMap& map, Platform platform, Vec2 p);

}  // namespace pursuit
