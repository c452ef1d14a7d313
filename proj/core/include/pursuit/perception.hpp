#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pursuit/scenario.hpp"
#include "pursuit/state.hpp"

namespace pursuit {

/// Layout: [own position (2), own velocity (2)]
///         + per other robot in roster order [flag, displacement (2), relative velocity (2)]
///         + criminals only: per SoI [distance].
using ObservationVector = std::vector<double>;

/// Range and hidden-region mask. Under `HiddenRule::TargetInside` a target
/// inside any HIDDEN polygon is unobservable; under `ObserverInside` a UAV
/// observer above a HIDDEN polygon sees nothing.
bool visible(const RobotSpec& observer, Vec2 observer_position, Vec2 target_position, const WorldMap& map,
             HiddenRule rule = HiddenRule::TargetInside);

ObservationVector build_observation(const Scenario& scenario, const JointState& world, std::size_t robot);
ObservationVector build_observation(const Scenario& scenario, const JointState& world, const std::string& robot_id);

std::size_t observation_dim(const Scenario& scenario, std::size_t robot);
std::size_t observation_dim(const Scenario& scenario, const std::string& robot_id);

/// Per-entry divisors that bring an observation to roughly unit scale before
/// it reaches a network (arena extent for positions, top speed for velocities).
std::vector<double> observation_scale(const Scenario& scenario, std::size_t robot);

constexpr std::size_t kSelfSlots = 4;
constexpr std::size_t kOtherSlots = 5;

}  // namespace pursuit
