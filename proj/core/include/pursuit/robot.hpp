#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pursuit {

enum class Team { Police, Criminal };
enum class Platform { Uav, Ugv };

std::string_view to_string(Team team);
std::string_view to_string(Platform platform);

/// Capability profile of one robot.
///
/// For UAVs `a_max` is an acceleration bound in m/s^2. For UGVs it is the
/// per-step bound on the change of the linear velocity command, and
/// `w_delta` is the same bound for the angular command.
struct RobotSpec {
    std::string id;
    Team team = Team::Police;
    Platform platform = Platform::Uav;
    double v_max = 1.0;
    double a_max = 1.0;
    double perception_radius = 15.0;
    double safe_radius = 0.5;
    double w_max = 1.0;    // rad/s, UGV only
    double w_delta = 0.1;  // rad/s per step, UGV only
    std::string model;     // preset name the spec was built from, if any

    bool operator==(const RobotSpec&) const = default;
};

/// Canonical vehicle parameters: firefly (5, 1, 30), iris (7, 2, 30), husky (1, 0.1, 15).
std::optional<RobotSpec> preset(std::string_view model);

}  // namespace pursuit
