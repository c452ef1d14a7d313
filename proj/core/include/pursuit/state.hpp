#pragma once

#include <vector>

#include "pursuit/geometry.hpp"
#include "pursuit/motion.hpp"

namespace pursuit {

/// Kinematic state of one robot. UAVs use position/velocity; UGVs additionally
/// carry heading and their current command, with `velocity` holding the
/// realised planar velocity of the last step.
struct RobotState {
    Vec2 position;
    Vec2 velocity;
    double heading = 0.0;
    double v_lin = 0.0;
    double v_ang = 0.0;
    bool active = true;  // false once a criminal has been removed by capture

    UavState uav() const { return {position, velocity}; }
    UgvState ugv() const { return {position, heading, v_lin, v_ang}; }

    bool operator==(const RobotState&) const = default;
};

/// Full world state, indexed by roster order.
struct JointState {
    std::vector<RobotState> robots;
    int step = 0;

    bool operator==(const JointState&) const = default;
};

}  // namespace pursuit
