#include "pursuit/perception.hpp"

#include <algorithm>

#include "pursuit/errors.hpp"

namespace pursuit {

bool visible(const RobotSpec& observer, Vec2 observer_position, Vec2 target_position, const WorldMap& map,
             HiddenRule rule) {
    if (distance(observer_position, target_position) > observer.perception_radius) {
        return false;
    }
    if (rule == HiddenRule::TargetInside) {
        return !map.in_region(RegionKind::Hidden, target_position);
    }
    return !(observer.platform == Platform::Uav && map.in_region(RegionKind::Hidden, observer_position));
}

std::size_t observation_dim(const Scenario& scenario, std::size_t robot) {
    if (robot >= scenario.roster.size()) {
        throw LookupError("robot index out of range");
    }
    const std::size_t n = scenario.roster.size();
    std::size_t dim = kSelfSlots + kOtherSlots * (n - 1);
    if (scenario.roster[robot].team == Team::Criminal) {
        dim += scenario.map.sois.size();
    }
    return dim;
}

std::size_t observation_dim(const Scenario& scenario, const std::string& robot_id) {
    return observation_dim(scenario, scenario.index_of(robot_id));
}

ObservationVector build_observation(const Scenario& scenario, const JointState& world, std::size_t robot) {
    if (robot >= scenario.roster.size() || world.robots.size() != scenario.roster.size()) {
        throw LookupError("robot index out of range or world/roster size mismatch");
    }
    const RobotSpec& spec = scenario.roster[robot];
    const RobotState& self = world.robots[robot];

    ObservationVector obs;
    obs.reserve(observation_dim(scenario, robot));
    obs.insert(obs.end(), {self.position.x, self.position.y, self.velocity.x, self.velocity.y});

    for (std::size_t j = 0; j < world.robots.size(); ++j) {
        if (j == robot) continue;
        const RobotState& other = world.robots[j];
        const bool seen = other.active &&
                          visible(spec, self.position, other.position, scenario.map, scenario.perception.hidden_rule);
        if (!seen) {
            obs.insert(obs.end(), {0.0, 0.0, 0.0, 0.0, 0.0});
            continue;
        }
        const Vec2 d = other.position - self.position;
        const Vec2 dv = other.velocity - self.velocity;
        if (scenario.perception.scalar_distance) {
            obs.insert(obs.end(), {1.0, norm(d), 0.0, dv.x, dv.y});
        } else {
            obs.insert(obs.end(), {1.0, d.x, d.y, dv.x, dv.y});
        }
    }

    if (spec.team == Team::Criminal) {
        for (const Vec2 s : scenario.map.sois) {
            obs.push_back(distance(self.position, s));
        }
    }
    return obs;
}

ObservationVector build_observation(const Scenario& scenario, const JointState& world, const std::string& robot_id) {
    return build_observation(scenario, world, scenario.index_of(robot_id));
}

std::vector<double> observation_scale(const Scenario& scenario, std::size_t robot) {
    const double extent = std::max(scenario.map.width, scenario.map.height);
    double speed = 0.0;
    for (const auto& r : scenario.roster) speed = std::max(speed, r.v_max);

    std::vector<double> scale;
    scale.reserve(observation_dim(scenario, robot));
    scale.insert(scale.end(), {extent, extent, speed, speed});
    for (std::size_t j = 1; j < scenario.roster.size(); ++j) {
        scale.insert(scale.end(), {1.0, extent, extent, 2.0 * speed, 2.0 * speed});
    }
    if (scenario.roster[robot].team == Team::Criminal) {
        scale.insert(scale.end(), scenario.map.sois.size(), scenario.map.diagonal());
    }
    return scale;
}

}  // namespace pursuit
