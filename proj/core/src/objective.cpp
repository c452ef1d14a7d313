#include "pursuit/objective.hpp"

#include <algorithm>
#include <limits>

#include "pursuit/errors.hpp"
#include "pursuit/perception.hpp"

namespace pursuit {

double shaping_reward(Vec2 self_position, std::span<const Vec2> visible_opponents, double lambda,
                      double fallback_distance) {
    if (lambda == 0.0) {
        return 0.0;
    }
    double nearest = std::numeric_limits<double>::infinity();
    for (const Vec2 o : visible_opponents) {
        nearest = std::min(nearest, distance(self_position, o));
    }
    if (visible_opponents.empty()) {
        nearest = fallback_distance;
    }
    return lambda * nearest;
}

double position_reward(const WorldMap& map, Platform platform, Vec2 position, const RewardConfig& config) {
    if (!config.position_enabled) {
        return 0.0;
    }
    double reward = 0.0;
    if (platform == Platform::Ugv && map.in_region(RegionKind::Lawn, position)) {
        reward -= config.lawn_penalty;
    }
    if (config.arena_edge) {
        const double to_wall =
            std::min({position.x, map.width - position.x, position.y, map.height - position.y});
        if (to_wall <= config.edge_margin) return reward - config.edge_penalty;
    }
    const RegionKind forbidden = platform == Platform::Uav ? RegionKind::NoFly : RegionKind::Building;
    for (const auto& r : map.regions) {
        if (r.kind != forbidden) continue;
        if (boundary_distance(r.polygon, position) <= config.edge_margin || contains(r.polygon, position)) {
            reward -= config.edge_penalty;
            break;
        }
    }
    return reward;
}

std::optional<std::vector<std::string>> check_capture(Vec2 criminal, std::span<const TaggedPosition> police,
                                                      double capture_distance, int min_capturers) {
    std::vector<std::string> capturers;
    for (const auto& p : police) {
        if (distance(p.position, criminal) <= capture_distance) {
            capturers.push_back(p.id);
        }
    }
    if (static_cast<int>(capturers.size()) < min_capturers) {
        return std::nullopt;
    }
    return capturers;
}

std::optional<std::size_t> check_soi_arrival(Vec2 criminal, std::span<const Vec2> sois, double arrival_distance) {
    for (std::size_t k = 0; k < sois.size(); ++k) {
        if (distance(criminal, sois[k]) <= arrival_distance) {
            return k;
        }
    }
    return std::nullopt;
}

double discounted_return(std::span<const double> rewards, double gamma) {
    double total = 0.0;
    double weight = 1.0;
    for (const double r : rewards) {
        total += weight * r;
        weight *= gamma;
    }
    return total;
}

StepOutcome evaluate_step(const Scenario& scenario, const JointState& world) {
    StepOutcome outcome;
    const auto& roster = scenario.roster;
    const double d = scenario.episode.capture_distance;

    std::vector<TaggedPosition> police;
    std::vector<std::size_t> police_index;
    for (std::size_t i = 0; i < roster.size(); ++i) {
        if (roster[i].team == Team::Police) {
            police.push_back({roster[i].id, world.robots[i].position});
            police_index.push_back(i);
        }
    }

    for (std::size_t c = 0; c < roster.size(); ++c) {
        if (roster[c].team != Team::Criminal || !world.robots[c].active) continue;
        const Vec2 pos = world.robots[c].position;
        if (auto ids = check_capture(pos, police, d, scenario.episode.min_capturers)) {
            CaptureEvent ev{c, {}};
            for (std::size_t k = 0; k < police.size(); ++k) {
                if (std::find(ids->begin(), ids->end(), police[k].id) != ids->end()) {
                    ev.capturers.push_back(police_index[k]);
                }
            }
            outcome.captures.push_back(std::move(ev));
            continue;
        }
        if (auto soi = check_soi_arrival(pos, scenario.map.sois, d)) {
            outcome.arrivals.push_back({c, *soi});
        }
    }

    if (!outcome.arrivals.empty()) {
        outcome.terminal = true;
    } else if (!scenario.episode.sticky_capture) {
        bool any_left = false;
        for (std::size_t c = 0; c < roster.size(); ++c) {
            if (roster[c].team != Team::Criminal || !world.robots[c].active) continue;
            const bool captured = std::any_of(outcome.captures.begin(), outcome.captures.end(),
                                              [c](const CaptureEvent& e) { return e.criminal == c; });
            any_left = any_left || !captured;
        }
        outcome.terminal = !any_left;
    }
    return outcome;
}

std::vector<RewardBreakdown> step_rewards(const Scenario& scenario, const JointState& world,
                                          const StepOutcome& outcome, const std::vector<bool>& unsafe) {
    const auto& roster = scenario.roster;
    const auto& cfg = scenario.reward;
    const std::size_t n = roster.size();
    if (world.robots.size() != n || unsafe.size() != n) {
        throw ShapeError("step_rewards: world/roster/safety size mismatch");
    }
    std::vector<RewardBreakdown> out(n);
    const double fallback = scenario.map.diagonal();

    std::vector<Vec2> opponents;
    for (std::size_t i = 0; i < n; ++i) {
        if (!world.robots[i].active) continue;
        const RobotSpec& spec = roster[i];
        const Vec2 self = world.robots[i].position;
        opponents.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (roster[j].team == spec.team || !world.robots[j].active) continue;
            if (visible(spec, self, world.robots[j].position, scenario.map, scenario.perception.hidden_rule)) {
                opponents.push_back(world.robots[j].position);
            }
        }
        const double lambda = spec.team == Team::Police ? cfg.lambda_police : cfg.lambda_criminal;
        out[i].shaping = shaping_reward(self, opponents, lambda, fallback);
        out[i].position = position_reward(scenario.map, spec.platform, self, cfg);
        if (unsafe[i]) out[i].safety = -cfg.safety_penalty;
    }

    for (const auto& ev : outcome.captures) {
        for (const std::size_t p : ev.capturers) out[p].events += cfg.capture_bonus;
        out[ev.criminal].events -= cfg.capture_bonus;
    }
    for (const auto& ev : outcome.arrivals) {
        out[ev.criminal].events += cfg.soi_bonus;
        for (std::size_t i = 0; i < n; ++i) {
            if (roster[i].team == Team::Police) out[i].events -= cfg.soi_bonus;
        }
    }

    for (auto& r : out) {
        r.objective_part = r.shaping + r.events;
        r.position_part = r.position + r.safety;
        r.total = r.objective_part + r.position_part;
    }
    return out;
}

}  // namespace pursuit
