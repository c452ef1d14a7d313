#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pursuit/robot.hpp"
#include "pursuit/world_map.hpp"

namespace pursuit {

struct EpisodeConfig {
    int horizon = 400;
    double dt = 0.1;
    double capture_distance = 1.0;  // also the SoI arrival distance
    int min_capturers = 2;
    bool sticky_capture = false;    // keep counting captures instead of removing the criminal
    double lawn_factor = 0.3;       // UGV speed multiplier inside LAWN
};

struct RewardConfig {
    double lambda_police = -0.1;
    double lambda_criminal = 0.1;
    double capture_bonus = 10.0;
    double soi_bonus = 10.0;
    double lawn_penalty = 0.5;
    double safety_penalty = 1.0;
    double edge_penalty = 1.0;
    double edge_margin = 0.5;
    bool arena_edge = false;         // also treat the arena boundary as a forbidden edge
    bool position_enabled = true;
};

enum class HiddenRule { TargetInside, ObserverInside };

struct PerceptionConfig {
    HiddenRule hidden_rule = HiddenRule::TargetInside;
    bool scalar_distance = false;  // store |d| instead of the displacement vector
};

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
    double gamma = 0.95;
    double lambda = 0.1;
    std::uint64_t seed = 0;
    int batch = 256;
    int capacity = 100000;
    double tau = 0.01;
    double lr_critic = 1e-3;
    double lr_policy = 1e-4;
    double noise_start = 0.3;
    double noise_end = 0.05;
    int episodes = 1000;
    bool learn_police = true;
    bool learn_criminal = true;
    std::vector<int> hidden = {64, 64};
    int update_every = 1;       // env steps between train steps
    int checkpoint_every = 0;   // episodes; 0 writes only the final checkpoint
    OptimizerKind optimizer = OptimizerKind::Sgd;
    double grad_clip = 0.0;     // global gradient-norm cap, 0 disables
    double action_reg = 0.0;    // weight of mean squared policy pre-activation, 0 disables
};

struct Scenario {
    WorldMap map;
    std::vector<RobotSpec> roster;
    EpisodeConfig episode;
    RewardConfig reward;
    PerceptionConfig perception;
    TrainConfig train;

    std::size_t index_of(const std::string& robot_id) const;
    std::size_t count(Team team) const;
};

/// Parses and validates a scenario document (JSON). Unknown keys are errors.
Scenario load_scenario(const std::string& source);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Checks every scenario invariant; throws ValidationError naming the rule.
void validate(const Scenario& scenario);

nlohmann::json to_json(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

/// Applies the no-proficiency baseline: zero position rewards and one shared
/// perception radius (the roster mean) for every robot.
Scenario ablate_proficiency(Scenario scenario);

}  // namespace pursuit
