#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pursuit/learner.hpp"
#include "pursuit/objective.hpp"
#include "pursuit/perception.hpp"
#include "pursuit/scenario.hpp"
#include "pursuit/state.hpp"

namespace pursuit {

/// Supplies one robot's action from that robot's own observation only.
class ActionSource {
public:
    virtual ~ActionSource() = default;

    /// `raw` is the observation in physical units, `scaled` the network input.
    /// Returned actions are in [-1, 1]^2.
    virtual Eigen::VectorXd action(std::size_t robot, const ObservationVector& raw, const Eigen::VectorXd& scaled,
                                   Rng& rng) = 0;
};

/// Decentralised execution of learned policies.
class NetworkPolicies final : public ActionSource {
public:
    NetworkPolicies(const AgentNets& nets, double noise_scale) : nets_(nets), noise_(noise_scale) {}

    Eigen::VectorXd action(std::size_t robot, const ObservationVector& raw, const Eigen::VectorXd& scaled,
                           Rng& rng) override;

    void set_noise(double noise_scale) { noise_ = noise_scale; }

private:
    const AgentNets& nets_;
    double noise_;
};

/// Adapter for scripted controllers.
class FunctionPolicies final : public ActionSource {
public:
    using Fn = std::function<Eigen::VectorXd(std::size_t robot, const ObservationVector& raw)>;

    explicit FunctionPolicies(Fn fn) : fn_(std::move(fn)) {}

    Eigen::VectorXd action(std::size_t robot, const ObservationVector& raw, const Eigen::VectorXd&, Rng&) override {
        return fn_(robot, raw);
    }

private:
    Fn fn_;
};

/// Start state: police on stations, criminals on fixed starts or sampled free ground.
JointState initial_state(const Scenario& scenario, Rng& rng);

/// State transition for one step of normalised joint actions (pure).
JointState apply_actions(const Scenario& scenario, const JointState& state, std::span<const Eigen::VectorXd> actions);

/// Robots in a same-team pair with h_ij <= 0 (rho = larger of the team's safe radii).
std::vector<bool> unsafe_robots(const Scenario& scenario, const JointState& state);

struct CaptureRecord {
    int step = 0;
    std::size_t criminal = 0;
    std::vector<std::size_t> capturers;

    bool operator==(const CaptureRecord&) const = default;
};

struct ArrivalRecord {
    int step = 0;
    std::size_t criminal = 0;
    std::size_t soi = 0;

    bool operator==(const ArrivalRecord&) const = default;
};

struct EpisodeResult {
    std::vector<double> returns;  // undiscounted, per robot
    std::vector<CaptureRecord> capture_events;
    std::vector<ArrivalRecord> arrival_events;
    bool success = false;
    int steps_used = 0;
    int safety_violations = 0;  // robot-steps penalised for unsafe spacing

    bool operator==(const EpisodeResult&) const = default;
};

/// Called with every transition when rolling out for learning.
using TransitionSink = std::function<void(const Transition&)>;

EpisodeResult run_episode(const Scenario& scenario, ActionSource& policies, Rng& rng,
                          const TransitionSink& sink = nullptr);

struct Metrics {
    double mean_episode_reward = 0.0;   // all robots
    double mean_police_reward = 0.0;
    double mean_criminal_reward = 0.0;
    double task_success_rate = 0.0;
    std::vector<double> capture_engagement_rate;  // per robot
    bool no_captures = false;           // engagement rates are 0 because nothing was captured
    std::size_t episodes = 0;
    std::size_t capture_events = 0;
    double success_ci_half_width = 0.0; // across seeds
    double reward_ci_half_width = 0.0;
    std::vector<double> seed_success_rates;
    std::vector<double> seed_mean_rewards;
};

/// Aggregates episode results grouped by seed.
Metrics aggregate(const Scenario& scenario, const std::vector<std::vector<EpisodeResult>>& per_seed);

/// Noise-free, learning-free rollouts: `episodes` per seed.
Metrics evaluate(const Scenario& scenario, const AgentNets& nets, std::size_t episodes,
                 std::span<const std::uint64_t> seeds, unsigned threads = 1);

struct EpisodeRow {
    int episode = 0;
    double mean_reward = 0.0;
    double police_reward = 0.0;
    double criminal_reward = 0.0;
    double noise = 0.0;
    EpisodeResult result;
};

struct TrainingReport {
    std::vector<EpisodeRow> rows;
    double wall_clock_seconds = 0.0;
    std::size_t train_steps = 0;
};

struct TrainHooks {
    std::function<void(const EpisodeRow&)> on_episode;
    std::optional<std::filesystem::path> checkpoint;  // written at cadence and at the end
};

/// Episode/learn loop. On divergence the last checkpoint written stays in place
/// and the DivergenceError propagates.
TrainingReport train(const Scenario& scenario, const TrainHooks& hooks = {}, AgentNets* nets_out = nullptr);

}  // namespace pursuit
