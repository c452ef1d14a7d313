#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pursuit/checkpoint.hpp"
#include "pursuit/mlp.hpp"
#include "pursuit/rng.hpp"
#include "pursuit/scenario.hpp"

namespace pursuit {

inline constexpr Eigen::Index kActionDim = 2;

/// Where each robot's observation and action live inside the joint vectors.
struct JointLayout {
    std::vector<Eigen::Index> obs_offset;
    std::vector<Eigen::Index> obs_dim;
    std::vector<Eigen::Index> act_offset;
    Eigen::Index obs_total = 0;
    Eigen::Index act_total = 0;

    std::size_t robots() const { return obs_dim.size(); }
    Eigen::Index critic_input_dim() const { return obs_total + act_total; }
};

JointLayout make_layout(const Scenario& scenario);

/// One joint step: observations and actions are concatenated in roster order.
struct Transition {
    Eigen::VectorXd observations;
    Eigen::VectorXd actions;
    Eigen::VectorXd rewards;
    Eigen::VectorXd next_observations;
    bool terminal = false;
};

/// Column-per-sample view of a set of transitions.
struct Batch {
    Eigen::MatrixXd observations;
    Eigen::MatrixXd actions;
    Eigen::MatrixXd rewards;  // robots x batch
    Eigen::MatrixXd next_observations;
    Eigen::VectorXd terminal;  // 1.0 for terminal transitions

    Eigen::Index size() const { return observations.cols(); }
};

Batch make_batch(std::span<const Transition> transitions);

/// FIFO ring of transitions. Single writer.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, JointLayout layout);

    void store(const Transition& t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

    /// i-th oldest stored transition.
    Transition at(std::size_t i) const;

    /// Uniform draw with replacement.
    Batch sample(std::size_t batch_size, Rng& rng) const;

private:
    std::size_t capacity_;
    JointLayout layout_;
    Eigen::MatrixXd obs_;
    Eigen::MatrixXd act_;
    Eigen::MatrixXd rew_;
    Eigen::MatrixXd next_obs_;
    Eigen::VectorXd terminal_;
    std::size_t cursor_ = 0;
    std::size_t size_ = 0;
};

struct Agent {
    NetBundle nets;
    Optimizer policy_optimizer;
    Optimizer critic_optimizer;
    bool learns = true;
};

/// Per-robot policies (own observation -> action) and centralised critics
/// (all observations and actions -> value), with target copies.
struct AgentNets {
    JointLayout layout;
    std::vector<Agent> agents;
    double grad_clip = 0.0;
    double action_reg = 0.0;

    std::vector<NetBundle> bundles() const;
};

AgentNets make_agent_nets(const Scenario& scenario, Rng& rng);

/// Rebuilds learner state around loaded networks; fails on shape mismatch with the scenario.
AgentNets agent_nets_from(const Scenario& scenario, std::vector<NetBundle> bundles);

/// mu(o) + noise_scale * N(0, I), clamped to [-1, 1].
Eigen::VectorXd act(const Mlp& policy, const Eigen::VectorXd& observation, double noise_scale, Rng& rng);

/// a'_j = mu'_j(o'_j) for every robot, stacked in roster order.
Eigen::MatrixXd target_actions(const Batch& batch, const AgentNets& nets);

/// y = r_i + gamma (1 - terminal) Q'_i(s', a').
Eigen::VectorXd critic_targets(const Batch& batch, const AgentNets& nets, std::size_t robot, double gamma);

/// One step on mean (Q_i(s,a) - y)^2; returns the loss before the step.
double update_critic(AgentNets& nets, std::size_t robot, const Batch& batch, double gamma);
double update_critic(AgentNets& nets, std::size_t robot, const Batch& batch, const Eigen::VectorXd& targets);

/// Gradient of the batch-mean critic loss w.r.t. critic parameters (no step taken).
GradientSet critic_gradient(const AgentNets& nets, std::size_t robot, const Batch& batch,
                            const Eigen::VectorXd& targets, double* loss = nullptr);

/// One ascent step on mean Q_i(s, a_1..mu_i(o_i)..a_N) - action_reg * mean |z_i|^2, where
/// z_i is the policy's pre-squash output; returns the mean Q before the step.
double update_actor(AgentNets& nets, std::size_t robot, const Batch& batch);

/// Gradient of the batch-mean Q_i w.r.t. policy parameters (no step taken).
GradientSet actor_gradient(const AgentNets& nets, std::size_t robot, const Batch& batch, double* objective = nullptr);

struct StepDiagnostics {
    std::vector<double> critic_loss;
    std::vector<double> actor_objective;

    bool operator==(const StepDiagnostics&) const = default;
};

/// Samples one batch; for every learning robot updates critic then actor; then
/// soft-updates that robot's targets with tau.
StepDiagnostics train_step(AgentNets& nets, const ReplayBuffer& buffer, const TrainConfig& config, Rng& rng);

}  // namespace pursuit
