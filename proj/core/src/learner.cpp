#include "pursuit/learner.hpp"

#include <cmath>

#include "pursuit/errors.hpp"
#include "pursuit/perception.hpp"

namespace pursuit {

JointLayout make_layout(const Scenario& scenario) {
    JointLayout layout;
    for (std::size_t i = 0; i < scenario.roster.size(); ++i) {
        const auto dim = static_cast<Eigen::Index>(observation_dim(scenario, i));
        layout.obs_offset.push_back(layout.obs_total);
        layout.obs_dim.push_back(dim);
        layout.act_offset.push_back(layout.act_total);
        layout.obs_total += dim;
        layout.act_total += kActionDim;
    }
    return layout;
}

Batch make_batch(std::span<const Transition> transitions) {
    if (transitions.empty()) {
        throw PreconditionError("make_batch: empty transition list");
    }
    const auto n = static_cast<Eigen::Index>(transitions.size());
    const auto& first = transitions.front();
    Batch b;
    b.observations.resize(first.observations.size(), n);
    b.actions.resize(first.actions.size(), n);
    b.rewards.resize(first.rewards.size(), n);
    b.next_observations.resize(first.next_observations.size(), n);
    b.terminal.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& t = transitions[static_cast<std::size_t>(k)];
        if (t.observations.size() != b.observations.rows() || t.actions.size() != b.actions.rows() ||
            t.rewards.size() != b.rewards.rows() || t.next_observations.size() != b.next_observations.rows()) {
            throw ShapeError("make_batch: inconsistent transition shapes");
        }
        b.observations.col(k) = t.observations;
        b.actions.col(k) = t.actions;
        b.rewards.col(k) = t.rewards;
        b.next_observations.col(k) = t.next_observations;
        b.terminal(k) = t.terminal ? 1.0 : 0.0;
    }
    return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, JointLayout layout)
    : capacity_(capacity), layout_(std::move(layout)) {
    if (capacity_ == 0) {
        throw PreconditionError("replay buffer capacity must be positive");
    }
    const auto cap = static_cast<Eigen::Index>(capacity_);
    obs_.resize(layout_.obs_total, cap);
    act_.resize(layout_.act_total, cap);
    rew_.resize(static_cast<Eigen::Index>(layout_.robots()), cap);
    next_obs_.resize(layout_.obs_total, cap);
    terminal_.resize(cap);
}

void ReplayBuffer::store(const Transition& t) {
    if (t.observations.size() != layout_.obs_total || t.next_observations.size() != layout_.obs_total ||
        t.actions.size() != layout_.act_total || t.rewards.size() != static_cast<Eigen::Index>(layout_.robots())) {
        throw ShapeError("replay buffer: transition does not match the joint layout");
    }
    if (!t.rewards.allFinite()) {
        throw NumericError("replay buffer: non-finite reward");
    }
    const auto c = static_cast<Eigen::Index>(cursor_);
    obs_.col(c) = t.observations;
    act_.col(c) = t.actions;
    rew_.col(c) = t.rewards;
    next_obs_.col(c) = t.next_observations;
    terminal_(c) = t.terminal ? 1.0 : 0.0;
    cursor_ = (cursor_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

Transition ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) {
        throw LookupError("replay buffer index out of range");
    }
    const std::size_t oldest = size_ < capacity_ ? 0 : cursor_;
    const auto c = static_cast<Eigen::Index>((oldest + i) % capacity_);
    return {obs_.col(c), act_.col(c), rew_.col(c), next_obs_.col(c), terminal_(c) != 0.0};
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
    if (batch_size == 0 || size_ < batch_size) {
        throw PreconditionError("replay buffer holds " + std::to_string(size_) + " transitions, batch needs " +
                                std::to_string(batch_size));
    }
    std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
    const auto n = static_cast<Eigen::Index>(batch_size);
    Batch b;
    b.observations.resize(layout_.obs_total, n);
    b.actions.resize(layout_.act_total, n);
    b.rewards.resize(rew_.rows(), n);
    b.next_observations.resize(layout_.obs_total, n);
    b.terminal.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto c = static_cast<Eigen::Index>(pick(rng));
        b.observations.col(k) = obs_.col(c);
        b.actions.col(k) = act_.col(c);
        b.rewards.col(k) = rew_.col(c);
        b.next_observations.col(k) = next_obs_.col(c);
        b.terminal(k) = terminal_(c);
    }
    return b;
}

std::vector<NetBundle> AgentNets::bundles() const {
    std::vector<NetBundle> out;
    out.reserve(agents.size());
    for (const auto& a : agents) out.push_back(a.nets);
    return out;
}

namespace {

Optimizer::Kind optimizer_kind(const TrainConfig& tc) {
    return tc.optimizer == OptimizerKind::Adam ? Optimizer::Kind::Adam : Optimizer::Kind::Sgd;
}

bool robot_learns(const Scenario& sc, std::size_t i) {
    return sc.roster[i].team == Team::Police ? sc.train.learn_police : sc.train.learn_criminal;
}

}  // namespace

AgentNets make_agent_nets(const Scenario& scenario, Rng& rng) {
    AgentNets nets;
    nets.layout = make_layout(scenario);
    nets.grad_clip = scenario.train.grad_clip;
    nets.action_reg = scenario.train.action_reg;
    const auto& tc = scenario.train;
    for (std::size_t i = 0; i < scenario.roster.size(); ++i) {
        std::vector<int> policy_widths{static_cast<int>(nets.layout.obs_dim[i])};
        policy_widths.insert(policy_widths.end(), tc.hidden.begin(), tc.hidden.end());
        policy_widths.push_back(static_cast<int>(kActionDim));

        std::vector<int> critic_widths{static_cast<int>(nets.layout.critic_input_dim())};
        critic_widths.insert(critic_widths.end(), tc.hidden.begin(), tc.hidden.end());
        critic_widths.push_back(1);

        Agent agent;
        agent.nets.robot_id = scenario.roster[i].id;
        agent.nets.policy = make_mlp(policy_widths, Activation::Relu, Activation::Tanh, rng);
        agent.nets.critic = make_mlp(critic_widths, Activation::Relu, Activation::Linear, rng);
        agent.nets.policy_target = agent.nets.policy;
        agent.nets.critic_target = agent.nets.critic;
        agent.policy_optimizer = Optimizer(optimizer_kind(tc), tc.lr_policy);
        agent.critic_optimizer = Optimizer(optimizer_kind(tc), tc.lr_critic);
        agent.learns = robot_learns(scenario, i);
        nets.agents.push_back(std::move(agent));
    }
    return nets;
}

AgentNets agent_nets_from(const Scenario& scenario, std::vector<NetBundle> bundles) {
    AgentNets nets;
    nets.layout = make_layout(scenario);
    nets.grad_clip = scenario.train.grad_clip;
    nets.action_reg = scenario.train.action_reg;
    if (bundles.size() != scenario.roster.size()) {
        throw CheckpointError(CheckpointError::Kind::RosterMismatch, "checkpoint robot count differs from scenario");
    }
    const auto& tc = scenario.train;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        auto& b = bundles[i];
        if (b.robot_id != scenario.roster[i].id) {
            throw CheckpointError(CheckpointError::Kind::RosterMismatch,
                                  "checkpoint robot '" + b.robot_id + "' != scenario robot '" + scenario.roster[i].id + "'");
        }
        const bool ok = !b.policy.layers.empty() && !b.critic.layers.empty() &&
                        b.policy.input_dim() == nets.layout.obs_dim[i] && b.policy.output_dim() == kActionDim &&
                        b.critic.input_dim() == nets.layout.critic_input_dim() && b.critic.output_dim() == 1 &&
                        b.policy.same_shape(b.policy_target) && b.critic.same_shape(b.critic_target);
        if (!ok) {
            throw CheckpointError(CheckpointError::Kind::ShapeMismatch,
                                  "network shapes for '" + b.robot_id + "' do not fit the scenario");
        }
        Agent agent;
        agent.nets = std::move(b);
        agent.policy_optimizer = Optimizer(optimizer_kind(tc), tc.lr_policy);
        agent.critic_optimizer = Optimizer(optimizer_kind(tc), tc.lr_critic);
        agent.learns = robot_learns(scenario, i);
        nets.agents.push_back(std::move(agent));
    }
    return nets;
}

Eigen::VectorXd act(const Mlp& policy, const Eigen::VectorXd& observation, double noise_scale, Rng& rng) {
    Eigen::VectorXd a = forward(policy, observation);
    if (noise_scale > 0.0) {
        for (Eigen::Index k = 0; k < a.size(); ++k) a(k) += noise_scale * standard_normal(rng);
    }
    return a.cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::MatrixXd target_actions(const Batch& batch, const AgentNets& nets) {
    const auto& layout = nets.layout;
    Eigen::MatrixXd actions(layout.act_total, batch.size());
    for (std::size_t j = 0; j < layout.robots(); ++j) {
        actions.middleRows(layout.act_offset[j], kActionDim) = forward_batch(
            nets.agents[j].nets.policy_target, batch.next_observations.middleRows(layout.obs_offset[j], layout.obs_dim[j]));
    }
    return actions;
}

namespace {

Eigen::MatrixXd critic_input(const Eigen::MatrixXd& observations, const Eigen::MatrixXd& actions) {
    Eigen::MatrixXd input(observations.rows() + actions.rows(), observations.cols());
    input.topRows(observations.rows()) = observations;
    input.bottomRows(actions.rows()) = actions;
    return input;
}

Eigen::VectorXd targets_from(const Batch& batch, const AgentNets& nets, std::size_t robot, double gamma,
                             const Eigen::MatrixXd& next_actions) {
    const Eigen::MatrixXd q_next =
        forward_batch(nets.agents[robot].nets.critic_target, critic_input(batch.next_observations, next_actions));
    const Eigen::VectorXd r = batch.rewards.row(static_cast<Eigen::Index>(robot)).transpose();
    return r.array() + gamma * (1.0 - batch.terminal.array()) * q_next.row(0).transpose().array();
}

void check_robot(const AgentNets& nets, std::size_t robot) {
    if (robot >= nets.agents.size()) throw LookupError("robot index out of range");
}

}  // namespace

Eigen::VectorXd critic_targets(const Batch& batch, const AgentNets& nets, std::size_t robot, double gamma) {
    check_robot(nets, robot);
    if (batch.size() == 0) throw PreconditionError("critic_targets: empty batch");
    return targets_from(batch, nets, robot, gamma, target_actions(batch, nets));
}

GradientSet critic_gradient(const AgentNets& nets, std::size_t robot, const Batch& batch,
                            const Eigen::VectorXd& targets, double* loss) {
    check_robot(nets, robot);
    const Mlp& critic = nets.agents[robot].nets.critic;
    ForwardTrace trace;
    const Eigen::MatrixXd q = forward_batch(critic, critic_input(batch.observations, batch.actions), &trace);
    const Eigen::RowVectorXd err = q.row(0) - targets.transpose();
    const auto n = static_cast<double>(batch.size());
    if (loss) *loss = err.squaredNorm() / n;
    const Eigen::MatrixXd upstream = (2.0 / n) * err;
    return backward_batch(critic, trace, upstream).grads;
}

double update_critic(AgentNets& nets, std::size_t robot, const Batch& batch, const Eigen::VectorXd& targets) {
    if (batch.size() == 0) throw PreconditionError("update_critic: empty batch");
    double loss = 0.0;
    GradientSet grads = critic_gradient(nets, robot, batch, targets, &loss);
    if (!std::isfinite(loss)) {
        throw DivergenceError("critic loss of robot " + nets.agents[robot].nets.robot_id + " is not finite");
    }
    auto& agent = nets.agents[robot];
    clip_global_norm(grads, nets.grad_clip);
    agent.critic_optimizer.step(agent.nets.critic, grads);
    return loss;
}

double update_critic(AgentNets& nets, std::size_t robot, const Batch& batch, double gamma) {
    return update_critic(nets, robot, batch, critic_targets(batch, nets, robot, gamma));
}

// Gradient of -mean Q (plus the pre-activation penalty), so the optimizer's descent step ascends Q.
GradientSet actor_gradient(const AgentNets& nets, std::size_t robot, const Batch& batch, double* objective) {
    check_robot(nets, robot);
    const auto& layout = nets.layout;
    const auto& bundle = nets.agents[robot].nets;

    ForwardTrace policy_trace;
    const Eigen::MatrixXd own = forward_batch(
        bundle.policy, batch.observations.middleRows(layout.obs_offset[robot], layout.obs_dim[robot]), &policy_trace);
    Eigen::MatrixXd actions = batch.actions;
    actions.middleRows(layout.act_offset[robot], kActionDim) = own;

    ForwardTrace critic_trace;
    const Eigen::MatrixXd q = forward_batch(bundle.critic, critic_input(batch.observations, actions), &critic_trace);
    const auto n = static_cast<double>(batch.size());
    if (objective) *objective = q.sum() / n;

    const Eigen::MatrixXd upstream = Eigen::MatrixXd::Constant(1, batch.size(), -1.0 / n);
    const Backprop through_critic = backward_batch(bundle.critic, critic_trace, upstream);
    const Eigen::MatrixXd d_action =
        through_critic.input_grad.middleRows(layout.obs_total + layout.act_offset[robot], kActionDim);
    if (nets.action_reg > 0.0) {
        const Eigen::MatrixXd pre_grad = (2.0 * nets.action_reg / n) * output_pre_activation(bundle.policy, policy_trace);
        return backward_batch(bundle.policy, policy_trace, d_action, &pre_grad).grads;
    }
    return backward_batch(bundle.policy, policy_trace, d_action).grads;
}

double update_actor(AgentNets& nets, std::size_t robot, const Batch& batch) {
    if (batch.size() == 0) throw PreconditionError("update_actor: empty batch");
    double objective = 0.0;
    GradientSet grads = actor_gradient(nets, robot, batch, &objective);
    if (!std::isfinite(objective)) {
        throw DivergenceError("actor objective of robot " + nets.agents[robot].nets.robot_id + " is not finite");
    }
    auto& agent = nets.agents[robot];
    clip_global_norm(grads, nets.grad_clip);
    agent.policy_optimizer.step(agent.nets.policy, grads);
    if (!all_finite(agent.nets.policy)) {
        throw DivergenceError("policy parameters of robot " + agent.nets.robot_id + " are not finite");
    }
    return objective;
}

StepDiagnostics train_step(AgentNets& nets, const ReplayBuffer& buffer, const TrainConfig& config, Rng& rng) {
    const auto batch_size = static_cast<std::size_t>(config.batch);
    if (buffer.size() < batch_size) {
        throw PreconditionError("train_step: buffer smaller than batch size");
    }
    const Batch batch = buffer.sample(batch_size, rng);
    const Eigen::MatrixXd next_actions = target_actions(batch, nets);

    const std::size_t n = nets.agents.size();
    StepDiagnostics diag;
    diag.critic_loss.assign(n, 0.0);
    diag.actor_objective.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!nets.agents[i].learns) continue;
        diag.critic_loss[i] = update_critic(nets, i, batch, targets_from(batch, nets, i, config.gamma, next_actions));
        diag.actor_objective[i] = update_actor(nets, i, batch);
    }
    for (auto& agent : nets.agents) {
        if (!agent.learns) continue;
        soft_update_inplace(agent.nets.policy_target, agent.nets.policy, config.tau);
        soft_update_inplace(agent.nets.critic_target, agent.nets.critic, config.tau);
    }
    return diag;
}

}  // namespace pursuit
