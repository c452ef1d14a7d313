#include <doctest.h>

#include "pursuit/errors.hpp"
#include "pursuit/learner.hpp"
#include "pursuit/perception.hpp"
#include "support.hpp"
#include "toy.hpp"

using namespace pursuit;
using test::toy_nets;

namespace {

Transition numbered(const JointLayout& L, double k) {
    Transition t;
    t.observations = Eigen::VectorXd::Constant(L.obs_total, k);
    t.actions = Eigen::VectorXd::Constant(L.act_total, -k);
    t.rewards = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(L.robots()), k / 3.0);
    t.next_observations = Eigen::VectorXd::Constant(L.obs_total, k + 0.5);
    t.terminal = static_cast<int>(k) % 2 == 0;
    return t;
}

}  // namespace

TEST_CASE("act") {
    Rng rng(1);
    const auto nets = toy_nets({3}, 4, rng);
    const auto& pol = nets.agents[0].nets.policy;
    const Eigen::Vector3d o(0.1, -0.2, 0.3);
    Rng r1(5);
    CHECK(act(pol, o, 0.0, r1) == forward(pol, o));
    Rng a(77);
    Rng b(77);
    CHECK(act(pol, o, 0.3, a) == act(pol, o, 0.3, b));
    Rng big(3);
    bool saw_bound = false;
    for (int k = 0; k < 200; ++k) {
        const Eigen::VectorXd x = act(pol, o, 5.0, big);
        REQUIRE(x.cwiseAbs().maxCoeff() <= 1.0);
        saw_bound = saw_bound || x.cwiseAbs().maxCoeff() == 1.0;
    }
    CHECK(saw_bound);
}

TEST_CASE("replay buffer ring semantics") {
    Rng rng(1);
    const auto nets = toy_nets({2, 3}, 4, rng);
    ReplayBuffer buf(4, nets.layout);
    buf.store(numbered(nets.layout, 0));
    CHECK(buf.size() == 1);
    CHECK_THROWS_AS(buf.sample(2, rng), PreconditionError);
    for (int k = 1; k <= 4; ++k) buf.store(numbered(nets.layout, k));
    CHECK(buf.size() == 4);
    CHECK(buf.at(0).observations(0) == 1.0);  // item 0 evicted
    const Transition t = buf.at(3);
    const Transition e = numbered(nets.layout, 4);
    CHECK(t.observations == e.observations);
    CHECK(t.actions == e.actions);
    CHECK(t.rewards == e.rewards);
    CHECK(t.next_observations == e.next_observations);
    CHECK(t.terminal == e.terminal);

    Transition bad = e;
    bad.rewards(0) = NAN;
    CHECK_THROWS(buf.store(bad));
    bad = e;
    bad.actions.resize(1);
    CHECK_THROWS_AS(buf.store(bad), ShapeError);
}

TEST_CASE("critic targets") {
    Rng rng(2);
    auto nets = toy_nets({2, 3}, 5, rng);
    const Batch b = test::random_batch(nets.layout, 32, rng);
    CHECK(critic_targets(b, nets, 1, 0.0) == b.rewards.row(1).transpose());
    const Eigen::VectorXd y = critic_targets(b, nets, 0, 0.9);
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        if (b.terminal(k) == 1.0) CHECK(y(k) == b.rewards(0, k));
    }
    for (auto& l : nets.agents[0].nets.critic_target.layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
    nets.agents[0].nets.critic_target.layers.back().bias(0) = 2.5;
    const Eigen::VectorXd yc = critic_targets(b, nets, 0, 1.0);
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        CHECK(yc(k) == doctest::Approx(b.rewards(0, k) + (b.terminal(k) == 1.0 ? 0.0 : 2.5)));
    }
}

TEST_CASE("update_critic") {
    Rng rng(3);
    SUBCASE("exact fit: zero loss, no change") {
        auto nets = toy_nets({2}, 4, rng);
        const Batch b = test::random_batch(nets.layout, 16, rng);
        Eigen::MatrixXd in(nets.layout.critic_input_dim(), b.size());
        in << b.observations, b.actions;
        const Eigen::VectorXd y = forward_batch(nets.agents[0].nets.critic, in).row(0).transpose();
        const Eigen::VectorXd before = flatten(nets.agents[0].nets.critic);
        CHECK(update_critic(nets, 0, b, y) == 0.0);
        CHECK(flatten(nets.agents[0].nets.critic) == before);
    }
    SUBCASE("linear critic: loss decreases") {
        auto nets = toy_nets({2}, 4, rng);
        const std::vector<int> widths{static_cast<int>(nets.layout.critic_input_dim()), 1};
        nets.agents[0].nets.critic = make_mlp(widths, Activation::Linear, Activation::Linear, rng);
        const Batch b = test::random_batch(nets.layout, 16, rng);
        const Eigen::VectorXd y = b.rewards.row(0).transpose() * 3.0;
        const double first = update_critic(nets, 0, b, y);
        const double second = test::critic_loss_at(nets, 0, b, y);
        CHECK(second < first);
    }
    SUBCASE("gradient matches finite differences") {
        auto nets = toy_nets({2, 3}, 5, rng);
        const Batch b = test::random_batch(nets.layout, 8, rng);
        const Eigen::VectorXd y = critic_targets(b, nets, 1, 0.95);
        const Eigen::VectorXd g = flatten(critic_gradient(nets, 1, b, y));
        const Eigen::VectorXd theta = flatten(nets.agents[1].nets.critic);
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
            AgentNets p = nets;
            AgentNets m = nets;
            Eigen::VectorXd tp = theta;
            Eigen::VectorXd tm = theta;
            tp(k) += 1e-5;
            tm(k) -= 1e-5;
            unflatten(p.agents[1].nets.critic, tp);
            unflatten(m.agents[1].nets.critic, tm);
            const double fd = (test::critic_loss_at(p, 1, b, y) - test::critic_loss_at(m, 1, b, y)) / 2e-5;
            CHECK(test::rel_error(fd, g(k)) <= 1e-4);
        }
    }
}

TEST_CASE("update_actor") {
    Rng rng(4);
    SUBCASE("zero critic leaves the policy alone") {
        auto nets = toy_nets({2, 2}, 4, rng);
        for (auto& l : nets.agents[0].nets.critic.layers) {
            l.weight.setZero();
            l.bias.setZero();
        }
        const Batch b = test::random_batch(nets.layout, 16, rng);
        CHECK(flatten(actor_gradient(nets, 0, b)).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::VectorXd before = flatten(nets.agents[0].nets.policy);
        update_actor(nets, 0, b);
        CHECK(flatten(nets.agents[0].nets.policy) == before);
    }
    SUBCASE("gradient matches finite differences, with and without the penalty") {
        for (const double reg : {0.0, 0.05}) {
            auto nets = toy_nets({3, 2}, 5, rng);
            nets.action_reg = reg;
            const Batch b = test::random_batch(nets.layout, 8, rng);
            const Eigen::VectorXd g = flatten(actor_gradient(nets, 1, b));
            const Eigen::VectorXd theta = flatten(nets.agents[1].nets.policy);
            for (Eigen::Index k = 0; k < theta.size(); ++k) {
                AgentNets p = nets;
                AgentNets m = nets;
                Eigen::VectorXd tp = theta;
                Eigen::VectorXd tm = theta;
                tp(k) += 1e-5;
                tm(k) -= 1e-5;
                unflatten(p.agents[1].nets.policy, tp);
                unflatten(m.agents[1].nets.policy, tm);
                // The returned gradient is of the negated objective.
                const double fd =
                    -(test::actor_objective_at(p, 1, b, reg) - test::actor_objective_at(m, 1, b, reg)) / 2e-5;
                CHECK(test::rel_error(fd, g(k)) <= 1e-4);
            }
        }
    }
}

TEST_CASE("train_step") {
    Rng rng(5);
    Scenario sc = test::small_scenario();
    sc.train.batch = 8;
    auto fill = [&](ReplayBuffer& buf, Rng& r) {
        for (int k = 0; k < 20; ++k) {
            const Batch b = test::random_batch(make_layout(sc), 1, r);
            buf.store({b.observations.col(0), b.actions.col(0), b.rewards.col(0), b.next_observations.col(0),
                       b.terminal(0) == 1.0});
        }
    };
    SUBCASE("tau 0 keeps targets") {
        sc.train.tau = 0.0;
        AgentNets nets = make_agent_nets(sc, rng);
        ReplayBuffer buf(100, nets.layout);
        fill(buf, rng);
        const auto before = nets.bundles();
        train_step(nets, buf, sc.train, rng);
        const auto after = nets.bundles();
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(flatten(after[i].policy_target) == flatten(before[i].policy_target));
            CHECK(flatten(after[i].critic_target) == flatten(before[i].critic_target));
            CHECK(flatten(after[i].critic) != flatten(before[i].critic));
        }
    }
    SUBCASE("identically seeded runs agree bitwise") {
        auto run = [&] {
            Rng r(99);
            AgentNets nets = make_agent_nets(sc, r);
            ReplayBuffer buf(100, nets.layout);
            fill(buf, r);
            std::vector<StepDiagnostics> out;
            for (int k = 0; k < 3; ++k) out.push_back(train_step(nets, buf, sc.train, r));
            return out;
        };
        CHECK(run() == run());
    }
    SUBCASE("buffer below batch size") {
        AgentNets nets = make_agent_nets(sc, rng);
        ReplayBuffer buf(100, nets.layout);
        CHECK_THROWS_AS(train_step(nets, buf, sc.train, rng), PreconditionError);
    }
    SUBCASE("frozen team is not updated") {
        sc.train.learn_criminal = false;
        AgentNets nets = make_agent_nets(sc, rng);
        ReplayBuffer buf(100, nets.layout);
        fill(buf, rng);
        const auto before = nets.bundles();
        train_step(nets, buf, sc.train, rng);
        CHECK(flatten(nets.agents[3].nets.policy) == flatten(before[3].policy));
        CHECK(flatten(nets.agents[0].nets.policy) != flatten(before[0].policy));
    }
}

TEST_CASE("centralised critic and decentralised policy shapes") {
    const Scenario sc = test::small_scenario();
    Rng rng(6);
    const AgentNets nets = make_agent_nets(sc, rng);
    Eigen::Index obs = 0;
    for (std::size_t i = 0; i < sc.roster.size(); ++i) {
        obs += static_cast<Eigen::Index>(observation_dim(sc, i));
        CHECK(nets.agents[i].nets.policy.input_dim() == static_cast<Eigen::Index>(observation_dim(sc, i)));
    }
    for (const auto& a : nets.agents) {
        CHECK(a.nets.critic.input_dim() == obs + 2 * static_cast<Eigen::Index>(sc.roster.size()));
    }
}

TEST_CASE("target nets approach online nets geometrically") {
    Rng rng(7);
    const std::vector<int> widths{4, 6, 2};
    Mlp target = make_mlp(widths, Activation::Relu, Activation::Tanh, rng);
    const Mlp online = make_mlp(widths, Activation::Relu, Activation::Tanh, rng);
    const double tau = 0.05;
    double gap = (flatten(target) - flatten(online)).norm();
    for (int k = 0; k < 100; ++k) {
        soft_update_inplace(target, online, tau);
        const double next = (flatten(target) - flatten(online)).norm();
        REQUIRE(std::abs(next / gap - (1.0 - tau)) <= 1e-9);
        gap = next;
    }
}

TEST_CASE("toy actor converges to the critic's maximiser") {
    // Critic fitted to Q(a) = -(a0 - 0.3)^2 over the action box and frozen; the actor then ascends it.
    Rng rng(8);
    auto nets = toy_nets({1}, 32, rng, Optimizer::Kind::Adam, 1e-2, 3e-3);
    for (int k = 0; k < 3000; ++k) {
        Batch b = test::random_batch(nets.layout, 128, rng, 0.0);
        b.observations.setOnes();
        for (Eigen::Index j = 0; j < b.size(); ++j) b.rewards(0, j) = -std::pow(b.actions(0, j) - 0.3, 2);
        update_critic(nets, 0, b, 0.0);
    }
    for (int k = 0; k < 500; ++k) {
        Batch b = test::random_batch(nets.layout, 64, rng, 0.0);
        b.observations.setOnes();
        update_actor(nets, 0, b);
    }
    const double a0 = forward(nets.agents[0].nets.policy, Eigen::VectorXd::Ones(1))(0);
    CHECK(a0 == doctest::Approx(0.3).epsilon(0.05 / 0.3));
}
