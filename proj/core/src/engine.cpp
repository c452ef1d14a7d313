#include "pursuit/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "pursuit/checkpoint.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/metrics.hpp"
#include "pursuit/motion.hpp"

namespace pursuit {

Eigen::VectorXd NetworkPolicies::action(std::size_t robot, const ObservationVector&, const Eigen::VectorXd& scaled,
                                        Rng& rng) {
    return act(nets_.agents[robot].nets.policy, scaled, noise_, rng);
}

namespace {

Vec2 sample_allowed(const WorldMap& map, Platform platform, Rng& rng) {
    for (int i = 0; i < 1000; ++i) {
        const Vec2 p{uniform(rng, 0.0, map.width), uniform(rng, 0.0, map.height)};
        if (position_allowed(map, platform, p)) return p;
    }
    throw DegenerateMapError("no admissible start position found after 1000 samples");
}

}  // namespace

JointState initial_state(const Scenario& scenario, Rng& rng) {
    const auto& roster = scenario.roster;
    const auto& map = scenario.map;
    JointState state;
    state.robots.resize(roster.size());

    std::vector<std::size_t> police;
    std::vector<std::size_t> criminals;
    for (std::size_t i = 0; i < roster.size(); ++i) {
        (roster[i].team == Team::Police ? police : criminals).push_back(i);
    }

    // Station order: roster order when there is one station per robot, a fresh
    // random assignment when stations outnumber police.
    std::vector<std::size_t> order(map.stations.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    if (map.stations.size() > police.size()) {
        std::shuffle(order.begin(), order.end(), rng);
    }

    double spacing = 0.5;
    for (const auto& r : roster) spacing = std::max(spacing, 2.0 * r.safe_radius);

    for (std::size_t k = 0; k < police.size(); ++k) {
        RobotState& s = state.robots[police[k]];
        const Platform platform = roster[police[k]].platform;
        if (map.stations.empty()) {
            s.position = sample_allowed(map, platform, rng);
        } else {
            const std::size_t slot = k % order.size();
            const double shift = spacing * static_cast<double>(k / order.size());
            Vec2 p = map.stations[order[slot]];
            // Robots sharing a station are lined up to its right (left at the arena edge).
            const Vec2 right{std::min(p.x + shift, map.width), p.y};
            const Vec2 left{std::max(p.x - shift, 0.0), p.y};
            s.position = position_allowed(map, platform, right) ? right : left;
        }
    }
    for (std::size_t k = 0; k < criminals.size(); ++k) {
        RobotState& s = state.robots[criminals[k]];
        s.position = map.criminal_starts.empty() ? sample_criminal_start(map, rng)
                                                 : map.criminal_starts[k % map.criminal_starts.size()];
    }
    for (std::size_t i = 0; i < roster.size(); ++i) {
        if (roster[i].platform == Platform::Ugv) {
            state.robots[i].heading = wrap_angle(uniform(rng, -std::numbers::pi, std::numbers::pi));
        }
    }
    return state;
}

JointState apply_actions(const Scenario& scenario, const JointState& state, std::span<const Eigen::VectorXd> actions) {
    const auto& roster = scenario.roster;
    if (actions.size() != roster.size() || state.robots.size() != roster.size()) {
        throw ShapeError("apply_actions: one action per robot required");
    }
    const double dt = scenario.episode.dt;
    JointState next = state;
    next.step = state.step + 1;
    for (std::size_t i = 0; i < roster.size(); ++i) {
        const RobotSpec& spec = roster[i];
        const RobotState& cur = state.robots[i];
        RobotState& out = next.robots[i];
        if (!cur.active) {
            out.velocity = {};
            continue;
        }
        const Eigen::VectorXd& a = actions[i];
        if (a.size() != kActionDim || !a.allFinite()) {
            throw NumericError("apply_actions: robot " + spec.id + " action must be two finite numbers");
        }
        if (spec.platform == Platform::Uav) {
            const UavState moved = integrate_uav(cur.uav(), Vec2{a(0), a(1)} * spec.a_max, dt, spec);
            if (position_allowed(scenario.map, Platform::Uav, moved.position)) {
                out.position = moved.position;
                out.velocity = moved.velocity;
            } else {
                out.position = cur.position;
                out.velocity = {};
            }
        } else {
            const UgvCommand cmd = clamp_ugv_command(cur.ugv(), {a(0) * spec.v_max, a(1) * spec.w_max}, spec);
            const double factor =
                scenario.map.in_region(RegionKind::Lawn, cur.position) ? scenario.episode.lawn_factor : 1.0;
            const UgvState moved = integrate_ugv(cur.ugv(), cmd, dt, factor);
            out.position = resolve_position(scenario.map, Platform::Ugv, moved.position, cur.position);
            out.heading = moved.heading;
            out.v_lin = moved.v_lin;
            out.v_ang = moved.v_ang;
            out.velocity = (out.position - cur.position) * (1.0 / dt);
        }
    }
    return next;
}

std::vector<bool> unsafe_robots(const Scenario& scenario, const JointState& state) {
    const auto& roster = scenario.roster;
    std::vector<bool> unsafe(roster.size(), false);
    for (const Team team : {Team::Police, Team::Criminal}) {
        std::vector<TaggedPosition> members;
        std::vector<std::size_t> index;
        double rho = 0.0;
        for (std::size_t i = 0; i < roster.size(); ++i) {
            if (roster[i].team != team || !state.robots[i].active) continue;
            members.push_back({roster[i].id, state.robots[i].position});
            index.push_back(i);
            rho = std::max(rho, roster[i].safe_radius);
        }
        const SafetyReport report = pairwise_safety(members, rho);
        std::size_t k = 0;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b, ++k) {
                if (!(report.pairs[k].h > 0.0)) {
                    unsafe[index[a]] = true;
                    unsafe[index[b]] = true;
                }
            }
        }
    }
    return unsafe;
}

namespace {

Eigen::VectorXd joint_scaled(const std::vector<ObservationVector>& raw, const std::vector<std::vector<double>>& scale,
                             const JointLayout& layout) {
    Eigen::VectorXd out(layout.obs_total);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (std::size_t k = 0; k < raw[i].size(); ++k) {
            out(layout.obs_offset[i] + static_cast<Eigen::Index>(k)) = raw[i][k] / scale[i][k];
        }
    }
    return out;
}

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, ActionSource& policies, Rng& rng, const TransitionSink& sink) {
    const auto& roster = scenario.roster;
    const std::size_t n = roster.size();
    const JointLayout layout = make_layout(scenario);

    std::vector<std::vector<double>> scale(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = observation_scale(scenario, i);

    JointState world = initial_state(scenario, rng);
    std::vector<ObservationVector> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = build_observation(scenario, world, i);
    Eigen::VectorXd scaled_joint = joint_scaled(raw, scale, layout);

    EpisodeResult result;
    result.returns.assign(n, 0.0);
    std::vector<Eigen::VectorXd> actions(n, Eigen::VectorXd::Zero(kActionDim));
    Eigen::VectorXd joint_actions(layout.act_total);
    Eigen::VectorXd rewards(static_cast<Eigen::Index>(n));
    std::vector<bool> ever_captured(n, false);

    int step = 0;
    try {
        while (step < scenario.episode.horizon) {
            ++step;
            for (std::size_t i = 0; i < n; ++i) {
                if (world.robots[i].active) {
                    const Eigen::VectorXd own = scaled_joint.segment(layout.obs_offset[i], layout.obs_dim[i]);
                    actions[i] = policies.action(i, raw[i], own, rng);
                } else {
                    actions[i].setZero();
                }
                joint_actions.segment(layout.act_offset[i], kActionDim) = actions[i];
            }

            JointState next = apply_actions(scenario, world, actions);
            const StepOutcome outcome = evaluate_step(scenario, next);
            const std::vector<bool> unsafe = unsafe_robots(scenario, next);
            const std::vector<RewardBreakdown> breakdown = step_rewards(scenario, next, outcome, unsafe);

            for (std::size_t i = 0; i < n; ++i) {
                rewards(static_cast<Eigen::Index>(i)) = breakdown[i].total;
                result.returns[i] += breakdown[i].total;
                if (unsafe[i]) ++result.safety_violations;
            }
            for (const auto& ev : outcome.captures) {
                result.capture_events.push_back({step, ev.criminal, ev.capturers});
                ever_captured[ev.criminal] = true;
                if (!scenario.episode.sticky_capture) next.robots[ev.criminal].active = false;
            }
            for (const auto& ev : outcome.arrivals) {
                result.arrival_events.push_back({step, ev.criminal, ev.soi});
            }

            for (std::size_t i = 0; i < n; ++i) raw[i] = build_observation(scenario, next, i);
            Eigen::VectorXd next_scaled = joint_scaled(raw, scale, layout);

            // Horizon truncation is not terminal: the value beyond it is still bootstrapped.
            if (sink) {
                sink(Transition{scaled_joint, joint_actions, rewards, next_scaled, outcome.terminal});
            }
            world = std::move(next);
            scaled_joint = std::move(next_scaled);
            if (outcome.terminal) break;
        }
    } catch (const NumericError& e) {
        throw NumericError("step " + std::to_string(step) + ": " + e.what());
    }

    result.steps_used = step;
    bool all_captured = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (roster[i].team == Team::Criminal && !ever_captured[i]) all_captured = false;
    }
    result.success = all_captured && result.arrival_events.empty();
    return result;
}

Metrics aggregate(const Scenario& scenario, const std::vector<std::vector<EpisodeResult>>& per_seed) {
    const auto& roster = scenario.roster;
    const std::size_t n = roster.size();
    Metrics m;
    m.capture_engagement_rate.assign(n, 0.0);
    std::vector<double> engaged(n, 0.0);
    double successes = 0.0;
    double reward_sum = 0.0;
    double police_sum = 0.0;
    double criminal_sum = 0.0;
    const double police_count = static_cast<double>(scenario.count(Team::Police));
    const double criminal_count = static_cast<double>(scenario.count(Team::Criminal));

    for (const auto& episodes : per_seed) {
        double seed_success = 0.0;
        double seed_reward = 0.0;
        for (const auto& ep : episodes) {
            double all = 0.0;
            double police = 0.0;
            double criminal = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                all += ep.returns[i];
                (roster[i].team == Team::Police ? police : criminal) += ep.returns[i];
            }
            const double ep_mean = all / static_cast<double>(n);
            reward_sum += ep_mean;
            seed_reward += ep_mean;
            police_sum += police / police_count;
            criminal_sum += criminal / criminal_count;
            if (ep.success) {
                successes += 1.0;
                seed_success += 1.0;
            }
            for (const auto& cap : ep.capture_events) {
                ++m.capture_events;
                for (const std::size_t p : cap.capturers) engaged[p] += 1.0;
            }
            ++m.episodes;
        }
        const double count = static_cast<double>(std::max<std::size_t>(episodes.size(), 1));
        m.seed_success_rates.push_back(seed_success / count);
        m.seed_mean_rewards.push_back(seed_reward / count);
    }

    if (m.episodes > 0) {
        const double total = static_cast<double>(m.episodes);
        m.task_success_rate = successes / total;
        m.mean_episode_reward = reward_sum / total;
        m.mean_police_reward = police_sum / total;
        m.mean_criminal_reward = criminal_sum / total;
    }
    m.no_captures = m.capture_events == 0;
    if (!m.no_captures) {
        for (std::size_t i = 0; i < n; ++i) {
            m.capture_engagement_rate[i] = engaged[i] / static_cast<double>(m.capture_events);
        }
    }
    m.success_ci_half_width = ci95_half_width(m.seed_success_rates);
    m.reward_ci_half_width = ci95_half_width(m.seed_mean_rewards);
    return m;
}

Metrics evaluate(const Scenario& scenario, const AgentNets& nets, std::size_t episodes,
                 std::span<const std::uint64_t> seeds, unsigned threads) {
    std::vector<std::vector<EpisodeResult>> per_seed(seeds.size());
    auto run_seed = [&](std::size_t k) {
        Rng rng(derive_seed(seeds[k], 0xE7A1));
        NetworkPolicies greedy(nets, 0.0);
        per_seed[k].reserve(episodes);
        for (std::size_t e = 0; e < episodes; ++e) {
            per_seed[k].push_back(run_episode(scenario, greedy, rng));
        }
    };

    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), seeds.size());
    if (workers <= 1) {
        for (std::size_t k = 0; k < seeds.size(); ++k) run_seed(k);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = w; k < seeds.size(); k += workers) run_seed(k);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return aggregate(scenario, per_seed);
}

TrainingReport train(const Scenario& scenario, const TrainHooks& hooks, AgentNets* nets_out) {
    const auto start = std::chrono::steady_clock::now();
    const TrainConfig& tc = scenario.train;
    Rng init_rng(derive_seed(tc.seed, 0));
    Rng env_rng(derive_seed(tc.seed, 1));
    Rng learn_rng(derive_seed(tc.seed, 2));

    AgentNets nets = make_agent_nets(scenario, init_rng);
    ReplayBuffer buffer(static_cast<std::size_t>(tc.capacity), nets.layout);
    NetworkPolicies behaviour(nets, tc.noise_start);
    const bool learning = tc.learn_police || tc.learn_criminal;

    TrainingReport report;
    std::size_t env_steps = 0;
    const TransitionSink sink = [&](const Transition& t) {
        buffer.store(t);
        ++env_steps;
        if (env_steps % static_cast<std::size_t>(tc.update_every) == 0 &&
            buffer.size() >= static_cast<std::size_t>(tc.batch)) {
            train_step(nets, buffer, tc, learn_rng);
            ++report.train_steps;
        }
    };

    const auto n = static_cast<double>(scenario.roster.size());
    const double police_count = static_cast<double>(scenario.count(Team::Police));
    const double criminal_count = static_cast<double>(scenario.count(Team::Criminal));
    for (int ep = 0; ep < tc.episodes; ++ep) {
        const double progress = tc.episodes > 1 ? static_cast<double>(ep) / static_cast<double>(tc.episodes - 1) : 0.0;
        const double noise = tc.noise_start + (tc.noise_end - tc.noise_start) * progress;
        behaviour.set_noise(noise);

        EpisodeRow row;
        row.episode = ep;
        row.noise = noise;
        row.result = run_episode(scenario, behaviour, env_rng, learning ? sink : TransitionSink{});
        double all = 0.0;
        for (std::size_t i = 0; i < scenario.roster.size(); ++i) {
            all += row.result.returns[i];
            (scenario.roster[i].team == Team::Police ? row.police_reward : row.criminal_reward) += row.result.returns[i];
        }
        row.mean_reward = all / n;
        row.police_reward /= police_count;
        row.criminal_reward /= criminal_count;

        if (hooks.on_episode) hooks.on_episode(row);
        report.rows.push_back(std::move(row));
        if (hooks.checkpoint && tc.checkpoint_every > 0 && (ep + 1) % tc.checkpoint_every == 0) {
            save_checkpoint(*hooks.checkpoint, nets.bundles());
        }
    }
    if (hooks.checkpoint) {
        save_checkpoint(*hooks.checkpoint, nets.bundles());
    }
    report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (nets_out) *nets_out = std::move(nets);
    return report;
}

}  // namespace pursuit
