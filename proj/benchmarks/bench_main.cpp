#include <benchmark/benchmark.h>

#include <vector>

#include "pursuit/engine.hpp"
#include "pursuit/learner.hpp"
#include "pursuit/mlp.hpp"

using namespace pursuit;

namespace {

const Scenario& acceptance() {
    static const Scenario sc = load_scenario_file(PURSUIT_SCENARIO_DIR "/acceptance.json");
    return sc;
}

void BM_ForwardBatch(benchmark::State& state) {
    Rng rng(1);
    const int batch = static_cast<int>(state.range(0));
    const std::vector<int> widths{84, 64, 64, 1};
    const Mlp net = make_mlp(widths, Activation::Relu, Activation::Linear, rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(84, batch);
    for (auto _ : state) benchmark::DoNotOptimize(forward_batch(net, x));
    state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(64)->Arg(256);

void BM_BackwardBatch(benchmark::State& state) {
    Rng rng(2);
    const int batch = static_cast<int>(state.range(0));
    const std::vector<int> widths{84, 64, 64, 1};
    const Mlp net = make_mlp(widths, Activation::Relu, Activation::Linear, rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(84, batch);
    ForwardTrace trace;
    forward_batch(net, x, &trace);
    const Eigen::MatrixXd up = Eigen::MatrixXd::Ones(1, batch);
    for (auto _ : state) benchmark::DoNotOptimize(backward_batch(net, trace, up));
    state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_BackwardBatch)->Arg(64)->Arg(256);

void BM_EnvStep(benchmark::State& state) {
    const Scenario& sc = acceptance();
    Rng rng(3);
    JointState s = initial_state(sc, rng);
    const std::vector<Eigen::VectorXd> acts(sc.roster.size(), Eigen::Vector2d(0.2, -0.1));
    for (auto _ : state) {
        JointState next = apply_actions(sc, s, acts);
        benchmark::DoNotOptimize(next);
    }
}
BENCHMARK(BM_EnvStep);

void BM_Episode(benchmark::State& state) {
    const Scenario& sc = acceptance();
    Rng init(4);
    const AgentNets nets = make_agent_nets(sc, init);
    Rng rng(5);
    for (auto _ : state) {
        NetworkPolicies policies(nets, 0.1);
        benchmark::DoNotOptimize(run_episode(sc, policies, rng));
    }
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
    Scenario sc = acceptance();
    sc.train.batch = static_cast<int>(state.range(0));
    Rng rng(6);
    AgentNets nets = make_agent_nets(sc, rng);
    ReplayBuffer buffer(4096, nets.layout);
    NetworkPolicies policies(nets, 0.3);
    while (buffer.size() < 1024) run_episode(sc, policies, rng, [&](const Transition& t) { buffer.store(t); });
    for (auto _ : state) benchmark::DoNotOptimize(train_step(nets, buffer, sc.train, rng));
}
BENCHMARK(BM_TrainStep)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
