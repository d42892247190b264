// Microbenchmarks for the scheduling core: maneuver timing, scenario
// construction, graph building, network forward passes, and exact solves.

#include <benchmark/benchmark.h>

#include "aeos/graph_env.hpp"
#include "aeos/maneuver.hpp"
#include "aeos/neural.hpp"
#include "aeos/rng.hpp"
#include "aeos/scenario.hpp"
#include "aeos/schedulers.hpp"

namespace {

aeos::GenerationParams bench_params(int num_targets, double period) {
    aeos::GenerationParams p;
    p.num_targets = num_targets;
    p.observation_period_s = period;
    p.p_clouds = 0.4;
    p.p_cn2 = 0.2;
    p.seed = 7;
    return p;
}

void BM_TransitionTime(benchmark::State& state) {
    double alpha = 0.0;
    for (auto _ : state) {
        alpha += 0.37;
        if (alpha > 180.0) alpha -= 180.0;
        benchmark::DoNotOptimize(aeos::transition_time_s(alpha));
    }
}
BENCHMARK(BM_TransitionTime);

void BM_GenerateScenario(benchmark::State& state) {
    const auto params = bench_params(static_cast<int>(state.range(0)), 600.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(aeos::generate(params));
    }
}
BENCHMARK(BM_GenerateScenario)->Arg(10)->Arg(40);

void BM_BuildGraph(benchmark::State& state) {
    const aeos::Scenario s = aeos::generate(bench_params(static_cast<int>(state.range(0)), 600.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(aeos::build_graph(s));
    }
}
BENCHMARK(BM_BuildGraph)->Arg(10)->Arg(40);

void BM_QValues(benchmark::State& state) {
    const aeos::Scenario s = aeos::generate(bench_params(static_cast<int>(state.range(0)), 600.0));
    const auto base = aeos::build_graph(s);
    aeos::ScheduleGraph g(base);
    aeos::Rng rng(1);
    const aeos::QNetwork net = aeos::make_q_network(aeos::kFeatureDim, 32, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(aeos::q_values(net, g));
    }
}
BENCHMARK(BM_QValues)->Arg(10)->Arg(40);

void BM_ExactOracle(benchmark::State& state) {
    const aeos::Scenario s = aeos::generate(bench_params(static_cast<int>(state.range(0)), 400.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(aeos::exact_oracle(s));
    }
}
BENCHMARK(BM_ExactOracle)->Arg(6)->Arg(8);

} // namespace

BENCHMARK_MAIN();
