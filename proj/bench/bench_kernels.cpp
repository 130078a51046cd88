// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include <map>

#include "actplace/baselines.hpp"
#include "actplace/instances.hpp"

namespace {

using namespace actplace;

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

const NodeGramianSet& er_gramians(int n) {
  static std::map<int, NodeGramianSet> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, node_gramians(erdos_renyi_system({n, 1}).system)).first;
  return it->second;
}

void BM_FiniteHorizonGramians(benchmark::State& state) {
  const LinearSystem sys = erdos_renyi_system({static_cast<int>(state.range(0)), 1}).system.with_horizon(FiniteHorizon{0, 1});
  for (auto _ : state) benchmark::DoNotOptimize(finite_horizon_node_gramians(sys, exec_of(state)));
}

void BM_InfiniteHorizonGramians(benchmark::State& state) {
  const LinearSystem sys = erdos_renyi_system({static_cast<int>(state.range(0)), 1}).system;
  for (auto _ : state) benchmark::DoNotOptimize(infinite_horizon_node_gramians(sys, exec_of(state)));
}

void BM_EagerGreedy(benchmark::State& state) {
  const auto& g = er_gramians(static_cast<int>(state.range(0)));
  const double E = 64.0 * energy_metric(g, ActuatorSet::all(g.n()), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_min_actuators(g, E, 1.0 / E, {false, exec_of(state)}));
}

void BM_LazyGreedy(benchmark::State& state) {
  const auto& g = er_gramians(static_cast<int>(state.range(0)));
  const double E = 64.0 * energy_metric(g, ActuatorSet::all(g.n()), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_min_actuators(g, E, 1.0 / E, {true, exec_of(state)}));
}

void BM_BruteForceMinEnergy(benchmark::State& state) {
  const auto& g = er_gramians(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_min_energy(g, 3, 0.0, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_FiniteHorizonGramians)->ArgsProduct({{10, 20}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InfiniteHorizonGramians)->ArgsProduct({{10, 40}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EagerGreedy)->ArgsProduct({{10, 40}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LazyGreedy)->ArgsProduct({{10, 40}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceMinEnergy)->ArgsProduct({{12}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
