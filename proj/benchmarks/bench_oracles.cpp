#include <benchmark/benchmark.h>

#include "cmab/attacks.hpp"
#include "cmab/instances.hpp"
#include "cmab/oracles.hpp"

using namespace cmab;

namespace {

MeanVector noisy(const Instance& inst, Rng& rng) {
  std::vector<double> q = inst.means.vector();
  for (double& x : q) x = std::min(1.0, x + 0.1 * rng.uniform());
  return MeanVector(std::move(q));
}

void BM_Kruskal(benchmark::State& state) {
  const Instance inst = make_spanning_tree_instance(random_connected_graph(static_cast<int>(state.range(0)), 0.2, 1));
  Rng rng(0);
  for (auto _ : state) benchmark::DoNotOptimize(kruskal_oracle(inst, noisy(inst, rng)));
}
BENCHMARK(BM_Kruskal)->Arg(16)->Arg(64)->Arg(256);

void BM_Dijkstra(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const Instance inst = make_shortest_path_instance(random_connected_graph(n, 0.2, 2), 0, n - 1);
  Rng rng(0);
  for (auto _ : state) benchmark::DoNotOptimize(dijkstra_oracle(inst, noisy(inst, rng)));
}
BENCHMARK(BM_Dijkstra)->Arg(16)->Arg(64)->Arg(256);

void BM_GreedyCoverage(benchmark::State& state) {
  const auto left = static_cast<int>(state.range(0));
  const Instance inst = random_coverage_instance(left, left, 0.3, 3, 3);
  Rng rng(0);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_pmc_oracle(inst, 3, noisy(inst, rng)));
}
BENCHMARK(BM_GreedyCoverage)->Arg(8)->Arg(32)->Arg(128);

void BM_TopKCascade(benchmark::State& state) {
  const Instance inst = random_cascade_instance(static_cast<int>(state.range(0)), 4, 4);
  Rng rng(0);
  for (auto _ : state) benchmark::DoNotOptimize(topk_cascade_oracle(inst, 4, noisy(inst, rng)));
}
BENCHMARK(BM_TopKCascade)->Arg(16)->Arg(256);

void BM_MonteCarloInfluence(benchmark::State& state) {
  const Instance inst = make_influence_instance(random_graph(static_cast<int>(state.range(0)), 0.1, 5, true), 2);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mc_greedy_im_oracle(inst, 2, inst.means, 200, seed++));
}
BENCHMARK(BM_MonteCarloInfluence)->Arg(16)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_BruteForceGap(benchmark::State& state) {
  const Instance inst = build_hard_instance({static_cast<int>(state.range(0)), 0.1, 1});
  const TargetSet targets = hard_targets(inst);
  for (auto _ : state) benchmark::DoNotOptimize(compute_gap(inst, targets));
}
BENCHMARK(BM_BruteForceGap)->DenseRange(3, 8, 5);

}  // namespace
