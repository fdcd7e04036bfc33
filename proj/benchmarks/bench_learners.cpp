#include <benchmark/benchmark.h>

#include "cmab/attacks.hpp"
#include "cmab/instances.hpp"
#include "cmab/learners.hpp"

using namespace cmab;

namespace {

// One CUCB round under Algorithm 1: select, sample, trigger, corrupt, observe.
void attacked_rounds(benchmark::State& state, const Instance& inst, const SuperArm& target,
                     LearnerKind kind = LearnerKind::Cucb) {
  auto learner = make_learner(inst, kind, default_oracle(inst));
  Adversary adversary(algorithm1_policy(inst, TargetSet{{target}, false}, target));
  Rng rng(7);
  std::vector<Observation> raw;
  for (auto _ : state) {
    const SuperArm arm = learner->select();
    const OutcomeVector x = sample_outcomes(inst, rng);
    const TriggerSet tau = trigger(inst, arm, x, rng);
    raw.clear();
    for (int i : tau.indices) raw.push_back({i, x[static_cast<std::size_t>(i)]});
    learner->observe(CorruptedFeedback(adversary.corrupt(tau, raw).corrupted));
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_CucbHardInstance(benchmark::State& state) {
  const Instance inst = build_hard_instance({static_cast<int>(state.range(0)), 0.1, 1});
  attacked_rounds(state, inst, hard_arm(inst, 1));
}
BENCHMARK(BM_CucbHardInstance)->Arg(4)->Arg(8);

void BM_CucbSpanningTree(benchmark::State& state) {
  const Instance inst = make_spanning_tree_instance(random_connected_graph(static_cast<int>(state.range(0)), 0.2, 1));
  attacked_rounds(state, inst, second_best_spanning_tree_target(inst).arms[0]);
}
BENCHMARK(BM_CucbSpanningTree)->Arg(16)->Arg(64);

void BM_CucbCoverage(benchmark::State& state) {
  const Instance inst = random_coverage_instance(8, 8, 0.5, 3, 2);
  attacked_rounds(state, inst, fixed_pmc_target(inst, 3).arms[0]);
}
BENCHMARK(BM_CucbCoverage);

void BM_CascadeKlUcb(benchmark::State& state) {
  const Instance inst = random_cascade_instance(static_cast<int>(state.range(0)), 4, 3);
  attacked_rounds(state, inst, cascade_target(inst, 4, 0.0, 1).arms[0], LearnerKind::CascadeKlUcb);
}
BENCHMARK(BM_CascadeKlUcb)->Arg(16)->Arg(128);

void BM_ConfidenceRadius(benchmark::State& state) {
  std::int64_t t = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(confidence_radius(RadiusMode::HighProbability, 64, t, 1 + t / 3));
    ++t;
  }
}
BENCHMARK(BM_ConfidenceRadius);

}  // namespace

BENCHMARK_MAIN();
