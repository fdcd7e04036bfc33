#include <gtest/gtest.h>

#include <cmath>

#include "cmab/attacks.hpp"
#include "cmab/instances.hpp"
#include "reference.hpp"

using namespace cmab;

namespace {

// Nodes s=0 a=1 b=2 c=3 d=4 e=5 t=6; the cheap route is s-a-b-e-t.
GraphSpec detour_graph() {
  return GraphSpec{7,
                   {{0, 1, 0.1}, {1, 2, 0.1}, {2, 5, 0.2}, {5, 6, 0.2}, {2, 3, 0.9}, {3, 4, 0.9}, {4, 6, 0.9}},
                   false};
}

}  // namespace

TEST(HardInstance, Structure) {
  const Instance inst = build_hard_instance({5, 0.1, 2});
  ASSERT_EQ(inst.action_space().size(), 7u);
  EXPECT_EQ(inst.m(), 10);
  EXPECT_TRUE(hard_arm(inst, 0).observable.empty());
  for (int j = 1; j <= 5; ++j)
    EXPECT_EQ(hard_arm(inst, j).observable, (std::vector<int>{hard_a(5, j), hard_b(5, j)}));
  EXPECT_EQ(hard_arm(inst, 6).observable, (std::vector<int>{5, 6, 7, 8, 9}));
  EXPECT_DOUBLE_EQ(inst.means[static_cast<std::size_t>(hard_a(5, 2))], 1.0);
  EXPECT_DOUBLE_EQ(inst.means[static_cast<std::size_t>(hard_a(5, 1))], 0.8);
  EXPECT_EQ(hard_targets(inst).arms.size(), 5u);
}

TEST(HardInstance, GapsForEverySize) {
  for (int n = 3; n <= 8; ++n) {
    for (double eps : {0.05, 0.1}) {
      for (int special : {1, n}) {
        const Instance inst = build_hard_instance({n, eps, special});
        const GapReport r = compute_gap(inst, hard_targets(inst));
        for (int j = 1; j <= n; ++j)
          EXPECT_NEAR(r.gaps[static_cast<std::size_t>(j - 1)], j == special ? eps : -eps, 1e-12);
      }
    }
  }
}

TEST(HardInstance, ParameterGuards) {
  EXPECT_THROW(build_hard_instance({5, 0.125, 1}), ParameterError);
  EXPECT_THROW(build_hard_instance({5, 0.0, 1}), ParameterError);
  EXPECT_THROW(build_hard_instance({5, 0.1, 6}), ParameterError);
  EXPECT_THROW(hard_arm(build_hard_instance({3, 0.1, 1}), 5), ParameterError);
}

TEST(Generators, RandomConnectedGraphIsConnectedAndSeeded) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GraphSpec g = random_connected_graph(7, 0.2, seed);
    EXPECT_TRUE(g.connected());
    EXPECT_GE(g.edges.size(), 6u);
    const GraphSpec h = random_connected_graph(7, 0.2, seed);
    ASSERT_EQ(g.edges.size(), h.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) EXPECT_EQ(g.edges[i].weight, h.edges[i].weight);
  }
}

TEST(Generators, RandomLinearInstanceHasDistinctArms) {
  const Instance inst = random_linear_instance(6, 12, 3, 4);
  std::set<std::vector<int>> seen;
  for (const auto& a : inst.action_space()) {
    EXPECT_TRUE(seen.insert(a.members).second);
    EXPECT_LE(a.members.size(), 3u);
  }
  EXPECT_THROW(random_linear_instance(2, 10, 1, 0), GenerationError);
}

TEST(Generators, CoverageKeepsEveryLeftNode) {
  const Instance inst = random_coverage_instance(6, 5, 0.05, 2, 3);
  std::set<int> lefts;
  for (const auto& [u, v] : inst.coverage().edges) lefts.insert(u);
  EXPECT_EQ(lefts.size(), 6u);
}

TEST(PmcTargets, FixedRuleRanksByAverageWeight) {
  const Instance inst = make_coverage_instance(4, 1, {{0, 0, 0.9}, {1, 0, 0.8}, {2, 0, 0.7}, {3, 0, 0.6}}, 2);
  EXPECT_EQ(fixed_pmc_target(inst, 2).arms[0].members, (std::vector<int>{2, 3}));
  const Instance eq = make_coverage_instance(6, 1, {{0, 0, 0.5}, {1, 0, 0.5}, {2, 0, 0.5}, {3, 0, 0.5}, {4, 0, 0.5}, {5, 0, 0.5}}, 2);
  EXPECT_EQ(fixed_pmc_target(eq, 2).arms[0].members, (std::vector<int>{2, 3}));
  EXPECT_THROW(fixed_pmc_target(inst, 3), ParameterError);
}

TEST(PmcTargets, RandomRuleUsesHeavyNodes) {
  const Instance low = make_coverage_instance(3, 1, {{0, 0, 0.5}, {1, 0, 0.2}, {2, 0, 0.4}}, 1);
  EXPECT_THROW(random_pmc_target(low, 1, 0), InfeasibleError);
  const Instance two = make_coverage_instance(4, 1, {{0, 0, 0.9}, {1, 0, 0.2}, {2, 0, 0.7}, {3, 0, 0.1}}, 2);
  EXPECT_EQ(random_pmc_target(two, 2, 5).arms[0].members, (std::vector<int>{0, 2}));
  const Instance many = random_coverage_instance(8, 6, 0.5, 2, 12);
  EXPECT_EQ(random_pmc_target(many, 2, 3).arms[0].members, random_pmc_target(many, 2, 3).arms[0].members);
}

TEST(PathTargets, DetourGraphGivesUnattackableTarget) {
  const PathTarget pt = unattackable_path_target(detour_graph(), 0.5, 1);
  const auto best = dijkstra_oracle(pt.instance, pt.instance.means);
  EXPECT_GT(best.chosen.members.size(), 1u);
  EXPECT_GT(pt.excess, 0.5);
  EXPECT_NEAR(pt.excess, expected_reward(pt.instance, pt.target.arms[0], pt.instance.means) - best.value, 1e-12);
  EXPECT_LT(pt.gap, 0.0);
  EXPECT_LT(gap_of(pt.instance, pt.target.arms[0], GapSolver::BruteForce), 0.0);
}

TEST(PathTargets, DetourTargetAgainstOptimalRoute) {
  const Instance inst = make_shortest_path_instance(detour_graph(), 0, 6);
  const SuperArm detour = make_arm(inst, {0, 1, 4, 5, 6});  // s-a-b-c-d-t
  const auto best = dijkstra_oracle(inst, inst.means);
  EXPECT_EQ(best.chosen.members, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_NEAR(expected_reward(inst, detour, inst.means) - best.value, 2.3, 1e-12);
  EXPECT_LT(gap_of(inst, detour, GapSolver::BruteForce), 0.0);
}

TEST(PathTargets, GuardsAndRandomTargets) {
  EXPECT_THROW(unattackable_path_target(detour_graph(), 0.0, 1), ParameterError);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PathTarget pt = random_path_target(random_connected_graph(8, 0.3, seed), seed);
    EXPECT_GT(pt.gap, 0.0);
    EXPECT_GT(pt.excess, 0.0);
  }
}

TEST(SpanningTreeTargets, SecondBestTree) {
  const Instance tri = make_spanning_tree_instance(GraphSpec{3, {{0, 1, 0.1}, {1, 2, 0.2}, {0, 2, 0.3}}, false});
  const SuperArm t = second_best_spanning_tree_target(tri).arms[0];
  EXPECT_EQ(t.members, (std::vector<int>{0, 2}));
  EXPECT_NEAR(expected_reward(tri, t, tri.means), 0.4, 1e-12);
  const Instance star = make_spanning_tree_instance(GraphSpec{4, {{0, 1, 0.1}, {0, 2, 0.2}, {0, 3, 0.3}}, false});
  EXPECT_THROW(second_best_spanning_tree_target(star), InfeasibleError);
}

TEST(SpanningTreeTargets, SecondBestMatchesReferenceRankTwo) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GraphSpec g = random_connected_graph(6, 0.4, seed);
    const auto trees = ref::spanning_trees(g);
    if (trees.size() < 2) continue;
    std::vector<double> costs;
    for (const auto& t : trees) costs.push_back(ref::weight_of(g.weights(), t));
    std::sort(costs.begin(), costs.end());
    const Instance inst = make_spanning_tree_instance(g);
    const SuperArm t = second_best_spanning_tree_target(inst).arms[0];
    EXPECT_NEAR(expected_reward(inst, t, inst.means), costs[1], 1e-12) << "seed " << seed;
  }
}

TEST(SpanningTreeTargets, RandomTargetIsATree) {
  const Instance inst = make_spanning_tree_instance(random_connected_graph(6, 0.5, 2));
  const SuperArm t = random_spanning_tree_target(inst, 8).arms[0];
  EXPECT_EQ(t.members.size(), 5u);
  EXPECT_NO_THROW(check_arm(inst, t));
}

TEST(CascadeTargets, ThresholdAndOrdering) {
  const Instance inst = make_cascade_instance({0.05, 0.6, 0.3, 0.08, 0.9}, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TargetSet t = cascade_target(inst, 2, 0.1, seed);
    EXPECT_TRUE(t.permutation_closed);
    const auto& m = t.arms[0].members;
    ASSERT_EQ(m.size(), 2u);
    for (int i : m) EXPECT_GT(inst.means[static_cast<std::size_t>(i)], 0.1);
    EXPECT_GE(inst.means[static_cast<std::size_t>(m[0])], inst.means[static_cast<std::size_t>(m[1])]);
  }
  EXPECT_THROW(cascade_target(inst, 4, 0.1, 0), InfeasibleError);
}
