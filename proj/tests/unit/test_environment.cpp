#include <gtest/gtest.h>

#include <cmath>

#include "cmab/environment.hpp"
#include "cmab/instances.hpp"
#include "reference.hpp"

using namespace cmab;

namespace {

GraphSpec triangle(double a = 0.1, double b = 0.2, double c = 0.3) {
  return GraphSpec{3, {{0, 1, a}, {1, 2, b}, {0, 2, c}}, false};
}

}  // namespace

TEST(Outcomes, DegenerateMeansAreDeterministic) {
  const Instance zeros = make_mab_instance({0.0, 0.0, 0.0});
  const Instance ones = make_mab_instance({1.0, 1.0, 1.0});
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto lo = sample_outcomes(zeros, rng);
    const auto hi = sample_outcomes(ones, rng);
    for (double x : lo.values()) EXPECT_EQ(x, 0.0);
    for (double x : hi.values()) EXPECT_EQ(x, 1.0);
  }
}

TEST(Outcomes, EmpiricalMeanMatchesBernoulliParameter) {
  const Instance inst = make_mab_instance({0.5, 0.5, 0.5, 0.5});
  Rng rng(11);
  std::vector<double> sum(4, 0.0);
  const int n = 100'000;
  for (int k = 0; k < n; ++k) {
    const auto x = sample_outcomes(inst, rng);
    for (std::size_t i = 0; i < 4; ++i) sum[i] += x[i];
  }
  for (double s : sum) EXPECT_NEAR(s / n, 0.5, 0.01);
}

TEST(Outcomes, MeanVectorRejectsOutOfRange) {
  EXPECT_THROW(MeanVector({0.2, 1.5}), ParameterError);
  EXPECT_THROW(MeanVector({-0.1}), ParameterError);
}

TEST(Trigger, SpanningTreeObservesEveryTreeEdge) {
  const Instance inst = make_spanning_tree_instance(triangle());
  const SuperArm tree = make_arm(inst, {0, 1});
  Rng rng(1);
  const auto tau = trigger(inst, tree, sample_outcomes(inst, rng), rng);
  EXPECT_EQ(tau.indices, (std::vector<int>{0, 1}));
}

TEST(Trigger, CascadeStopsAfterFirstClick) {
  const Instance inst = make_cascade_instance({0.3, 0.6, 0.9, 0.2}, 3);
  const SuperArm list = make_arm(inst, {0, 1, 2});
  Rng rng(0);
  const OutcomeVector x({0.0, 1.0, 1.0, 0.0});
  EXPECT_EQ(trigger(inst, list, x, rng).indices, (std::vector<int>{0, 1}));
}

TEST(Trigger, HardBridgeArmObservesEveryB) {
  const Instance inst = build_hard_instance({5, 0.1, 2});
  Rng rng(0);
  const auto tau = trigger(inst, hard_arm(inst, 6), sample_outcomes(inst, rng), rng);
  EXPECT_EQ(tau.indices, (std::vector<int>{5, 6, 7, 8, 9}));
  EXPECT_TRUE(trigger(inst, hard_arm(inst, 0), sample_outcomes(inst, rng), rng).indices.empty());
}

TEST(Trigger, PartialTriggeringFollowsMemberProbabilities) {
  SuperArm s;
  s.members = {0, 1};
  s.trigger_prob = {0.3, 1.0};
  const Instance inst = make_linear_instance({0.5, 0.5}, {s});
  Rng rng(5);
  int seen0 = 0;
  const int n = 50'000;
  for (int k = 0; k < n; ++k) {
    const auto tau = trigger(inst, inst.action_space()[0], sample_outcomes(inst, rng), rng);
    seen0 += std::count(tau.indices.begin(), tau.indices.end(), 0) > 0;
    EXPECT_TRUE(std::count(tau.indices.begin(), tau.indices.end(), 1) == 1);
  }
  EXPECT_NEAR(static_cast<double>(seen0) / n, 0.3, 4 * std::sqrt(0.3 * 0.7 / n));
}

TEST(Reward, HardInstanceClosedForms) {
  const Instance inst = build_hard_instance({5, 0.1, 3});
  EXPECT_NEAR(expected_reward(inst, hard_arm(inst, 6), inst.means), 5.4, 1e-12);
  EXPECT_DOUBLE_EQ(expected_reward(inst, hard_arm(inst, 0), inst.means), 1.8);
  EXPECT_DOUBLE_EQ(expected_reward(inst, hard_arm(inst, 0), MeanVector::filled(10, 0.0)), 1.8);
  EXPECT_NEAR(expected_reward(inst, hard_arm(inst, 3), inst.means), 1.9, 1e-12);
  EXPECT_NEAR(expected_reward(inst, hard_arm(inst, 1), inst.means), 1.7, 1e-12);
}

TEST(Reward, CoverageOfTwoHalfEdges) {
  const Instance inst = make_coverage_instance(1, 2, {{0, 0, 0.5}, {0, 1, 0.5}}, 1);
  EXPECT_DOUBLE_EQ(expected_reward(inst, make_arm(inst, {0}), inst.means), 1.0);
}

TEST(Reward, CascadeProductForm) {
  const Instance inst = make_cascade_instance({0.9, 0.1, 0.8, 0.2, 0.3}, 2);
  EXPECT_NEAR(expected_reward(inst, make_arm(inst, {0, 2}), inst.means), 0.98, 1e-12);
  EXPECT_NEAR(expected_reward(inst, make_arm(inst, {2, 0}), inst.means), 0.98, 1e-12);
}

TEST(Reward, InfluenceChainMatchesLiveEdgeEnumeration) {
  const GraphSpec g{3, {{0, 1, 0.5}, {1, 2, 0.5}}, true};
  const Instance inst = make_influence_instance(g, 1);
  EXPECT_NEAR(expected_reward(inst, make_arm(inst, {0}), inst.means), 1.75, 1e-12);
  const GraphSpec h{5, {{0, 1, 0.3}, {0, 2, 0.6}, {1, 3, 0.5}, {2, 3, 0.4}, {3, 4, 0.9}, {1, 4, 0.2}}, true};
  const Instance ih = make_influence_instance(h, 2);
  EXPECT_NEAR(expected_reward(ih, make_arm(ih, {0, 3}), ih.means), ref::exact_spread(h, ih.means.vector(), {0, 3}),
              1e-12);
}

TEST(Reward, LinearRealizedRewardUsesTriggeredMembers) {
  SuperArm s;
  s.members = {0, 1};
  s.offset = 0.25;
  const Instance inst = make_linear_instance({0.5, 0.5}, {s});
  const OutcomeVector x({1.0, 0.0});
  Rng rng(0);
  const auto tau = trigger(inst, inst.action_space()[0], x, rng);
  EXPECT_DOUBLE_EQ(realized_reward(inst, inst.action_space()[0], x, tau), 1.25);
}

TEST(Mask, IdentityWhenEverythingObservable) {
  SuperArm s;
  s.members = {0, 1, 2};
  const Instance inst = make_linear_instance({0.2, 0.4, 0.6}, {s});
  EXPECT_EQ(masked_means(inst, inst.means, inst.action_space()[0]), inst.means);
}

TEST(Mask, EmptyObservableSet) {
  SuperArm s;
  s.offset = 1.0;
  const MeanVector mu({0.2, 0.4});
  EXPECT_EQ(masked_means(mu, s, Direction::Maximize), MeanVector::filled(2, 0.0));
  EXPECT_EQ(masked_means(mu, s, Direction::Minimize), MeanVector::filled(2, 1.0));
}

TEST(TriggerProbability, HardInstanceAndPartialArms) {
  const Instance hard = build_hard_instance({4, 0.1, 1});
  EXPECT_DOUBLE_EQ(min_trigger_probability(hard), 1.0);
  EXPECT_EQ(max_observable_size(hard), 4);

  SuperArm s1;
  s1.members = {1, 0};
  s1.trigger_prob = {1.0, 0.25};
  SuperArm s2;
  s2.members = {0, 2};
  const Instance inst = make_linear_instance({0.5, 0.5, 0.25}, {s1, s2});
  EXPECT_DOUBLE_EQ(min_trigger_probability(inst), 0.25);
  const auto p = trigger_probabilities(inst, inst.action_space()[0]);
  EXPECT_DOUBLE_EQ(p[0], 0.25);
  EXPECT_DOUBLE_EQ(p[1], 1.0);
  EXPECT_DOUBLE_EQ(p[2], 0.0);
}

TEST(TriggerProbability, CascadeExaminationProbabilities) {
  const Instance inst = make_cascade_instance({0.5, 0.2, 0.4}, 2);
  const auto p = trigger_probabilities(inst, make_arm(inst, {1, 0}));
  EXPECT_DOUBLE_EQ(p[1], 1.0);
  EXPECT_DOUBLE_EQ(p[0], 0.8);
  EXPECT_DOUBLE_EQ(p[2], 0.0);
}

TEST(ActionSpace, SpanningTreeCounts) {
  EXPECT_EQ(enumerate_action_space(make_spanning_tree_instance(triangle())).size(), 3u);
  GraphSpec k4{4, {}, false};
  for (int u = 0; u < 4; ++u)
    for (int v = u + 1; v < 4; ++v) k4.edges.push_back({u, v, 0.5});
  const auto trees = enumerate_action_space(make_spanning_tree_instance(k4));
  EXPECT_EQ(trees.size(), 16u);  // Cayley: 4^(4-2)
  EXPECT_EQ(trees.size(), ref::spanning_trees(k4).size());
}

TEST(ActionSpace, CascadeListsAndPaths) {
  EXPECT_EQ(enumerate_action_space(make_cascade_instance({0.1, 0.2, 0.3, 0.4}, 2)).size(), 12u);
  const GraphSpec g{4, {{0, 1, 0.1}, {1, 3, 0.1}, {0, 2, 0.1}, {2, 3, 0.1}, {1, 2, 0.1}}, false};
  EXPECT_EQ(enumerate_action_space(make_shortest_path_instance(g, 0, 3)).size(), 4u);
}

TEST(ActionSpace, CapacityIsEnforced) {
  EXPECT_THROW(enumerate_action_space(make_cascade_instance(std::vector<double>(12, 0.5), 6), 1000), CapacityError);
}

TEST(TargetSets, PermutationClosedMatching) {
  const Instance inst = make_cascade_instance({0.1, 0.2, 0.3, 0.4}, 2);
  TargetSet t{{make_arm(inst, {0, 2})}, true};
  EXPECT_TRUE(t.contains(make_arm(inst, {2, 0})));
  EXPECT_FALSE(t.contains(make_arm(inst, {2, 1})));
  t.permutation_closed = false;
  EXPECT_FALSE(t.contains(make_arm(inst, {2, 0})));
}

TEST(Validation, StructuralErrors) {
  EXPECT_THROW(make_cascade_instance({0.5, 0.5}, 2), ParameterError);
  EXPECT_THROW(make_spanning_tree_instance(GraphSpec{3, {{0, 1, 0.5}, {1, 2, 0.5}}, true}), ParameterError);
  const Instance inst = make_mab_instance({0.5, 0.5});
  EXPECT_THROW(expected_reward(inst, inst.action_space()[0], MeanVector::filled(3, 0.5)), InstanceMismatchError);
}
