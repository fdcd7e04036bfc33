#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cmab/attacks.hpp"
#include "cmab/instances.hpp"
#include "reference.hpp"

using namespace cmab;

TEST(Gap, HardInstanceGapValues) {
  const Instance inst = build_hard_instance({5, 0.1, 3});
  const GapReport r = compute_gap(inst, hard_targets(inst));
  ASSERT_EQ(r.gaps.size(), 5u);
  for (int j = 1; j <= 5; ++j) EXPECT_NEAR(r.gaps[static_cast<std::size_t>(j - 1)], j == 3 ? 0.1 : -0.1, 1e-12);
  EXPECT_NEAR(r.delta_m, 0.1, 1e-12);
  EXPECT_EQ(r.classification, Classification::Attackable);
  EXPECT_EQ(r.witnesses[0].label, "S0");
  EXPECT_TRUE(r.exact);
}

TEST(Gap, WitnessIsBestUnderMask) {
  const Instance inst = random_linear_instance(7, 10, 3, 5);
  for (const SuperArm& s : inst.action_space()) {
    Competitor w;
    gap_of(inst, s, GapSolver::BruteForce, false, &w);
    const MeanVector q = masked_means(inst, inst.means, s);
    for (const SuperArm& other : inst.action_space()) {
      if (other.id == s.id) continue;
      EXPECT_GE(w.value, expected_reward(inst, other, q) - 1e-12);
    }
    EXPECT_NE(w.arm.id, s.id);
  }
}

TEST(Gap, SpanningTreesAreNeverUnattackable) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = make_spanning_tree_instance(random_connected_graph(5, 0.5, seed));
    for (const SuperArm& t : enumerate_action_space(inst))
      EXPECT_GE(gap_of(inst, t, GapSolver::BruteForce), 0.0) << "seed " << seed;
  }
}

TEST(Gap, MabSecondBestArm) {
  const Instance inst = make_mab_instance({0.9, 0.5, 0.2});
  // Every competitor is masked to zero, so the baseline is 0.
  const GapReport r = compute_gap(inst, TargetSet{{inst.action_space()[1]}, false});
  EXPECT_DOUBLE_EQ(r.gaps[0], 0.5);
  double best_masked = 0.0;
  const MeanVector q = masked_means(inst, inst.means, inst.action_space()[1]);
  for (int id : {0, 2}) best_masked = std::max(best_masked, expected_reward(inst, inst.action_space()[static_cast<std::size_t>(id)], q));
  EXPECT_DOUBLE_EQ(r.gaps[0], 0.5 - best_masked);
}

TEST(Gap, BoundaryTieSnapsToZero) {
  SuperArm a;
  a.members = {0};
  SuperArm b;
  b.offset = 0.1 + 0.2;  // not exactly 0.3 in binary
  const Instance inst = make_linear_instance({0.3}, {a, b});
  const GapReport r = compute_gap(inst, TargetSet{{inst.action_space()[0]}, false});
  EXPECT_EQ(r.gaps[0], 0.0);
  EXPECT_EQ(r.classification, Classification::Boundary);
}

TEST(Gap, MinimiseDirectionUsesCostSemantics) {
  // Triangle: the MST {0.1, 0.2} and the next tree {0.1, 0.3}.
  const Instance inst = make_spanning_tree_instance(GraphSpec{3, {{0, 1, 0.1}, {1, 2, 0.2}, {0, 2, 0.3}}, false});
  const SuperArm second = make_arm(inst, {0, 2});
  // Masked: edge 1 becomes 1, so the best other tree costs 0.1 + 1 = 1.1 vs own 0.4.
  EXPECT_NEAR(gap_of(inst, second, GapSolver::BruteForce), 0.7, 1e-12);
}

TEST(Gap, CsvSchema) {
  const Instance inst = build_hard_instance({3, 0.1, 1});
  std::ostringstream out;
  write_gap_csv(out, compute_gap(inst, hard_targets(inst)));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "arm_id,gap,witness_id,classification");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 3), "S1,");
  EXPECT_NE(line.find(",attackable"), std::string::npos);
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Classification, PureFunctionOfSign) {
  for (double scale : {1e-9, 1e-3, 1.0, 1e6}) {
    EXPECT_EQ(classify(scale), Classification::Attackable);
    EXPECT_EQ(classify(-scale), Classification::Unattackable);
  }
  EXPECT_EQ(classify(0.0), Classification::Boundary);
}

TEST(Algorithm1, TargetPullCostsNothing) {
  const Instance inst = build_hard_instance({3, 0.1, 1});
  const SuperArm& s1 = hard_arm(inst, 1);
  const AttackPolicy p = algorithm1_policy(inst, hard_targets(inst), s1);
  const TriggerSet tau{{0, 3}, {}};
  const Corruption c = algorithm1_corrupt(p, tau, {{0, 1.0}, {3, 1.0}});
  EXPECT_EQ(c.cost, 0);
  EXPECT_EQ(c.corrupted, (std::vector<Observation>{{0, 1.0}, {3, 1.0}}));
}

TEST(Algorithm1, ChargesOnlyChangedEntries) {
  const Instance inst = build_hard_instance({3, 0.1, 1});
  const AttackPolicy p = algorithm1_policy(inst, hard_targets(inst), hard_arm(inst, 1));
  const TriggerSet tau{{3, 4, 5}, {}};
  const Corruption c = algorithm1_corrupt(p, tau, {{3, 1.0}, {4, 0.0}, {5, 1.0}});
  EXPECT_EQ(c.cost, 1);
  EXPECT_EQ(c.corrupted, (std::vector<Observation>{{3, 1.0}, {4, 0.0}, {5, 0.0}}));
}

TEST(Algorithm1, MinimiseWritesOnes) {
  const Instance inst = make_spanning_tree_instance(GraphSpec{3, {{0, 1, 0.1}, {1, 2, 0.2}, {0, 2, 0.3}}, false});
  const SuperArm target = make_arm(inst, {0, 2});
  const AttackPolicy p = algorithm1_policy(inst, TargetSet{{target}, false}, target);
  EXPECT_EQ(p.corruption_value, 1.0);
  const Corruption c = algorithm1_corrupt(p, TriggerSet{{1}, {}}, {{1, 0.4}});
  EXPECT_EQ(c.corrupted[0].value, 1.0);
  EXPECT_EQ(c.cost, 1);
}

TEST(Algorithm1, GuardsAndProtocol) {
  const Instance inst = build_hard_instance({3, 0.1, 1});
  EXPECT_THROW(algorithm1_policy(inst, TargetSet{{hard_arm(inst, 1)}, false}, hard_arm(inst, 2)), ParameterError);
  const AttackPolicy p = algorithm1_policy(inst, hard_targets(inst), hard_arm(inst, 1));
  EXPECT_THROW(algorithm1_corrupt(p, TriggerSet{{3, 4}, {}}, {{3, 1.0}}), ProtocolError);
}

TEST(TargetSelection, FirstPositiveAndRandomMember) {
  const Instance inst = build_hard_instance({5, 0.1, 3});
  const GapReport r = compute_gap(inst, hard_targets(inst));
  EXPECT_EQ(select_target(r, TargetStrategy::FirstPositive).label, "S3");
  const auto a = select_target(r, TargetStrategy::RandomMember, 99);
  const auto b = select_target(r, TargetStrategy::RandomMember, 99);
  EXPECT_EQ(a.id, b.id);

  const GapReport neg = compute_gap(inst, TargetSet{{hard_arm(inst, 1), hard_arm(inst, 2)}, false});
  EXPECT_THROW(select_target(neg, TargetStrategy::FirstPositive), NoAttackableTargetError);
  EXPECT_EQ(parse_target_strategy("random-member"), TargetStrategy::RandomMember);
}

TEST(ExtendedTarget, HopRadius) {
  const GraphSpec path{3, {{0, 1, 0.5}, {1, 2, 0.5}}, false};
  EXPECT_EQ(extended_target_nodes(path, {0}, 1), (std::vector<int>{0}));
  EXPECT_EQ(extended_target_nodes(path, {0}, 2), (std::vector<int>{0, 1}));
  EXPECT_EQ(extended_target_nodes(path, {0}, kUnboundedHops), (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(extended_target_nodes(path, {0}, 0), ParameterError);
}

TEST(ExtendedTarget, PolicyProtectsIncidentEdges) {
  const GraphSpec g{4, {{0, 1, 0.5}, {1, 2, 0.5}, {2, 3, 0.5}, {3, 0, 0.5}}, true};
  const Instance inst = make_influence_instance(g, 1);
  const SuperArm seeds = make_arm(inst, {0});
  EXPECT_EQ(im_extended_target_policy(inst, seeds, 1).protected_set, (std::vector<int>{0, 3}));
  EXPECT_EQ(im_extended_target_policy(inst, seeds, kUnboundedHops).protected_set, (std::vector<int>{0, 1, 2, 3}));
}

TEST(T0, FrozenExample) {
  // 18 ln(4 * 2 * 1e12 / 0.05) / 0.01
  const double t0 = t0_diagnostic(1, 1.0, 0.0, -0.1, 2, 10'000, 0.05);
  EXPECT_NEAR(t0, 58871.150876092266, 1e-8);
  EXPECT_NEAR(t0, 1800.0 * std::log(4.0 * 2 * 1e12 / 0.05), 1e-8);
}

TEST(T0, Scaling) {
  const double budget_only_1 = t0_diagnostic(2, 1.0, 1e6, -0.1, 4, 1, 0.05) -
                               t0_diagnostic(2, 1.0, 0.0, -0.1, 4, 1, 0.05);
  const double budget_only_2 = t0_diagnostic(2, 1.0, 1e6, -0.2, 4, 1, 0.05) -
                               t0_diagnostic(2, 1.0, 0.0, -0.2, 4, 1, 0.05);
  EXPECT_NEAR(budget_only_2 / budget_only_1, 0.5, 1e-12);
  const double a = t0_diagnostic(1, 1.0, 0.0, -0.2, 3, 1000, 0.05);
  const double b = t0_diagnostic(1, 1.0, 0.0, -0.05, 3, 1000, 0.05);
  EXPECT_NEAR(b / a, 16.0, 1e-12);
  EXPECT_THROW(t0_diagnostic(1, 1.0, 0.0, 0.1, 2, 100, 0.05), NotApplicableError);
  EXPECT_THROW(t0_diagnostic(1, 1.0, 0.0, 0.0, 2, 100, 0.05), NotApplicableError);
}

TEST(PmcBound, Formula) {
  EXPECT_NEAR(pmc_nontarget_bound(4, 100, 0.05, 0.5), 8.0 * 64 * std::log(4.0 * 4 * 1e6 / 0.05) / 0.25, 1e-9);
  EXPECT_THROW(pmc_nontarget_bound(4, 100, 0.05, -0.1), NotApplicableError);
}

TEST(Ledger, AccumulatesAndKeepsRounds) {
  CostLedger l(true);
  l.add(2);
  l.add(0);
  l.add(3);
  EXPECT_EQ(l.cumulative(), 5);
  EXPECT_EQ(l.per_round(), (std::vector<int>{2, 0, 3}));
  EXPECT_THROW(l.add(-1), ParameterError);
}

TEST(AdversaryBudget, StopsChangingOnceExhausted) {
  const Instance inst = build_hard_instance({3, 0.1, 1});
  Adversary adv(algorithm1_policy(inst, hard_targets(inst), hard_arm(inst, 1)), 3);
  const TriggerSet tau{{3, 4, 5}, {}};
  const std::vector<Observation> raw{{3, 1.0}, {4, 1.0}, {5, 1.0}};
  EXPECT_EQ(adv.corrupt(tau, raw).cost, 2);
  const Corruption second = adv.corrupt(tau, raw);
  EXPECT_EQ(second.cost, 1);
  EXPECT_EQ(second.corrupted[1].value, 0.0);
  EXPECT_EQ(second.corrupted[2].value, 1.0);
  EXPECT_EQ(adv.corrupt(tau, raw).cost, 0);
  EXPECT_EQ(adv.ledger().cumulative(), 3);

  Adversary none;
  EXPECT_EQ(none.corrupt(tau, raw).corrupted, raw);
}
