#include <gtest/gtest.h>

#include <cmath>

#include "audits.hpp"
#include "cmab/attacks.hpp"
#include "cmab/harness.hpp"
#include "cmab/instance_io.hpp"
#include "cmab/instances.hpp"
#include "cmab/oracles.hpp"
#include "reference.hpp"

using namespace cmab;

TEST(Assumptions, MonotoneRewards) {
  for (const auto& fc : audit::families()) {
    const audit::Tally t = audit::monotonicity(fc, 5, 40, 1);
    EXPECT_EQ(t.violations, 0) << fc.name << " worst excess " << t.worst;
  }
}

TEST(Assumptions, TpmSmoothness) {
  for (const auto& fc : audit::families()) {
    const audit::Tally t = audit::tpm_smoothness(fc, 5, 40, 2);
    EXPECT_EQ(t.violations, 0) << fc.name << " worst excess " << t.worst;
  }
}

TEST(Triggering, FrequenciesMatchProbabilities) {
  const Instance cascade = make_cascade_instance({0.3, 0.5, 0.2, 0.6}, 3);
  const Instance influence = make_influence_instance(GraphSpec{4, {{0, 1, 0.5}, {1, 2, 0.4}, {0, 2, 0.3}, {2, 3, 0.7}}, true}, 1);
  for (const auto& [inst, members] : {std::pair{cascade, std::vector<int>{2, 0, 3}}, std::pair{influence, std::vector<int>{0}}}) {
    const SuperArm arm = make_arm(inst, members);
    const auto p = trigger_probabilities(inst, arm);
    Rng rng(8);
    std::vector<double> seen(p.size(), 0.0);
    const int n = 40'000;
    for (int k = 0; k < n; ++k)
      for (int i : trigger(inst, arm, sample_outcomes(inst, rng), rng).indices) seen[static_cast<std::size_t>(i)] += 1.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      EXPECT_NEAR(seen[i] / n, p[i], 4.0 * std::sqrt(0.25 / n) + 1e-12) << to_string(inst.family) << " arm " << i;
  }
}

TEST(Rewards, RealizedRewardAveragesToExpected) {
  const std::vector<Instance> cases = {
      build_hard_instance({4, 0.1, 2}),
      make_coverage_instance(2, 2, {{0, 0, 0.5}, {0, 1, 0.3}, {1, 1, 0.8}}, 2),
      make_cascade_instance({0.3, 0.5, 0.2}, 2),
      make_influence_instance(GraphSpec{3, {{0, 1, 0.5}, {1, 2, 0.5}, {0, 2, 0.2}}, true}, 1),
      reduce_to_cmab(random_mdp(2, 2, 3, 3)),
  };
  for (const Instance& inst0 : cases) {
    const Instance inst = with_enumerated_action_space(inst0);
    const SuperArm& arm = inst.action_space().back();
    Rng rng(4);
    const int n = 40'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto x = sample_outcomes(inst, rng);
      const double r = realized_reward(inst, arm, x, trigger(inst, arm, x, rng));
      sum += r;
      sum_sq += r * r;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(sum_sq / n - mean * mean, 1e-12) / n);
    EXPECT_NEAR(mean, expected_reward(inst, arm, inst.means), 4.0 * sd + 1e-9) << to_string(inst.family);
  }
}

TEST(Oracles, FamilyOraclesAgreeWithBruteForce) {
  Rng rng(6);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Instance st = with_enumerated_action_space(make_spanning_tree_instance(random_connected_graph(6, 0.4, seed)));
    const Instance sp = with_enumerated_action_space(
        make_shortest_path_instance(random_connected_graph(7, 0.3, seed + 100), 0, 6));
    const Instance ca = with_enumerated_action_space(random_cascade_instance(6, 2, seed));
    for (const Instance* inst : {&st, &sp, &ca}) {
      const MeanVector q = audit::random_means(inst->m(), rng);
      const double brute = brute_force_oracle(*inst, q).value;
      EXPECT_NEAR(default_oracle(*inst)(q).value, brute, 1e-12) << to_string(inst->family) << " seed " << seed;
    }
  }
}

TEST(Attacks, ProtectedEntriesAreNeverChanged) {
  Rng rng(10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = random_linear_instance(8, 10, 4, seed);
    const SuperArm& target = inst.action_space()[seed % inst.action_space().size()];
    const AttackPolicy pol = algorithm1_policy(inst, TargetSet{{target}, false}, target);
    EXPECT_EQ(pol.protected_set, target.observable);
    for (int r = 0; r < 50; ++r) {
      const SuperArm& arm = inst.action_space()[rng.below(inst.action_space().size())];
      const auto x = sample_outcomes(inst, rng);
      const auto tau = trigger(inst, arm, x, rng);
      std::vector<Observation> raw;
      for (int i : tau.indices) raw.push_back({i, x[static_cast<std::size_t>(i)]});
      const Corruption c = algorithm1_corrupt(pol, tau, raw);
      int changed = 0;
      for (std::size_t k = 0; k < raw.size(); ++k) {
        if (pol.protects(raw[k].arm)) EXPECT_EQ(c.corrupted[k], raw[k]);
        else EXPECT_EQ(c.corrupted[k].value, 0.0);
        changed += c.corrupted[k].value != raw[k].value;
      }
      EXPECT_EQ(c.cost, changed);
    }
  }
}

TEST(Attacks, GapSignIsInvariantToArmRelabelling) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = random_linear_instance(6, 8, 3, seed);
    // Reverse base-arm indices and super-arm order.
    std::vector<double> mu(inst.means.values().rbegin(), inst.means.values().rend());
    std::vector<SuperArm> arms;
    for (auto it = inst.action_space().rbegin(); it != inst.action_space().rend(); ++it) {
      SuperArm a;
      a.label = it->label;
      for (int i : it->members) a.members.push_back(inst.m() - 1 - i);
      std::sort(a.members.begin(), a.members.end());
      arms.push_back(a);
    }
    const Instance flipped = make_linear_instance(mu, arms);
    for (const SuperArm& s : inst.action_space()) {
      const SuperArm& t = flipped.action_space()[inst.action_space().size() - 1 - static_cast<std::size_t>(s.id)];
      EXPECT_NEAR(gap_of(inst, s, GapSolver::BruteForce), gap_of(flipped, t, GapSolver::BruteForce), 1e-12);
    }
  }
}

TEST(Episodic, ValueIdentityAcrossPolicies) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const TabularMdp m = random_mdp(1 + static_cast<int>(seed % 3), 1 + static_cast<int>((seed / 3) % 3),
                                    1 + static_cast<int>(seed % 4), seed);
    const Instance inst = reduce_to_cmab(m);
    for (const Policy& pi : enumerate_policies(m))
      EXPECT_NEAR(value_dp(m, pi), expected_reward(inst, policy_arm(inst, pi), inst.means), 1e-12) << seed;
  }
}

TEST(Regret, CucbRegretIsSublinearWithoutAttack) {
  const Instance inst = make_spanning_tree_instance(random_connected_graph(5, 0.5, 3));
  RunSpec spec;
  spec.horizon = 40'000;
  spec.stride = 10'000;
  spec.target_choice = TargetChoice::Listed;
  const TargetSet any{{kruskal_oracle(inst, inst.means).chosen}, false};
  const auto r = run_experiment(inst, any, spec, 1, 1);
  const auto& reg = r.aggregate.regret_mean;
  EXPECT_GE(reg.front(), 0.0);
  // Regret over the last quarter is well below the first quarter's.
  EXPECT_LT(reg[3] - reg[2], 0.5 * reg[0]);
}

TEST(RoundTrips, RandomInstancesSurviveSerialisation) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    for (const Instance& inst : {random_linear_instance(6, 8, 3, seed), random_coverage_instance(4, 4, 0.5, 2, seed),
                                 make_influence_instance(random_graph(5, 0.4, seed, true), 2)}) {
      const std::string text = format_instance(inst);
      EXPECT_EQ(format_instance(parse_instance(text)), text);
    }
  }
}
