#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "cmab/harness.hpp"
#include "cmab/instances.hpp"

using namespace cmab;

namespace {

RunSpec attack_spec(std::int64_t horizon, std::int64_t stride = 1) {
  RunSpec s;
  s.attack = AttackKind::Algorithm1;
  s.horizon = horizon;
  s.stride = stride;
  return s;
}

std::string aggregate_text(const ExperimentResult& r) {
  std::ostringstream out;
  write_aggregate_csv(out, r.aggregate);
  return out.str();
}

}  // namespace

TEST(Config, ParsesSectionsAndRejectsMistakes) {
  const auto cfg = ExperimentConfig::load(CMAB_TEST_DATA "/hard_attack.cfg");
  EXPECT_EQ(cfg.builder, "hard");
  EXPECT_EQ(cfg.params.at("n"), "4");
  EXPECT_EQ(cfg.run.attack, AttackKind::Algorithm1);
  EXPECT_EQ(cfg.run.horizon, 2000);
  EXPECT_EQ(cfg.repetitions, 3);
  EXPECT_TRUE(cfg.run.keep_log);
  EXPECT_NO_THROW(cfg.validate());

  EXPECT_THROW(ExperimentConfig::load(CMAB_TEST_DATA "/bad_key.cfg"), ConfigurationError);
  try {
    parse_config_text("run.horizon = 5\nrun.horizon = 6\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_config_text("# ok\nhorizon 5\n"), ParseError);
  EXPECT_THROW(ExperimentConfig::parse("instance.builder = hard\nrun.horizon = ten\n"), ConfigurationError);
  EXPECT_THROW(ExperimentConfig::parse("instance.builder = hard\nattack.kind = teleport\n"), ConfigurationError);

  auto invalid = [](const std::string& text) { EXPECT_THROW(ExperimentConfig::parse(text).validate(), ConfigurationError) << text; };
  invalid("instance.builder = hard\nrun.horizon = 0\n");
  invalid("instance.builder = hard\nrun.repetitions = 0\n");
  invalid("instance.builder = warp\n");
  invalid("instance.builder = hard\nlearner.kind = cascade-ucb1\n");
  invalid("instance.builder = hard\nattack.budget = 5\n");
  invalid("instance.builder = hard\nattack.kind = algorithm1\nattack.budget = 5\nattack.budget_exponent = 0.5\n");
  invalid("run.horizon = 10\n");
}

TEST(Scenario, BuildersProduceTargets) {
  const std::vector<std::string> configs = {
      "instance.builder = hard\ninstance.n = 3\ntarget.kind = all\n",
      "instance.builder = mab\ninstance.means = 0.2 0.5 0.7\ntarget.kind = labels\ntarget.labels = arm1\n",
      "instance.builder = random-linear\ninstance.m = 6\ninstance.arms = 10\ninstance.max_size = 3\ntarget.kind = index\ntarget.index = 4\n",
      "instance.builder = spanning-tree\ninstance.nodes = 5\ninstance.edge_prob = 0.4\ntarget.kind = second-best\n",
      "instance.builder = shortest-path\ninstance.nodes = 7\ninstance.edge_prob = 0.3\ntarget.kind = random\n",
      "instance.builder = coverage\ninstance.left = 6\ninstance.right = 5\ninstance.edge_prob = 0.5\ninstance.k = 2\ntarget.kind = fixed\n",
      "instance.builder = cascade\ninstance.m = 6\ninstance.k = 2\ntarget.kind = random\ntarget.threshold = 0.1\n",
      "instance.builder = influence\ninstance.nodes = 6\ninstance.edge_prob = 0.3\ninstance.k = 2\ntarget.kind = random\n",
      "instance.builder = mdp\ninstance.states = 2\ninstance.actions = 2\ninstance.horizon = 2\ntarget.kind = random\n",
  };
  for (const auto& text : configs) {
    const Scenario s = build_scenario(ExperimentConfig::parse(text));
    EXPECT_FALSE(s.targets.arms.empty()) << text;
    for (const auto& arm : s.targets.arms) EXPECT_NO_THROW(check_arm(s.instance, arm)) << text;
  }
  EXPECT_THROW(build_scenario(ExperimentConfig::parse("instance.builder = hard\ntarget.kind = second-best\n")),
               ConfigurationError);
}

TEST(Runs, SingleRoundWithoutAttack) {
  const Instance inst = build_hard_instance({3, 0.1, 1});
  RunSpec spec;
  spec.target_choice = TargetChoice::Listed;
  const auto r = run_experiment(inst, hard_targets(inst), spec, 1, 0);
  EXPECT_EQ(r.aggregate.rounds, (std::vector<std::int64_t>{1}));
  EXPECT_EQ(r.aggregate.cost_mean, (std::vector<double>{0.0}));
  EXPECT_EQ(r.aggregate.cost_var, (std::vector<double>{0.0}));
}

TEST(Runs, KnownMeanAttackSteersCucb) {
  const Instance inst = build_hard_instance({4, 0.1, 2});
  const std::int64_t T = 100'000;
  const auto attacked = run_experiment(inst, hard_targets(inst), attack_spec(T, 1000), 1, 3);
  EXPECT_EQ(attacked.plan.target.label, "S2");
  const double pulls = attacked.aggregate.target_pulls_mean.back();
  const double cost = attacked.aggregate.cost_mean.back();
  EXPECT_GE(pulls, 0.75 * T);
  // Only the four b entries of the bridge arm can ever be rewritten.
  EXPECT_LE(cost, 4.0 * (T - pulls));
  const auto& c = attacked.aggregate.cost_mean;
  const double early = c[9] / 10'000.0;
  EXPECT_LT(cost / T, 0.5 * early);

  RunSpec wrong = attack_spec(T, 1000);
  wrong.target_choice = TargetChoice::Listed;
  wrong.budget = 0;
  TargetSet s1{{hard_arm(inst, 1)}, false};
  const auto missed = run_experiment(inst, s1, wrong, 1, 3);
  EXPECT_LE(missed.aggregate.target_pulls_mean.back(), T / 2.0);
  EXPECT_EQ(missed.aggregate.cost_mean.back(), 0.0);
}

TEST(Runs, SameSeedsGiveIdenticalCsv) {
  const Instance inst = build_hard_instance({4, 0.1, 3});
  const RunSpec spec = attack_spec(3000, 50);
  const auto a = run_experiment(inst, hard_targets(inst), spec, 4, 11, 1);
  const auto b = run_experiment(inst, hard_targets(inst), spec, 4, 11, 1);
  const auto c = run_experiment(inst, hard_targets(inst), spec, 4, 11, 4);
  EXPECT_EQ(aggregate_text(a), aggregate_text(b));
  EXPECT_EQ(aggregate_text(a), aggregate_text(c));
  const auto d = run_experiment(inst, hard_targets(inst), spec, 4, 12, 1);
  EXPECT_NE(aggregate_text(a), aggregate_text(d));
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(a.repetitions[r].seed, repetition_seed(11, r));
}

TEST(Runs, ReplayAuditMatchesSeries) {
  const Instance inst = build_hard_instance({4, 0.1, 2});
  RunSpec spec = attack_spec(2000, 100);
  spec.keep_log = true;
  const auto r = run_experiment(inst, hard_targets(inst), spec, 1, 5);
  std::stringstream buf;
  write_round_log(buf, r.repetitions[0].log);
  const auto log = read_round_log(buf);
  ASSERT_EQ(log.size(), 2000u);
  const ReplayAudit audit = audit_replay(inst, r.plan, log, r.repetitions[0].series);
  EXPECT_TRUE(audit.matches) << audit.mismatch;
  EXPECT_EQ(static_cast<double>(audit.cost), r.repetitions[0].series.cost.back());

  auto tampered = r.repetitions[0].series;
  tampered.cost.back() += 1.0;
  EXPECT_FALSE(audit_replay(inst, r.plan, log, tampered).matches);
}

TEST(Runs, BudgetStopsCorruption) {
  const Instance inst = build_hard_instance({4, 0.1, 2});
  RunSpec spec = attack_spec(5000, 5000);
  spec.budget_exponent = 0.5;
  const auto r = run_experiment(inst, hard_targets(inst), spec, 2, 0);
  EXPECT_EQ(*r.plan.budget, 70);
  EXPECT_LE(r.aggregate.cost_mean.back(), 70.0);
}

TEST(Runs, CascadeAndRegret) {
  const Instance inst = make_cascade_instance({0.05, 0.6, 0.1, 0.5, 0.05}, 2);
  RunSpec spec;
  spec.learner = LearnerKind::CascadeUcb1;
  spec.horizon = 20'000;
  spec.stride = 20'000;
  spec.target_choice = TargetChoice::Listed;
  spec.regret = RegretReference::Optimum;
  const auto r = run_experiment(inst, TargetSet{{make_arm(inst, {1, 3})}, true}, spec, 1, 2);
  EXPECT_NEAR(r.plan.reference_reward, 0.8, 1e-12);
  EXPECT_GE(r.aggregate.target_pulls_mean.back(), 0.8 * 20'000);
  EXPECT_GE(r.aggregate.regret_mean.back(), 0.0);
  EXPECT_LT(r.aggregate.regret_mean.back(), 0.05 * 20'000);
}

TEST(Aggregate, SampleVariance) {
  std::vector<RepetitionResult> reps(3);
  const double costs[] = {1.0, 2.0, 6.0};
  for (std::size_t i = 0; i < 3; ++i) {
    auto& s = reps[i].series;
    s.rounds = {10};
    s.cost = {costs[i]};
    s.target_pulls = {0.0};
    s.regret = {0.0};
    s.target_fraction = {1.0};
  }
  const AggregateSeries a = aggregate(reps);
  EXPECT_DOUBLE_EQ(a.cost_mean[0], 3.0);
  EXPECT_DOUBLE_EQ(a.cost_var[0], 7.0);
  EXPECT_DOUBLE_EQ(a.target_fraction_var[0], 0.0);
}

TEST(Csv, NumberFormattingAndHeader) {
  EXPECT_EQ(format_number(3.0), "3");
  EXPECT_EQ(format_number(-12.0), "-12");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1e20), "1e+20");
  EXPECT_EQ(format_number(4611686018427387904.0), "4611686018427387904");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);

  AggregateSeries a;
  a.rounds = {5};
  a.cost_mean = {1.5};
  a.cost_var = {0.25};
  a.target_pulls_mean = {4};
  a.target_pulls_var = {0};
  a.regret_mean = {0.5};
  a.regret_var = {0};
  a.target_fraction_mean = {1};
  a.target_fraction_var = {0};
  std::ostringstream out;
  write_aggregate_csv(out, a);
  EXPECT_EQ(out.str(), std::string(kAggregateHeader) + "\n5,1.5,0.25,4,0,0.5,0,1,0\n");
}

TEST(Csv, ConfigRunWritesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "cmab_harness_test";
  std::filesystem::remove_all(dir);
  auto cfg = ExperimentConfig::load(CMAB_TEST_DATA "/hard_attack.cfg");
  cfg.output_dir = dir;
  run_experiment(cfg);
  for (const char* f : {"aggregate.csv", "rep_000.csv", "rep_002.csv", "rounds_001.csv", "gaps.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::ifstream in(dir / "aggregate.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kAggregateHeader);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 20);
  std::filesystem::remove_all(dir);
}

TEST(Hardness, GuardsAndSmallRun) {
  EXPECT_THROW(hardness_demo({.n = 1}), ParameterError);
  EXPECT_THROW(hardness_demo({.n = 9}), ParameterError);
  EXPECT_THROW(hardness_demo({.epsilon = 0.125}), ParameterError);
  EXPECT_THROW(hardness_demo({.n = 3, .special = 4}), ParameterError);

  const HardnessReport r = hardness_demo({.n = 3, .epsilon = 0.1, .horizon = 200'000, .known_horizon = 10'000});
  EXPECT_EQ(r.special, 3);
  EXPECT_DOUBLE_EQ(r.growth_bound, 5.0);
  ASSERT_FALSE(r.visit_rounds.empty());
  EXPECT_EQ(r.bridge_pulls.size(), r.visit_rounds.size());
  for (std::size_t l = 1; l < r.visit_rounds.size(); ++l) EXPECT_GT(r.visit_rounds[l], r.visit_rounds[l - 1]);
  EXPECT_EQ(r.growth.size() + 1, r.bridge_pulls.size());
  EXPECT_GT(r.known_target_pulls, 0);
  std::ostringstream out;
  write_hardness_report(out, r);
  EXPECT_FALSE(out.str().empty());
}

TEST(Classification, ExitCodes) {
  EXPECT_EQ(exit_code(Classification::Attackable), 0);
  EXPECT_EQ(exit_code(Classification::Unattackable), 2);
  EXPECT_EQ(exit_code(Classification::Boundary), 3);
}
