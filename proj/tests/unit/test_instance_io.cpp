#include <gtest/gtest.h>

#include "cmab/instance_io.hpp"
#include "cmab/instances.hpp"
#include "cmab/rl_reduction.hpp"

using namespace cmab;

namespace {

void expect_round_trip(const Instance& inst) {
  const std::string text = format_instance(inst);
  const Instance back = parse_instance(text);
  EXPECT_EQ(format_instance(back), text);
  EXPECT_EQ(back.family, inst.family);
  EXPECT_EQ(back.direction, inst.direction);
  EXPECT_EQ(back.means, inst.means);
  EXPECT_EQ(back.smoothness, inst.smoothness);
  if (inst.enumerable()) {
    ASSERT_EQ(back.action_space().size(), inst.action_space().size());
    for (std::size_t i = 0; i < inst.action_space().size(); ++i) {
      EXPECT_EQ(back.action_space()[i].members, inst.action_space()[i].members);
      EXPECT_EQ(back.action_space()[i].observable, inst.action_space()[i].observable);
      EXPECT_DOUBLE_EQ(expected_reward(back, back.action_space()[i], back.means),
                       expected_reward(inst, inst.action_space()[i], inst.means));
    }
  }
}

int error_line(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(InstanceFile, RoundTripsEveryFamily) {
  expect_round_trip(build_hard_instance({5, 0.1, 3}));
  expect_round_trip(random_linear_instance(5, 8, 3, 2));
  expect_round_trip(make_spanning_tree_instance(random_connected_graph(6, 0.3, 1)));
  expect_round_trip(make_shortest_path_instance(random_connected_graph(6, 0.3, 2), 0, 5));
  expect_round_trip(random_coverage_instance(5, 4, 0.4, 2, 3));
  expect_round_trip(random_cascade_instance(6, 2, 4));
  expect_round_trip(make_influence_instance(random_graph(6, 0.3, 5, true), 2));
  expect_round_trip(reduce_to_cmab(random_mdp(2, 2, 2, 6)));

  SuperArm partial;
  partial.members = {0, 1};
  partial.trigger_prob = {0.25, 1.0};
  partial.offset = 0.5;
  expect_round_trip(make_linear_instance({0.1, 0.9}, {partial}, Direction::Minimize));
}

TEST(InstanceFile, FixtureMatchesBuilder) {
  const Instance file = load_instance(CMAB_TEST_DATA "/hard_i3.instance");
  const Instance built = build_hard_instance({5, 0.1, 3});
  EXPECT_EQ(file.means, built.means);
  for (std::size_t i = 0; i < built.action_space().size(); ++i)
    EXPECT_NEAR(expected_reward(file, file.action_space()[i], file.means),
                expected_reward(built, built.action_space()[i], built.means), 1e-12);
}

TEST(InstanceFile, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("linear 2 maximize\nmeans 0.5 oops\n"), 2);
  EXPECT_EQ(error_line("linear 2 maximize\nmeans 0.5 0.5\nbogus 1\n"), 3);
  EXPECT_EQ(error_line("linear 2 sideways\n"), 1);
  EXPECT_EQ(error_line("# comment\n\nlinear 2 maximize\nmeans 0.5\n"), 4);
  EXPECT_EQ(error_line("spanning-tree 2 minimize\nedge 0 1\n"), 2);
  EXPECT_EQ(error_line("linear 3 maximize\nmeans 0.5 0.5\narm A 0 : 0\n"), 2);
  EXPECT_THROW(parse_instance(""), ParseError);
  EXPECT_THROW(load_instance("/nonexistent/file.instance"), ParseError);
}

TEST(TargetFile, LabelsMembersAndClosure) {
  const Instance hard = build_hard_instance({4, 0.1, 2});
  const TargetSet t = parse_targets(hard, "arm S2\narm S3\n");
  ASSERT_EQ(t.arms.size(), 2u);
  EXPECT_EQ(t.arms[0].id, 2);
  EXPECT_EQ(format_targets(t), "arm S2\narm S3\n");

  const Instance cascade = make_cascade_instance({0.1, 0.5, 0.3, 0.2}, 2);
  const TargetSet c = parse_targets(cascade, "permutation_closed 1\nmembers 2 1\n");
  EXPECT_TRUE(c.permutation_closed);
  EXPECT_EQ(c.arms[0].members, (std::vector<int>{2, 1}));
  const TargetSet back = parse_targets(cascade, format_targets(c));
  EXPECT_EQ(back.arms[0].members, c.arms[0].members);
  EXPECT_TRUE(back.permutation_closed);
}

TEST(TargetFile, Errors) {
  const Instance hard = build_hard_instance({4, 0.1, 2});
  EXPECT_THROW(parse_targets(hard, "arm S9\n"), ValidationError);
  EXPECT_THROW(parse_targets(hard, "# nothing\n"), ParseError);
  const Instance st = make_spanning_tree_instance(GraphSpec{3, {{0, 1, 0.1}, {1, 2, 0.2}, {0, 2, 0.3}}, false});
  try {
    parse_targets(st, "members 0 1\nmembers 0 1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}
