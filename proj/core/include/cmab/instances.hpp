#pragma once

// Instance builders, synthetic generators and target-set constructions.

#include <cstdint>
#include <vector>

#include "cmab/attacks.hpp"
#include "cmab/environment.hpp"
#include "cmab/graph.hpp"

namespace cmab {

// ---- builders --------------------------------------------------------------

/// Enumerated linear instance; arm ids are reassigned to positions and
/// observable sets default to the members.
Instance make_linear_instance(std::vector<double> means, std::vector<SuperArm> arms,
                              Direction direction = Direction::Maximize,
                              OutcomeModel outcomes = OutcomeModel::Bernoulli);

/// Classical multi-armed bandit: one singleton super arm per base arm.
Instance make_mab_instance(std::vector<double> means);

Instance make_spanning_tree_instance(GraphSpec graph, OutcomeModel outcomes = OutcomeModel::Bernoulli);
Instance make_shortest_path_instance(GraphSpec graph, int source, int dest,
                                     OutcomeModel outcomes = OutcomeModel::Bernoulli);
/// `edges[i]` = (left node, right node, activation probability).
Instance make_coverage_instance(int left, int right, const std::vector<Edge>& edges, int k);
Instance make_cascade_instance(std::vector<double> click_probabilities, int k);
Instance make_influence_instance(GraphSpec graph, int k);

// ---- hard instance ---------------------------------------------------------

struct HardInstanceParams {
  int n = 5;
  double epsilon = 0.1;
  int special = 1;  ///< 1-based index i with mu_{a_i} = 1
};

/// Base arms a_j -> j - 1 and b_j -> n + j - 1. Super arm ids: S_0 = 0
/// (constant 2 - 2 eps, observes nothing), S_j = j (observes a_j, b_j) and
/// S_{n+1} = n + 1 (observes every b_j, constant part 1 - eps).
Instance build_hard_instance(const HardInstanceParams& params);

/// M = {S_1, ..., S_n}.
TargetSet hard_targets(const Instance& hard);
const SuperArm& hard_arm(const Instance& hard, int j);
/// Base-arm indices of a_j and b_j (1-based j).
int hard_a(int n, int j);
int hard_b(int n, int j);

// ---- synthetic generators --------------------------------------------------

/// Connected graph: a random spanning tree plus each remaining pair with
/// probability `extra_edge_prob`. Weights uniform in [0,1].
GraphSpec random_connected_graph(int nodes, double extra_edge_prob, std::uint64_t seed, bool directed = false);

/// Erdos-Renyi graph with uniform weights in [lo, hi].
GraphSpec random_graph(int nodes, double edge_prob, std::uint64_t seed, bool directed = false, double lo = 0.0,
                       double hi = 1.0);

/// Bipartite coverage instance: each (u, v) pair is an edge with probability
/// `edge_prob`; every left node keeps at least one edge.
Instance random_coverage_instance(int left, int right, double edge_prob, int k, std::uint64_t seed);

/// Random enumerated linear instance: `arms` distinct subsets of size 1..max_size.
Instance random_linear_instance(int m, int arms, int max_size, std::uint64_t seed);

Instance random_cascade_instance(int m, int k, std::uint64_t seed, double lo = 0.0, double hi = 1.0);

// ---- target generators -----------------------------------------------------

/// Left nodes ranked by average outgoing weight (descending, ties by id); the
/// arm made of ranks K+1 .. 2K.
TargetSet fixed_pmc_target(const Instance& coverage, int k);

/// K nodes sampled uniformly among those with average outgoing weight > 0.5.
TargetSet random_pmc_target(const Instance& coverage, int k, std::uint64_t seed);

struct PathTarget {
  int source = -1;
  int dest = -1;
  Instance instance;   ///< shortest-path instance on the input graph with these endpoints
  TargetSet target;
  double excess = 0.0;  ///< target weight minus shortest-path weight
  double gap = 0.0;
};

/// Self-avoiding random walk from a random source; stops at the first node k
/// whose walk weight exceeds the s-k shortest path by more than theta, where
/// that shortest path has more than one edge, and the walk is unattackable.
/// The source is resampled after `max_steps` steps; GenerationError after
/// `max_sources` sources.
PathTarget unattackable_path_target(const GraphSpec& graph, double theta, std::uint64_t seed, int max_steps = 50,
                                    int max_sources = 1000);

/// Random source and destination; target = shortest path under freshly
/// randomised weights. With `require_attackable`, draws are repeated until
/// the target's gap is positive.
PathTarget random_path_target(const GraphSpec& graph, std::uint64_t seed, bool require_attackable = true,
                              int max_tries = 1000);

/// The cheapest spanning tree other than the minimum one. InfeasibleError when unique.
TargetSet second_best_spanning_tree_target(const Instance& spanning_tree);

/// MST of the same topology under randomised weights.
TargetSet random_spanning_tree_target(const Instance& spanning_tree, std::uint64_t seed);

/// K items sampled among those with click probability > threshold, sorted by
/// probability descending (ties by id). The target set is permutation-closed.
TargetSet cascade_target(const Instance& cascade, int k, double threshold, std::uint64_t seed);

}  // namespace cmab
