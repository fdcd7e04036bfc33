#include "cmab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cmab/oracles.hpp"

namespace cmab {

namespace {

std::vector<double> uniform_weights(std::size_t n, Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::vector<double> w(n);
  for (double& x : w) x = lo + (hi - lo) * rng.uniform();
  return w;
}

Instance graph_instance(Family family, GraphSpec graph, OutcomeModel outcomes, Direction direction) {
  graph.validate();
  Instance inst;
  inst.family = family;
  inst.direction = direction;
  inst.outcomes = outcomes;
  inst.means = MeanVector(graph.weights());
  inst.structure = GraphStructure{std::move(graph), -1, -1, 0};
  return inst;
}

}  // namespace

// ---- builders --------------------------------------------------------------

Instance make_linear_instance(std::vector<double> means, std::vector<SuperArm> arms, Direction direction,
                              OutcomeModel outcomes) {
  Instance inst;
  inst.family = Family::Linear;
  inst.direction = direction;
  inst.outcomes = outcomes;
  inst.means = MeanVector(std::move(means));
  for (std::size_t i = 0; i < arms.size(); ++i) {
    SuperArm& a = arms[i];
    a.id = static_cast<int>(i);
    if (a.label.empty()) a.label = "S" + std::to_string(i);
    if (a.observable.empty()) {
      a.observable = a.members;
      std::sort(a.observable.begin(), a.observable.end());
      a.observable.erase(std::unique(a.observable.begin(), a.observable.end()), a.observable.end());
    }
  }
  inst.arms = std::move(arms);
  inst.structure = LinearStructure{};
  inst.validate();
  return inst;
}

Instance make_mab_instance(std::vector<double> means) {
  std::vector<SuperArm> arms;
  for (std::size_t i = 0; i < means.size(); ++i) {
    SuperArm a;
    a.members = {static_cast<int>(i)};
    a.label = "arm" + std::to_string(i);
    arms.push_back(std::move(a));
  }
  return make_linear_instance(std::move(means), std::move(arms));
}

Instance make_spanning_tree_instance(GraphSpec graph, OutcomeModel outcomes) {
  if (graph.directed) throw ParameterError("spanning trees need an undirected graph");
  Instance inst = graph_instance(Family::SpanningTree, std::move(graph), outcomes, Direction::Minimize);
  inst.validate();
  return inst;
}

Instance make_shortest_path_instance(GraphSpec graph, int source, int dest, OutcomeModel outcomes) {
  Instance inst = graph_instance(Family::ShortestPath, std::move(graph), outcomes, Direction::Minimize);
  auto& gs = std::get<GraphStructure>(inst.structure);
  gs.source = source;
  gs.dest = dest;
  inst.validate();
  return inst;
}

Instance make_coverage_instance(int left, int right, const std::vector<Edge>& edges, int k) {
  Instance inst;
  inst.family = Family::Coverage;
  CoverageStructure c{left, right, {}, k};
  std::vector<double> means;
  for (const Edge& e : edges) {
    c.edges.emplace_back(e.u, e.v);
    means.push_back(e.weight);
  }
  inst.means = MeanVector(std::move(means));
  inst.structure = std::move(c);
  inst.validate();
  return inst;
}

Instance make_cascade_instance(std::vector<double> click_probabilities, int k) {
  Instance inst;
  inst.family = Family::Cascade;
  inst.means = MeanVector(std::move(click_probabilities));
  inst.structure = CascadeStructure{k};
  inst.validate();
  return inst;
}

Instance make_influence_instance(GraphSpec graph, int k) {
  Instance inst = graph_instance(Family::Influence, std::move(graph), OutcomeModel::Bernoulli, Direction::Maximize);
  auto& gs = std::get<GraphStructure>(inst.structure);
  gs.k = k;
  // Each live edge can add at most every node to the spread.
  inst.smoothness = std::max(1, gs.graph.nodes);
  inst.validate();
  return inst;
}

// ---- hard instance ---------------------------------------------------------

int hard_a(int, int j) { return j - 1; }
int hard_b(int n, int j) { return n + j - 1; }

Instance build_hard_instance(const HardInstanceParams& p) {
  if (p.n < 1) throw ParameterError("hard instance needs n >= 1");
  if (!(p.epsilon > 0.0 && p.epsilon < 0.125)) throw ParameterError("hard instance needs 0 < epsilon < 1/8");
  if (p.special < 1 || p.special > p.n) throw ParameterError("special index must lie in [1, n]");
  const int n = p.n;
  const double eps = p.epsilon;
  std::vector<double> means(static_cast<std::size_t>(2 * n));
  for (int j = 1; j <= n; ++j) {
    means[static_cast<std::size_t>(hard_a(n, j))] = j == p.special ? 1.0 : 1.0 - 2.0 * eps;
    means[static_cast<std::size_t>(hard_b(n, j))] = 1.0 - eps;
  }
  std::vector<SuperArm> arms;
  SuperArm s0;
  s0.label = "S0";
  s0.offset = 2.0 - 2.0 * eps;
  arms.push_back(s0);
  for (int j = 1; j <= n; ++j) {
    SuperArm s;
    s.label = "S" + std::to_string(j);
    s.members = {hard_a(n, j), hard_b(n, j)};
    arms.push_back(std::move(s));
  }
  SuperArm top;
  top.label = "S" + std::to_string(n + 1);
  for (int j = 1; j <= n; ++j) top.members.push_back(hard_b(n, j));
  top.offset = 1.0 - eps;
  arms.push_back(std::move(top));
  return make_linear_instance(std::move(means), std::move(arms));
}

const SuperArm& hard_arm(const Instance& hard, int j) {
  const auto& arms = hard.action_space();
  if (j < 0 || static_cast<std::size_t>(j) >= arms.size()) throw ParameterError("no super arm S" + std::to_string(j));
  return arms[static_cast<std::size_t>(j)];
}

TargetSet hard_targets(const Instance& hard) {
  TargetSet t;
  const int n = hard.m() / 2;
  for (int j = 1; j <= n; ++j) t.arms.push_back(hard_arm(hard, j));
  return t;
}

// ---- generators ------------------------------------------------------------

GraphSpec random_connected_graph(int nodes, double extra_edge_prob, std::uint64_t seed, bool directed) {
  if (nodes < 1) throw ParameterError("graph needs at least one node");
  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(nodes));
  std::iota(order.begin(), order.end(), 0);
  order = rng.sample(order, order.size());
  std::set<std::pair<int, int>> present;
  GraphSpec g;
  g.nodes = nodes;
  g.directed = directed;
  auto add = [&](int u, int v) {
    g.edges.push_back({u, v, rng.uniform()});
    present.emplace(u, v);
  };
  for (int i = 1; i < nodes; ++i) {
    const int u = order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i)))];
    const int v = order[static_cast<std::size_t>(i)];
    add(std::min(u, v), std::max(u, v));
    if (directed) add(std::max(u, v), std::min(u, v));
  }
  for (int u = 0; u < nodes; ++u) {
    for (int v = directed ? 0 : u + 1; v < nodes; ++v) {
      if (u == v || present.count({u, v})) continue;
      if (rng.bernoulli(extra_edge_prob)) add(u, v);
    }
  }
  return g;
}

GraphSpec random_graph(int nodes, double edge_prob, std::uint64_t seed, bool directed, double lo, double hi) {
  if (nodes < 1) throw ParameterError("graph needs at least one node");
  Rng rng(seed);
  GraphSpec g;
  g.nodes = nodes;
  g.directed = directed;
  for (int u = 0; u < nodes; ++u)
    for (int v = directed ? 0 : u + 1; v < nodes; ++v)
      if (u != v && rng.bernoulli(edge_prob)) g.edges.push_back({u, v, lo + (hi - lo) * rng.uniform()});
  return g;
}

Instance random_coverage_instance(int left, int right, double edge_prob, int k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < left; ++u) {
    bool any = false;
    for (int v = 0; v < right; ++v) {
      if (rng.bernoulli(edge_prob)) {
        edges.push_back({u, v, rng.uniform()});
        any = true;
      }
    }
    if (!any) edges.push_back({u, static_cast<int>(rng.below(static_cast<std::uint64_t>(right))), rng.uniform()});
  }
  return make_coverage_instance(left, right, edges, k);
}

Instance random_linear_instance(int m, int arms, int max_size, std::uint64_t seed) {
  if (m < 1 || arms < 2 || max_size < 1) throw ParameterError("random linear instance needs m >= 1, >= 2 arms");
  Rng rng(seed);
  auto means = uniform_weights(static_cast<std::size_t>(m), rng);
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  std::set<std::vector<int>> seen;
  std::vector<SuperArm> out;
  for (int tries = 0; static_cast<int>(out.size()) < arms; ++tries) {
    if (tries > 1000 * arms) throw GenerationError("could not draw enough distinct super arms");
    const int size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(max_size, m))));
    auto members = rng.sample(pool, static_cast<std::size_t>(size));
    std::sort(members.begin(), members.end());
    if (!seen.insert(members).second) continue;
    SuperArm a;
    a.members = std::move(members);
    out.push_back(std::move(a));
  }
  return make_linear_instance(std::move(means), std::move(out));
}

Instance random_cascade_instance(int m, int k, std::uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  return make_cascade_instance(uniform_weights(static_cast<std::size_t>(m), rng, lo, hi), k);
}

// ---- targets ---------------------------------------------------------------

namespace {

std::vector<double> average_out_weight(const Instance& coverage) {
  const auto& c = coverage.coverage();
  std::vector<double> total(static_cast<std::size_t>(c.left), 0.0);
  std::vector<int> count(static_cast<std::size_t>(c.left), 0);
  for (std::size_t e = 0; e < c.edges.size(); ++e) {
    total[static_cast<std::size_t>(c.edges[e].first)] += coverage.means[e];
    ++count[static_cast<std::size_t>(c.edges[e].first)];
  }
  for (std::size_t u = 0; u < total.size(); ++u) total[u] = count[u] ? total[u] / count[u] : 0.0;
  return total;
}

TargetSet single_target(const Instance& instance, std::vector<int> members) {
  TargetSet t;
  t.arms.push_back(make_arm(instance, std::move(members)));
  return t;
}

}  // namespace

TargetSet fixed_pmc_target(const Instance& coverage, int k) {
  const auto avg = average_out_weight(coverage);
  const int left = coverage.coverage().left;
  if (k < 1 || 2 * k > left) throw ParameterError("fixed target needs 1 <= K and 2K <= |L|");
  std::vector<int> order(static_cast<std::size_t>(left));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return avg[static_cast<std::size_t>(a)] > avg[static_cast<std::size_t>(b)];
  });
  std::vector<int> members(order.begin() + k, order.begin() + 2 * k);
  std::sort(members.begin(), members.end());
  return single_target(coverage, std::move(members));
}

TargetSet random_pmc_target(const Instance& coverage, int k, std::uint64_t seed) {
  const auto avg = average_out_weight(coverage);
  std::vector<int> eligible;
  for (std::size_t u = 0; u < avg.size(); ++u)
    if (avg[u] > 0.5) eligible.push_back(static_cast<int>(u));
  if (static_cast<int>(eligible.size()) < k)
    throw InfeasibleError("only " + std::to_string(eligible.size()) + " nodes have average weight above 0.5");
  Rng rng(seed);
  auto members = rng.sample(eligible, static_cast<std::size_t>(k));
  std::sort(members.begin(), members.end());
  return single_target(coverage, std::move(members));
}

PathTarget unattackable_path_target(const GraphSpec& graph, double theta, std::uint64_t seed, int max_steps,
                                    int max_sources) {
  if (!(theta > 0.0)) throw ParameterError("threshold theta must be positive");
  if (max_steps < 1) throw ParameterError("max_steps must be positive");
  graph.validate();
  if (graph.nodes < 3) throw GenerationError("graph too small for a non-trivial path target");
  Rng rng(seed);
  const auto adj = graph.out_edges();
  for (int attempt = 0; attempt < max_sources; ++attempt) {
    const int s = static_cast<int>(rng.below(static_cast<std::uint64_t>(graph.nodes)));
    std::vector<char> visited(static_cast<std::size_t>(graph.nodes), 0);
    visited[static_cast<std::size_t>(s)] = 1;
    std::vector<int> walk;
    double weight = 0.0;
    int at = s;
    for (int step = 0; step < max_steps; ++step) {
      std::vector<int> options;
      for (int e : adj[static_cast<std::size_t>(at)])
        if (!visited[static_cast<std::size_t>(graph.other_end(e, at))]) options.push_back(e);
      if (options.empty()) break;
      const int e = options[static_cast<std::size_t>(rng.below(options.size()))];
      at = graph.other_end(e, at);
      visited[static_cast<std::size_t>(at)] = 1;
      walk.push_back(e);
      weight += graph.edges[static_cast<std::size_t>(e)].weight;

      Instance inst = make_shortest_path_instance(graph, s, at);
      const auto best = dijkstra_oracle(inst, inst.means);
      if (best.chosen.members.size() <= 1 || !(weight > best.value + theta)) continue;
      PathTarget out;
      out.source = s;
      out.dest = at;
      out.target = single_target(inst, walk);
      out.excess = weight - best.value;
      out.gap = gap_of(inst, out.target.arms[0], GapSolver::FamilyExact);
      if (!(out.gap < 0.0)) continue;
      out.instance = std::move(inst);
      return out;
    }
  }
  throw GenerationError("no unattackable path target found after " + std::to_string(max_sources) + " sources");
}

PathTarget random_path_target(const GraphSpec& graph, std::uint64_t seed, bool require_attackable, int max_tries) {
  graph.validate();
  if (graph.nodes < 2) throw GenerationError("graph too small for a path target");
  Rng rng(seed);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    const int s = static_cast<int>(rng.below(static_cast<std::uint64_t>(graph.nodes)));
    int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(graph.nodes - 1)));
    if (t >= s) ++t;
    const MeanVector random_weights(uniform_weights(graph.edges.size(), rng));
    Instance inst = make_shortest_path_instance(graph, s, t);
    OracleReport target;
    try {
      target = dijkstra_oracle(inst, random_weights);
    } catch (const InfeasibleError&) {
      continue;
    }
    PathTarget out;
    out.source = s;
    out.dest = t;
    out.target = single_target(inst, target.chosen.members);
    const auto& arm = out.target.arms[0];
    const double own = expected_reward(inst, arm, inst.means);
    const double best = dijkstra_oracle(inst, inst.means).value;
    out.excess = own - best;
    try {
      out.gap = gap_of(inst, arm, GapSolver::FamilyExact);
    } catch (const InfeasibleError&) {
      continue;  // a single s-t path leaves nothing to steer away from
    }
    if (require_attackable && !(out.gap > 0.0 && out.excess > 0.0)) continue;
    out.instance = std::move(inst);
    return out;
  }
  throw GenerationError("no suitable random path target after " + std::to_string(max_tries) + " draws");
}

TargetSet second_best_spanning_tree_target(const Instance& spanning_tree) {
  const auto best = kruskal_oracle(spanning_tree, spanning_tree.means);
  const auto second = best_competitor(spanning_tree, best.chosen, spanning_tree.means, GapSolver::FamilyExact);
  TargetSet t;
  t.arms.push_back(second.arm);
  return t;
}

TargetSet random_spanning_tree_target(const Instance& spanning_tree, std::uint64_t seed) {
  Rng rng(seed);
  const MeanVector w(uniform_weights(static_cast<std::size_t>(spanning_tree.m()), rng));
  TargetSet t;
  t.arms.push_back(kruskal_oracle(spanning_tree, w).chosen);
  return t;
}

TargetSet cascade_target(const Instance& cascade, int k, double threshold, std::uint64_t seed) {
  std::vector<int> eligible;
  for (int i = 0; i < cascade.m(); ++i)
    if (cascade.means[static_cast<std::size_t>(i)] > threshold) eligible.push_back(i);
  if (static_cast<int>(eligible.size()) < k)
    throw InfeasibleError("only " + std::to_string(eligible.size()) + " items exceed the click threshold");
  Rng rng(seed);
  auto items = rng.sample(eligible, static_cast<std::size_t>(k));
  std::sort(items.begin(), items.end());
  std::stable_sort(items.begin(), items.end(), [&](int a, int b) {
    return cascade.means[static_cast<std::size_t>(a)] > cascade.means[static_cast<std::size_t>(b)];
  });
  TargetSet t = single_target(cascade, std::move(items));
  t.permutation_closed = true;
  return t;
}

}  // namespace cmab
