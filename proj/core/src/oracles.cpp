#include "cmab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>

namespace cmab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_set(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

bool is_excluded(const SuperArm& candidate, const SuperArm& excluded, bool permutations_too) {
  if (candidate.id >= 0 && excluded.id >= 0) return candidate.id == excluded.id;
  if (candidate.offset != excluded.offset) return false;
  return permutations_too ? same_set(candidate.members, excluded.members)
                          : candidate.members == excluded.members;
}

OracleReport report(const Instance& instance, std::vector<int> members, const MeanVector& query, bool exact) {
  OracleReport r;
  r.chosen = make_arm(instance, std::move(members));
  r.value = expected_reward(instance, r.chosen, query);
  r.exact = exact;
  return r;
}

void require_length(const Instance& instance, const MeanVector& query) {
  if (static_cast<int>(query.size()) != instance.m())
    throw InstanceMismatchError("query vector has length " + std::to_string(query.size()) + ", instance has " +
                                std::to_string(instance.m()) + " base arms");
}

// ---- shortest paths --------------------------------------------------------

struct PathQuery {
  const GraphSpec& g;
  std::span<const double> w;
  std::vector<char> banned_node;
  std::vector<char> banned_edge;
};

// Edge lists for the forward (u -> v) and reverse directions, honouring bans.
std::vector<std::vector<int>> incidence(const PathQuery& q, bool reverse) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(q.g.nodes));
  for (std::size_t e = 0; e < q.g.edges.size(); ++e) {
    if (q.banned_edge[e]) continue;
    const Edge& edge = q.g.edges[e];
    if (q.g.directed) {
      adj[static_cast<std::size_t>(reverse ? edge.v : edge.u)].push_back(static_cast<int>(e));
    } else {
      adj[static_cast<std::size_t>(edge.u)].push_back(static_cast<int>(e));
      adj[static_cast<std::size_t>(edge.v)].push_back(static_cast<int>(e));
    }
  }
  return adj;
}

int head(const GraphSpec& g, int e, int from, bool reverse) {
  const Edge& edge = g.edges[static_cast<std::size_t>(e)];
  if (g.directed) return reverse ? edge.u : edge.v;
  return edge.u == from ? edge.v : edge.u;
}

// Shortest simple path with the lexicographically smallest node sequence among
// all shortest ones. Distances to `dest` are computed first; a DFS over tight
// edges in (next node, edge id) order then returns the canonical path.
std::optional<std::vector<int>> canonical_shortest_path(const PathQuery& q, int source, int dest) {
  const auto n = static_cast<std::size_t>(q.g.nodes);
  if (q.banned_node[static_cast<std::size_t>(source)] || q.banned_node[static_cast<std::size_t>(dest)]) return std::nullopt;
  std::vector<double> dist(n, kInf);
  const auto rev = incidence(q, true);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(dest)] = 0.0;
  heap.emplace(0.0, dest);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (int e : rev[static_cast<std::size_t>(u)]) {
      const int v = head(q.g, e, u, true);
      if (q.banned_node[static_cast<std::size_t>(v)]) continue;
      const double nd = d + q.w[static_cast<std::size_t>(e)];
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  if (dist[static_cast<std::size_t>(source)] == kInf) return std::nullopt;

  const auto fwd = incidence(q, false);
  const auto tight = [&](int u, int e, int v) {
    const double lhs = q.w[static_cast<std::size_t>(e)] + dist[static_cast<std::size_t>(v)];
    const double rhs = dist[static_cast<std::size_t>(u)];
    return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
  };
  std::vector<char> on_path(n, 0);
  std::vector<int> path;
  std::function<bool(int)> dfs = [&](int u) {
    if (u == dest) return true;
    std::vector<std::pair<int, int>> next;
    for (int e : fwd[static_cast<std::size_t>(u)]) {
      const int v = head(q.g, e, u, false);
      if (!q.banned_node[static_cast<std::size_t>(v)] && !on_path[static_cast<std::size_t>(v)] &&
          dist[static_cast<std::size_t>(v)] < kInf && tight(u, e, v))
        next.emplace_back(v, e);
    }
    std::sort(next.begin(), next.end());
    for (const auto& [v, e] : next) {
      on_path[static_cast<std::size_t>(v)] = 1;
      path.push_back(e);
      if (dfs(v)) return true;
      path.pop_back();
      on_path[static_cast<std::size_t>(v)] = 0;
    }
    return false;
  };
  on_path[static_cast<std::size_t>(source)] = 1;
  if (!dfs(source)) return std::nullopt;
  return path;
}

double path_cost(std::span<const double> w, const std::vector<int>& edges) {
  double c = 0.0;
  for (int e : edges) c += w[static_cast<std::size_t>(e)];
  return c;
}

std::vector<int> path_nodes(const GraphSpec& g, int source, const std::vector<int>& edges) {
  std::vector<int> nodes{source};
  for (int e : edges) nodes.push_back(head(g, e, nodes.back(), false));
  return nodes;
}

// Best simple path that differs from `avoid` (a source-dest path): spur
// deviations in the manner of Yen's algorithm for the second path.
std::optional<std::vector<int>> second_path(const GraphSpec& g, int source, int dest, std::span<const double> w,
                                            const std::vector<int>& avoid) {
  const auto nodes = path_nodes(g, source, avoid);
  std::optional<std::vector<int>> best;
  double best_cost = kInf;
  for (std::size_t i = 0; i < avoid.size(); ++i) {
    PathQuery q{g, w, std::vector<char>(static_cast<std::size_t>(g.nodes), 0),
                std::vector<char>(g.edges.size(), 0)};
    for (std::size_t j = 0; j < i; ++j) q.banned_node[static_cast<std::size_t>(nodes[j])] = 1;
    q.banned_edge[static_cast<std::size_t>(avoid[i])] = 1;
    auto spur = canonical_shortest_path(q, nodes[i], dest);
    if (!spur) continue;
    std::vector<int> candidate(avoid.begin(), avoid.begin() + static_cast<std::ptrdiff_t>(i));
    candidate.insert(candidate.end(), spur->begin(), spur->end());
    const double c = path_cost(w, candidate);
    if (c < best_cost ||
        (c == best_cost && path_nodes(g, source, candidate) < path_nodes(g, source, *best))) {
      best_cost = c;
      best = std::move(candidate);
    }
  }
  return best;
}

// ---- spanning trees --------------------------------------------------------

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

std::vector<int> kruskal(const GraphSpec& g, std::span<const double> w) {
  std::vector<int> order(g.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return w[static_cast<std::size_t>(a)] < w[static_cast<std::size_t>(b)];
  });
  Dsu dsu(g.nodes);
  std::vector<int> tree;
  for (int e : order) {
    const Edge& edge = g.edges[static_cast<std::size_t>(e)];
    if (dsu.unite(edge.u, edge.v)) tree.push_back(e);
  }
  if (static_cast<int>(tree.size()) != std::max(g.nodes - 1, 0))
    throw InfeasibleError("graph is disconnected; no spanning tree exists");
  std::sort(tree.begin(), tree.end());
  return tree;
}

// Tree edges on the u-v path inside `tree`.
std::vector<int> tree_path(const GraphSpec& g, const std::vector<int>& tree, int u, int v) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.nodes));
  for (int e : tree) {
    adj[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].u)].push_back(e);
    adj[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].v)].push_back(e);
  }
  std::vector<int> via(static_cast<std::size_t>(g.nodes), -2);
  std::queue<int> bfs;
  via[static_cast<std::size_t>(u)] = -1;
  bfs.push(u);
  while (!bfs.empty()) {
    const int x = bfs.front();
    bfs.pop();
    for (int e : adj[static_cast<std::size_t>(x)]) {
      const int y = g.other_end(e, x);
      if (via[static_cast<std::size_t>(y)] == -2) {
        via[static_cast<std::size_t>(y)] = e;
        bfs.push(y);
      }
    }
  }
  std::vector<int> path;
  for (int x = v; x != u;) {
    const int e = via[static_cast<std::size_t>(x)];
    path.push_back(e);
    x = g.other_end(e, x);
  }
  return path;
}

// Cheapest spanning tree different from `tree`: best single edge swap.
std::optional<std::vector<int>> best_swap_tree(const GraphSpec& g, std::span<const double> w,
                                               const std::vector<int>& tree) {
  std::vector<char> in_tree(g.edges.size(), 0);
  for (int e : tree) in_tree[static_cast<std::size_t>(e)] = 1;
  double best_delta = kInf;
  int best_in = -1, best_out = -1;
  for (std::size_t f = 0; f < g.edges.size(); ++f) {
    if (in_tree[f]) continue;
    for (int e : tree_path(g, tree, g.edges[f].u, g.edges[f].v)) {
      const double delta = w[f] - w[static_cast<std::size_t>(e)];
      if (delta < best_delta || (delta == best_delta && std::pair(static_cast<int>(f), e) < std::pair(best_in, best_out))) {
        best_delta = delta;
        best_in = static_cast<int>(f);
        best_out = e;
      }
    }
  }
  if (best_in < 0) return std::nullopt;
  std::vector<int> swapped;
  for (int e : tree)
    if (e != best_out) swapped.push_back(e);
  swapped.push_back(best_in);
  std::sort(swapped.begin(), swapped.end());
  return swapped;
}

// ---- influence -------------------------------------------------------------

std::vector<int> greedy_seeds(const GraphSpec& g, int k, std::span<const double> q, int samples,
                              std::uint64_t seed, double* spread) {
  Rng rng(seed);
  const std::size_t m = g.edges.size();
  std::vector<char> live(static_cast<std::size_t>(samples) * m);
  for (int s = 0; s < samples; ++s)
    for (std::size_t e = 0; e < m; ++e) live[static_cast<std::size_t>(s) * m + e] = rng.bernoulli(q[e]);
  const auto adj = g.out_edges();
  const auto n = static_cast<std::size_t>(g.nodes);
  std::vector<char> active(static_cast<std::size_t>(samples) * n, 0);
  std::vector<char> chosen(n, 0);
  std::vector<int> seeds;
  std::vector<int> stamp(n, -1);
  int stamp_id = 0;
  std::vector<int> stack;
  double total = 0.0;

  // Nodes newly reached from v in sample s; marks them when `commit`.
  auto reach = [&](int s, int v, bool commit) {
    char* act = &active[static_cast<std::size_t>(s) * n];
    const char* lv = &live[static_cast<std::size_t>(s) * m];
    if (act[v]) return 0;
    ++stamp_id;
    int count = 0;
    stack.assign(1, v);
    stamp[static_cast<std::size_t>(v)] = stamp_id;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      ++count;
      if (commit) act[u] = 1;
      for (int e : adj[static_cast<std::size_t>(u)]) {
        if (!lv[e]) continue;
        const int w = g.other_end(e, u);
        if (act[w] || stamp[static_cast<std::size_t>(w)] == stamp_id) continue;
        stamp[static_cast<std::size_t>(w)] = stamp_id;
        stack.push_back(w);
      }
    }
    return count;
  };

  for (int round = 0; round < k; ++round) {
    long best_gain = -1;
    int best = -1;
    for (int v = 0; v < g.nodes; ++v) {
      if (chosen[static_cast<std::size_t>(v)]) continue;
      long gain = 0;
      for (int s = 0; s < samples; ++s) gain += reach(s, v, false);
      if (gain > best_gain) {
        best_gain = gain;
        best = v;
      }
    }
    chosen[static_cast<std::size_t>(best)] = 1;
    seeds.push_back(best);
    for (int s = 0; s < samples; ++s) reach(s, best, true);
    total += static_cast<double>(best_gain);
  }
  if (spread) *spread = total / samples;
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

// Best set over single swaps of one member of `base` for one non-member.
Competitor best_single_swap(const Instance& instance, const std::vector<int>& base, int universe,
                            const MeanVector& query) {
  Competitor best;
  best.value = instance.direction == Direction::Maximize ? -kInf : kInf;
  best.exact = false;
  std::vector<char> in(static_cast<std::size_t>(universe), 0);
  for (int x : base) in[static_cast<std::size_t>(x)] = 1;
  bool found = false;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (int j = 0; j < universe; ++j) {
      if (in[static_cast<std::size_t>(j)]) continue;
      auto members = base;
      members[i] = j;
      std::sort(members.begin(), members.end());
      SuperArm arm = make_arm(instance, members);
      const double v = expected_reward(instance, arm, query);
      if (!found || better(instance.direction, v, best.value)) {
        best.arm = std::move(arm);
        best.value = v;
        found = true;
      }
    }
  }
  if (!found) throw InfeasibleError("no competitor super arm exists");
  return best;
}

Competitor brute_force_competitor(const Instance& instance, const SuperArm& excluded, const MeanVector& query,
                                  bool permutations_too) {
  const std::vector<SuperArm> owned = instance.arms ? std::vector<SuperArm>{} : enumerate_action_space(instance);
  const auto& arms = instance.arms ? *instance.arms : owned;
  const SuperArm* best = nullptr;
  double best_value = 0.0;
  for (const SuperArm& a : arms) {
    if (is_excluded(a, excluded, permutations_too)) continue;
    const double v = expected_reward(instance, a, query);
    if (!best || better(instance.direction, v, best_value)) {
      best = &a;
      best_value = v;
    }
  }
  if (!best) throw InfeasibleError("no competitor super arm exists");
  return {*best, best_value, true};
}

}  // namespace

// ---- oracles ---------------------------------------------------------------

OracleReport brute_force_oracle(const Instance& instance, const MeanVector& query, std::size_t cap) {
  require_length(instance, query);
  const std::vector<SuperArm> owned = instance.arms ? std::vector<SuperArm>{} : enumerate_action_space(instance, cap);
  const auto& arms = instance.arms ? *instance.arms : owned;
  if (arms.size() > cap) throw CapacityError("action space exceeds " + std::to_string(cap) + " super arms");
  if (arms.empty()) throw InfeasibleError("empty action space");
  std::size_t best = 0;
  double best_value = expected_reward(instance, arms[0], query);
  for (std::size_t i = 1; i < arms.size(); ++i) {
    const double v = expected_reward(instance, arms[i], query);
    if (better(instance.direction, v, best_value)) {
      best = i;
      best_value = v;
    }
  }
  return {arms[best], best_value, true};
}

OracleReport kruskal_oracle(const Instance& instance, const MeanVector& query) {
  require_length(instance, query);
  if (instance.family != Family::SpanningTree) throw ConfigurationError("kruskal oracle needs a spanning-tree instance");
  return report(instance, kruskal(instance.graph().graph, query.values()), query, true);
}

OracleReport dijkstra_oracle(const Instance& instance, const MeanVector& query) {
  return dijkstra_oracle(instance, instance.graph().source, instance.graph().dest, query);
}

OracleReport dijkstra_oracle(const Instance& instance, int source, int dest, const MeanVector& query) {
  require_length(instance, query);
  if (instance.family != Family::ShortestPath) throw ConfigurationError("dijkstra oracle needs a shortest-path instance");
  const auto& g = instance.graph().graph;
  if (source < 0 || source >= g.nodes || dest < 0 || dest >= g.nodes) throw ParameterError("source or dest out of range");
  PathQuery q{g, query.values(), std::vector<char>(static_cast<std::size_t>(g.nodes), 0),
              std::vector<char>(g.edges.size(), 0)};
  auto path = canonical_shortest_path(q, source, dest);
  if (!path) throw InfeasibleError("node " + std::to_string(dest) + " is unreachable from " + std::to_string(source));
  OracleReport r;
  r.chosen.members = std::move(*path);
  r.chosen.observable = observable_set(instance, r.chosen.members);
  r.chosen.label = default_label(r.chosen.members);
  if (source == instance.graph().source && dest == instance.graph().dest) r.chosen = make_arm(instance, r.chosen.members);
  r.value = path_cost(query.values(), r.chosen.members);
  return r;
}

OracleReport greedy_pmc_oracle(const Instance& instance, int k, const MeanVector& query) {
  require_length(instance, query);
  if (instance.family != Family::Coverage) throw ConfigurationError("greedy coverage oracle needs a coverage instance");
  const auto& c = instance.coverage();
  if (k < 1 || k > c.left) throw ParameterError("k = " + std::to_string(k) + " outside [1, |L|]");
  std::vector<std::vector<std::pair<int, double>>> out(static_cast<std::size_t>(c.left));
  for (std::size_t e = 0; e < c.edges.size(); ++e)
    out[static_cast<std::size_t>(c.edges[e].first)].emplace_back(c.edges[e].second, query[e]);
  std::vector<double> miss(static_cast<std::size_t>(c.right), 1.0);
  std::vector<char> chosen(static_cast<std::size_t>(c.left), 0);
  std::vector<int> picked;
  for (int round = 0; round < k; ++round) {
    double best_gain = -1.0;
    int best = -1;
    for (int u = 0; u < c.left; ++u) {
      if (chosen[static_cast<std::size_t>(u)]) continue;
      std::vector<double> after = miss;
      for (const auto& [v, p] : out[static_cast<std::size_t>(u)]) after[static_cast<std::size_t>(v)] *= 1.0 - p;
      double gain = 0.0;
      for (std::size_t v = 0; v < miss.size(); ++v) gain += miss[v] - after[v];
      if (gain > best_gain) {
        best_gain = gain;
        best = u;
      }
    }
    chosen[static_cast<std::size_t>(best)] = 1;
    picked.push_back(best);
    for (const auto& [v, p] : out[static_cast<std::size_t>(best)]) miss[static_cast<std::size_t>(v)] *= 1.0 - p;
  }
  std::sort(picked.begin(), picked.end());
  return report(instance, std::move(picked), query, false);
}

OracleReport topk_cascade_oracle(const Instance& instance, int k, const MeanVector& query) {
  require_length(instance, query);
  const int m = instance.m();
  if (k < 1 || k >= m) throw ParameterError("list length K = " + std::to_string(k) + " must satisfy 1 <= K < m = " + std::to_string(m));
  std::vector<int> items(static_cast<std::size_t>(m));
  std::iota(items.begin(), items.end(), 0);
  std::stable_sort(items.begin(), items.end(), [&](int a, int b) {
    return query[static_cast<std::size_t>(a)] > query[static_cast<std::size_t>(b)];
  });
  items.resize(static_cast<std::size_t>(k));
  return report(instance, std::move(items), query, true);
}

OracleReport mc_greedy_im_oracle(const Instance& instance, int k, const MeanVector& query, int samples,
                                 std::uint64_t seed) {
  require_length(instance, query);
  if (instance.family != Family::Influence) throw ConfigurationError("influence oracle needs an influence instance");
  const auto& g = instance.graph().graph;
  if (k < 1 || k > g.nodes) throw ParameterError("seed-set size out of range");
  if (samples < 100) throw ParameterError("at least 100 diffusion samples are required");
  double spread = 0.0;
  auto seeds = greedy_seeds(g, k, query.values(), samples, seed, &spread);
  OracleReport r;
  r.chosen = make_arm(instance, std::move(seeds));
  r.value = spread;
  r.exact = false;
  return r;
}

Oracle default_oracle(const Instance& instance, OracleOptions options) {
  const Instance* inst = &instance;
  if (options.force_brute_force) return [inst](const MeanVector& q) { return brute_force_oracle(*inst, q); };
  switch (instance.family) {
    case Family::Linear:
    case Family::Episodic:
      return [inst](const MeanVector& q) { return brute_force_oracle(*inst, q); };
    case Family::SpanningTree:
      return [inst](const MeanVector& q) { return kruskal_oracle(*inst, q); };
    case Family::ShortestPath:
      return [inst](const MeanVector& q) { return dijkstra_oracle(*inst, q); };
    case Family::Coverage:
      return [inst](const MeanVector& q) { return greedy_pmc_oracle(*inst, inst->coverage().k, q); };
    case Family::Cascade:
      return [inst](const MeanVector& q) { return topk_cascade_oracle(*inst, inst->cascade().k, q); };
    case Family::Influence:
      return [inst, options](const MeanVector& q) {
        return mc_greedy_im_oracle(*inst, inst->graph().k, q, options.im_samples, options.im_seed);
      };
  }
  throw ConfigurationError("no oracle for this family");
}

// ---- competitors -----------------------------------------------------------

std::string_view to_string(GapSolver s) {
  switch (s) {
    case GapSolver::BruteForce: return "brute-force";
    case GapSolver::FamilyExact: return "family-exact";
    case GapSolver::Greedy: return "greedy";
  }
  return "?";
}

GapSolver parse_gap_solver(std::string_view s) {
  if (s == "brute-force") return GapSolver::BruteForce;
  if (s == "family-exact") return GapSolver::FamilyExact;
  if (s == "greedy") return GapSolver::Greedy;
  throw ConfigurationError("unknown gap solver `" + std::string(s) + "`");
}

Competitor best_competitor(const Instance& instance, const SuperArm& excluded, const MeanVector& query,
                           GapSolver solver, bool permutations_too) {
  require_length(instance, query);
  if (solver == GapSolver::BruteForce) return brute_force_competitor(instance, excluded, query, permutations_too);

  switch (instance.family) {
    case Family::SpanningTree: {
      const auto& g = instance.graph().graph;
      auto tree = kruskal(g, query.values());
      if (!same_set(tree, excluded.members)) {
        const auto r = report(instance, std::move(tree), query, true);
        return {r.chosen, r.value, true};
      }
      auto swapped = best_swap_tree(g, query.values(), tree);
      if (!swapped) throw InfeasibleError("graph has a unique spanning tree");
      const auto r = report(instance, std::move(*swapped), query, true);
      return {r.chosen, r.value, true};
    }
    case Family::ShortestPath: {
      const auto& gs = instance.graph();
      auto best = dijkstra_oracle(instance, query);
      if (best.chosen.members != excluded.members) return {best.chosen, best.value, true};
      auto alt = second_path(gs.graph, gs.source, gs.dest, query.values(), excluded.members);
      if (!alt) throw InfeasibleError("only one source-dest path exists");
      const auto r = report(instance, std::move(*alt), query, true);
      return {r.chosen, r.value, true};
    }
    case Family::Cascade: {
      const int k = instance.cascade().k;
      auto top = topk_cascade_oracle(instance, k, query);
      if (!same_set(top.chosen.members, excluded.members)) return {top.chosen, top.value, true};
      if (!permutations_too && k >= 2) {
        auto members = excluded.members;
        std::swap(members[0], members[1]);
        const auto r = report(instance, std::move(members), query, true);
        return {r.chosen, r.value, true};
      }
      // Second-best item set: one swap of an inside item for an outside item.
      auto c = best_single_swap(instance, excluded.members, instance.m(), query);
      std::stable_sort(c.arm.members.begin(), c.arm.members.end(), [&](int a, int b) {
        return query[static_cast<std::size_t>(a)] > query[static_cast<std::size_t>(b)];
      });
      c.arm = make_arm(instance, c.arm.members);
      c.exact = true;
      return c;
    }
    default:
      break;
  }

  if (solver == GapSolver::FamilyExact) return brute_force_competitor(instance, excluded, query, permutations_too);

  OracleReport greedy;
  int universe = 0;
  if (instance.family == Family::Coverage) {
    greedy = greedy_pmc_oracle(instance, instance.coverage().k, query);
    universe = instance.coverage().left;
  } else if (instance.family == Family::Influence) {
    greedy = mc_greedy_im_oracle(instance, instance.graph().k, query);
    greedy.value = expected_reward(instance, greedy.chosen, query);
    universe = instance.graph().graph.nodes;
  } else {
    return brute_force_competitor(instance, excluded, query, permutations_too);
  }
  if (!same_set(greedy.chosen.members, excluded.members)) return {greedy.chosen, greedy.value, false};
  auto base = excluded.members;
  std::sort(base.begin(), base.end());
  return best_single_swap(instance, base, universe, query);
}

}  // namespace cmab
