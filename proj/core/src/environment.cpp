#include "cmab/environment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>

namespace cmab {

namespace {

constexpr int kExactSpreadEdgeLimit = 20;
constexpr int kSpreadSamples = 20000;
constexpr std::uint64_t kSpreadSeed = 0x5eedULL;

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// ---- influence helpers -----------------------------------------------------

// Nodes activated by `seeds` when edge e is live iff live(e).
template <typename Live>
std::vector<char> diffuse(const GraphSpec& g, const std::vector<std::vector<int>>& adj,
                          const std::vector<int>& seeds, Live&& live) {
  std::vector<char> active(static_cast<std::size_t>(g.nodes), 0);
  std::deque<int> frontier;
  for (int s : seeds) {
    if (!active[static_cast<std::size_t>(s)]) {
      active[static_cast<std::size_t>(s)] = 1;
      frontier.push_back(s);
    }
  }
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int e : adj[static_cast<std::size_t>(u)]) {
      if (!live(e)) continue;
      const int v = g.other_end(e, u);
      if (!active[static_cast<std::size_t>(v)]) {
        active[static_cast<std::size_t>(v)] = 1;
        frontier.push_back(v);
      }
    }
  }
  return active;
}

// Edges attempted from the active set: out-edges (directed) or incident edges (undirected).
std::vector<int> attempted_edges(const GraphSpec& g, const std::vector<char>& active) {
  std::vector<int> out;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& edge = g.edges[e];
    if (active[static_cast<std::size_t>(edge.u)] ||
        (!g.directed && active[static_cast<std::size_t>(edge.v)]))
      out.push_back(static_cast<int>(e));
  }
  return out;
}

// Per-node activation probability under edge probabilities `p`. Exact by
// live-edge enumeration when at most kExactSpreadEdgeLimit relevant edges are
// uncertain, seeded Monte-Carlo otherwise.
std::vector<double> activation_probabilities(const GraphSpec& g, const std::vector<int>& seeds,
                                             std::span<const double> p) {
  const auto adj = g.out_edges();
  const auto reachable = diffuse(g, adj, seeds, [&](int e) { return p[static_cast<std::size_t>(e)] > 0.0; });
  std::vector<int> uncertain;
  for (int e : attempted_edges(g, reachable)) {
    const double q = p[static_cast<std::size_t>(e)];
    if (q > 0.0 && q < 1.0) uncertain.push_back(e);
  }
  std::vector<double> prob(static_cast<std::size_t>(g.nodes), 0.0);
  if (static_cast<int>(uncertain.size()) <= kExactSpreadEdgeLimit) {
    std::vector<char> live(g.edges.size(), 0);
    for (std::size_t e = 0; e < g.edges.size(); ++e) live[e] = p[e] >= 1.0;
    const std::uint64_t patterns = std::uint64_t{1} << uncertain.size();
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double weight = 1.0;
      for (std::size_t j = 0; j < uncertain.size(); ++j) {
        const int e = uncertain[j];
        const bool on = (mask >> j) & 1U;
        live[static_cast<std::size_t>(e)] = on;
        weight *= on ? p[static_cast<std::size_t>(e)] : 1.0 - p[static_cast<std::size_t>(e)];
      }
      if (weight == 0.0) continue;
      const auto active = diffuse(g, adj, seeds, [&](int e) { return live[static_cast<std::size_t>(e)] != 0; });
      for (std::size_t v = 0; v < prob.size(); ++v)
        if (active[v]) prob[v] += weight;
    }
    return prob;
  }
  Rng rng(kSpreadSeed);
  std::vector<char> live(g.edges.size(), 0);
  for (int s = 0; s < kSpreadSamples; ++s) {
    for (std::size_t e = 0; e < g.edges.size(); ++e) live[e] = rng.bernoulli(p[e]);
    const auto active = diffuse(g, adj, seeds, [&](int e) { return live[static_cast<std::size_t>(e)] != 0; });
    for (std::size_t v = 0; v < prob.size(); ++v)
      if (active[v]) prob[v] += 1.0;
  }
  for (double& x : prob) x /= kSpreadSamples;
  return prob;
}

// ---- enumeration helpers ---------------------------------------------------

void enumerate_subsets(int n, int k, std::size_t cap,
                       const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> current;
  std::size_t count = 0;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(current.size()) == k) {
      if (++count > cap) throw CapacityError("action space exceeds " + std::to_string(cap) + " super arms");
      emit(current);
      return;
    }
    for (int i = start; i <= n - (k - static_cast<int>(current.size())); ++i) {
      current.push_back(i);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
}

void enumerate_permutations(int n, int k, std::size_t cap,
                            const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> current;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::size_t count = 0;
  std::function<void()> rec = [&]() {
    if (static_cast<int>(current.size()) == k) {
      if (++count > cap) throw CapacityError("action space exceeds " + std::to_string(cap) + " super arms");
      emit(current);
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      used[static_cast<std::size_t>(i)] = 1;
      current.push_back(i);
      rec();
      current.pop_back();
      used[static_cast<std::size_t>(i)] = 0;
    }
  };
  rec();
}

void enumerate_spanning_trees(const GraphSpec& g, std::size_t cap,
                              const std::function<void(const std::vector<int>&)>& emit) {
  const int need = g.nodes - 1;
  if (need < 0) return;
  std::vector<int> chosen;
  std::size_t count = 0;
  // Union-find with undo (no path compression) so backtracking is O(1) per step.
  std::vector<int> parent(static_cast<std::size_t>(g.nodes));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  const int total = static_cast<int>(g.edges.size());
  std::function<void(int)> rec = [&](int e) {
    if (static_cast<int>(chosen.size()) == need) {
      if (++count > cap) throw CapacityError("action space exceeds " + std::to_string(cap) + " super arms");
      emit(chosen);
      return;
    }
    if (total - e < need - static_cast<int>(chosen.size())) return;
    const Edge& edge = g.edges[static_cast<std::size_t>(e)];
    const int a = find(edge.u), b = find(edge.v);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      chosen.push_back(e);
      rec(e + 1);
      chosen.pop_back();
      parent[static_cast<std::size_t>(a)] = a;
    }
    rec(e + 1);
  };
  rec(0);
}

void enumerate_simple_paths(const GraphSpec& g, int source, int dest, std::size_t cap,
                            const std::function<void(const std::vector<int>&)>& emit) {
  const auto adj = g.out_edges();
  std::vector<char> on_path(static_cast<std::size_t>(g.nodes), 0);
  std::vector<int> path;
  std::size_t count = 0;
  std::function<void(int)> rec = [&](int u) {
    if (u == dest) {
      if (++count > cap) throw CapacityError("action space exceeds " + std::to_string(cap) + " super arms");
      emit(path);
      return;
    }
    // Visit neighbours in (neighbour id, edge id) order so enumeration is lexicographic in nodes.
    std::vector<std::pair<int, int>> next;
    for (int e : adj[static_cast<std::size_t>(u)]) next.emplace_back(g.other_end(e, u), e);
    std::sort(next.begin(), next.end());
    for (const auto& [v, e] : next) {
      if (on_path[static_cast<std::size_t>(v)]) continue;
      on_path[static_cast<std::size_t>(v)] = 1;
      path.push_back(e);
      rec(v);
      path.pop_back();
      on_path[static_cast<std::size_t>(v)] = 0;
    }
  };
  on_path[static_cast<std::size_t>(source)] = 1;
  rec(source);
}

bool is_spanning_tree(const GraphSpec& g, const std::vector<int>& edges) {
  if (static_cast<int>(edges.size()) != g.nodes - 1) return false;
  GraphSpec sub{g.nodes, {}, false};
  for (int e : edges) sub.edges.push_back(g.edges[static_cast<std::size_t>(e)]);
  return sub.connected();
}

bool is_path(const GraphSpec& g, int source, int dest, const std::vector<int>& edges) {
  std::vector<char> seen(static_cast<std::size_t>(g.nodes), 0);
  int at = source;
  seen[static_cast<std::size_t>(at)] = 1;
  for (int e : edges) {
    const Edge& edge = g.edges[static_cast<std::size_t>(e)];
    int next;
    if (edge.u == at) next = edge.v;
    else if (!g.directed && edge.v == at) next = edge.u;
    else return false;
    if (seen[static_cast<std::size_t>(next)]) return false;
    seen[static_cast<std::size_t>(next)] = 1;
    at = next;
  }
  return at == dest;
}

bool distinct_in_range(const std::vector<int>& v, int n) {
  std::vector<char> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
  for (int x : v) {
    if (x < 0 || x >= n || seen[static_cast<std::size_t>(x)]) return false;
    seen[static_cast<std::size_t>(x)] = 1;
  }
  return true;
}

std::size_t episodic_id(const Instance& instance, const SuperArm& arm) {
  const auto& ep = instance.episodic();
  if (arm.id < 0 || static_cast<std::size_t>(arm.id) >= ep.policies.size())
    throw InstanceMismatchError("episodic super arm `" + arm.label + "` has no policy id");
  return static_cast<std::size_t>(arm.id);
}

}  // namespace

// ---- names -----------------------------------------------------------------

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Linear: return "linear";
    case Family::SpanningTree: return "spanning-tree";
    case Family::ShortestPath: return "shortest-path";
    case Family::Coverage: return "coverage";
    case Family::Cascade: return "cascade";
    case Family::Influence: return "influence";
    case Family::Episodic: return "episodic";
  }
  return "?";
}

std::string_view to_string(Direction d) { return d == Direction::Maximize ? "maximize" : "minimize"; }

std::string_view to_string(OutcomeModel o) {
  return o == OutcomeModel::Bernoulli ? "bernoulli" : "deterministic";
}

Family parse_family(std::string_view s) {
  for (Family f : {Family::Linear, Family::SpanningTree, Family::ShortestPath, Family::Coverage,
                   Family::Cascade, Family::Influence, Family::Episodic})
    if (to_string(f) == s) return f;
  throw ConfigurationError("unknown instance family `" + std::string(s) + "`");
}

Direction parse_direction(std::string_view s) {
  if (s == "maximize") return Direction::Maximize;
  if (s == "minimize") return Direction::Minimize;
  throw ConfigurationError("unknown direction `" + std::string(s) + "`");
}

OutcomeModel parse_outcome_model(std::string_view s) {
  if (s == "bernoulli") return OutcomeModel::Bernoulli;
  if (s == "deterministic") return OutcomeModel::DeterministicMean;
  throw ConfigurationError("unknown outcome model `" + std::string(s) + "`");
}

std::string default_label(const std::vector<int>& members) {
  if (members.empty()) return "empty";
  std::string s;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(members[i]);
  }
  return s;
}

// ---- TargetSet -------------------------------------------------------------

const SuperArm* TargetSet::find(const SuperArm& arm) const {
  for (const SuperArm& t : arms) {
    if (permutation_closed) {
      if (t.offset != arm.offset || t.members.size() != arm.members.size()) continue;
      auto a = t.members, b = arm.members;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a == b) return &t;
    } else if (t.id >= 0 && arm.id >= 0 ? t.id == arm.id : t.same_action(arm)) {
      return &t;
    }
  }
  return nullptr;
}

bool TargetSet::contains(const SuperArm& arm) const { return find(arm) != nullptr; }

// ---- Instance --------------------------------------------------------------

const std::vector<SuperArm>& Instance::action_space() const {
  if (!arms) throw ConfigurationError("action space of this instance is not enumerated");
  return *arms;
}

void Instance::validate() const {
  if (!(smoothness > 0.0)) throw ParameterError("smoothness constant must be positive");
  const int m = this->m();
  switch (family) {
    case Family::Linear:
      if (!arms) throw ConfigurationError("linear instances need an enumerated action space");
      break;
    case Family::SpanningTree:
    case Family::ShortestPath:
    case Family::Influence: {
      const auto& g = graph();
      g.graph.validate();
      if (static_cast<int>(g.graph.edges.size()) != m)
        throw InstanceMismatchError("mean vector length differs from edge count");
      if (family == Family::ShortestPath &&
          (g.source < 0 || g.source >= g.graph.nodes || g.dest < 0 || g.dest >= g.graph.nodes ||
           g.source == g.dest))
        throw ParameterError("shortest path needs distinct source and destination nodes");
      if (family == Family::Influence && (g.k < 1 || g.k > g.graph.nodes))
        throw ParameterError("seed-set size out of range");
      if (family == Family::Influence && outcomes != OutcomeModel::Bernoulli)
        throw ConfigurationError("influence instances need Bernoulli outcomes");
      break;
    }
    case Family::Coverage: {
      const auto& c = coverage();
      if (static_cast<int>(c.edges.size()) != m)
        throw InstanceMismatchError("mean vector length differs from edge count");
      for (const auto& [u, v] : c.edges)
        if (u < 0 || u >= c.left || v < 0 || v >= c.right)
          throw ParameterError("coverage edge endpoint out of range");
      if (c.k < 1 || c.k > c.left) throw ParameterError("coverage k must be in [1, |L|]");
      break;
    }
    case Family::Cascade:
      if (cascade().k < 1 || cascade().k >= m) throw ParameterError("cascade list length K must satisfy 1 <= K < m");
      if (outcomes != OutcomeModel::Bernoulli)
        throw ConfigurationError("cascade instances need Bernoulli outcomes");
      break;
    case Family::Episodic: {
      const auto& ep = episodic();
      ep.mdp.validate();
      if (!arms) throw ConfigurationError("episodic instances need an enumerated action space");
      if (ep.policies.size() != arms->size() || ep.weights.size() != arms->size())
        throw InstanceMismatchError("policy table does not match the action space");
      break;
    }
  }
  if (arms) {
    for (std::size_t i = 0; i < arms->size(); ++i) {
      const SuperArm& a = (*arms)[i];
      if (a.id != static_cast<int>(i)) throw InstanceMismatchError("arm ids must equal their position");
      for (int x : a.members)
        if (x < 0 || x >= m) throw InstanceMismatchError("arm `" + a.label + "` has a member out of range");
      for (int x : a.observable)
        if (x < 0 || x >= m) throw InstanceMismatchError("arm `" + a.label + "` observes an arm out of range");
      if (!a.trigger_prob.empty()) {
        if (a.trigger_prob.size() != a.members.size())
          throw InstanceMismatchError("arm `" + a.label + "` needs one trigger probability per member");
        for (double q : a.trigger_prob)
          if (!(q > 0.0 && q <= 1.0)) throw ParameterError("trigger probabilities must lie in (0,1]");
      }
      if (!std::is_sorted(a.observable.begin(), a.observable.end()))
        throw InstanceMismatchError("observable set of `" + a.label + "` is not sorted");
    }
  }
}

// ---- structure -------------------------------------------------------------

std::vector<int> observable_set(const Instance& instance, const std::vector<int>& members) {
  switch (instance.family) {
    case Family::Linear:
    case Family::SpanningTree:
    case Family::ShortestPath:
      return sorted_unique(members);
    case Family::Coverage: {
      const auto& c = instance.coverage();
      std::vector<char> in(static_cast<std::size_t>(c.left), 0);
      for (int u : members) in[static_cast<std::size_t>(u)] = 1;
      std::vector<int> obs;
      for (std::size_t e = 0; e < c.edges.size(); ++e)
        if (in[static_cast<std::size_t>(c.edges[e].first)]) obs.push_back(static_cast<int>(e));
      return obs;
    }
    case Family::Cascade: {
      std::vector<int> obs;
      for (int item : members) {
        obs.push_back(item);
        if (instance.means[static_cast<std::size_t>(item)] >= 1.0) break;
      }
      return sorted_unique(obs);
    }
    case Family::Influence: {
      const auto& g = instance.graph().graph;
      const auto adj = g.out_edges();
      const auto reach = diffuse(g, adj, members, [&](int e) {
        return instance.means[static_cast<std::size_t>(e)] > 0.0;
      });
      return attempted_edges(g, reach);
    }
    case Family::Episodic:
      throw ConfigurationError("episodic super arms come from the enumerated policy table");
  }
  return {};
}

SuperArm make_arm(const Instance& instance, std::vector<int> members) {
  SuperArm arm;
  arm.observable = observable_set(instance, members);
  arm.members = std::move(members);
  arm.label = default_label(arm.members);
  if (instance.arms) {
    for (const SuperArm& a : *instance.arms) {
      if (a.members == arm.members && a.offset == 0.0) {
        arm.id = a.id;
        arm.label = a.label;
        break;
      }
    }
  }
  return arm;
}

void check_arm(const Instance& instance, const SuperArm& arm) {
  const int m = instance.m();
  for (int x : arm.members)
    if (x < 0 || x >= m) throw InstanceMismatchError("super arm `" + arm.label + "` references base arm " + std::to_string(x));
  if (instance.arms) {
    if (arm.id >= 0) {
      if (static_cast<std::size_t>(arm.id) >= instance.arms->size() ||
          !(*instance.arms)[static_cast<std::size_t>(arm.id)].same_action(arm))
        throw InstanceMismatchError("unknown super arm id " + std::to_string(arm.id));
      return;
    }
    if (instance.family == Family::Linear || instance.family == Family::Episodic) {
      for (const SuperArm& a : *instance.arms)
        if (a.same_action(arm)) return;
      throw InstanceMismatchError("super arm `" + arm.label + "` is not in the action space");
    }
  }
  bool ok = true;
  switch (instance.family) {
    case Family::Linear:
    case Family::Episodic:
      ok = false;
      break;
    case Family::SpanningTree:
      ok = is_spanning_tree(instance.graph().graph, arm.members);
      break;
    case Family::ShortestPath:
      ok = is_path(instance.graph().graph, instance.graph().source, instance.graph().dest, arm.members);
      break;
    case Family::Coverage:
      ok = static_cast<int>(arm.members.size()) == instance.coverage().k &&
           distinct_in_range(arm.members, instance.coverage().left);
      break;
    case Family::Cascade:
      ok = static_cast<int>(arm.members.size()) == instance.cascade().k && distinct_in_range(arm.members, m);
      break;
    case Family::Influence:
      ok = static_cast<int>(arm.members.size()) == instance.graph().k &&
           distinct_in_range(arm.members, instance.graph().graph.nodes);
      break;
  }
  if (!ok) throw InstanceMismatchError("super arm `" + arm.label + "` is not a valid " +
                                       std::string(to_string(instance.family)) + " action");
}

// ---- sampling and triggering -----------------------------------------------

OutcomeVector sample_outcomes(const Instance& instance, Rng& rng) {
  const auto mu = instance.means.values();
  std::vector<double> x(mu.size());
  if (instance.outcomes == OutcomeModel::DeterministicMean) {
    std::copy(mu.begin(), mu.end(), x.begin());
  } else {
    for (std::size_t i = 0; i < mu.size(); ++i) x[i] = rng.bernoulli(mu[i]) ? 1.0 : 0.0;
  }
  return OutcomeVector(std::move(x));
}

TriggerSet trigger(const Instance& instance, const SuperArm& arm, const OutcomeVector& outcomes,
                   Rng& rng) {
  check_arm(instance, arm);
  TriggerSet out;
  switch (instance.family) {
    case Family::Linear:
      if (!arm.trigger_prob.empty()) {
        for (std::size_t j = 0; j < arm.members.size(); ++j)
          if (rng.bernoulli(arm.trigger_prob[j])) out.indices.push_back(arm.members[j]);
        std::sort(out.indices.begin(), out.indices.end());
        break;
      }
      out.indices = arm.observable;
      break;
    case Family::SpanningTree:
    case Family::ShortestPath:
    case Family::Coverage:
      out.indices = arm.observable;
      break;
    case Family::Cascade:
      for (int item : arm.members) {
        out.indices.push_back(item);
        if (outcomes[static_cast<std::size_t>(item)] >= 1.0) break;
      }
      std::sort(out.indices.begin(), out.indices.end());
      break;
    case Family::Influence: {
      const auto& g = instance.graph().graph;
      const auto active = diffuse(g, g.out_edges(), arm.members, [&](int e) {
        return outcomes[static_cast<std::size_t>(e)] >= 1.0;
      });
      out.indices = attempted_edges(g, active);
      break;
    }
    case Family::Episodic: {
      const auto& ep = instance.episodic();
      const Policy& pi = ep.policies[episodic_id(instance, arm)];
      std::vector<int> visits(static_cast<std::size_t>(instance.m()), 0);
      int s = ep.mdp.initial_state;
      for (int h = 0; h < ep.mdp.horizon; ++h) {
        const int a = pi(h, s);
        ++visits[static_cast<std::size_t>(ep.arm_index(h, s, a))];
        s = static_cast<int>(rng.categorical(ep.mdp.next_state(h, s, a)));
      }
      for (std::size_t i = 0; i < visits.size(); ++i) {
        if (visits[i] > 0) {
          out.indices.push_back(static_cast<int>(i));
          out.visits.push_back(visits[i]);
        }
      }
      break;
    }
  }
  return out;
}

// ---- rewards ---------------------------------------------------------------

double expected_reward(const Instance& instance, const SuperArm& arm, const MeanVector& means) {
  if (static_cast<int>(means.size()) != instance.m())
    throw InstanceMismatchError("mean vector has length " + std::to_string(means.size()) +
                                ", instance has " + std::to_string(instance.m()) + " base arms");
  switch (instance.family) {
    case Family::Linear:
    case Family::SpanningTree:
    case Family::ShortestPath: {
      double r = arm.offset;
      for (std::size_t j = 0; j < arm.members.size(); ++j)
        r += (arm.trigger_prob.empty() ? 1.0 : arm.trigger_prob[j]) * means[static_cast<std::size_t>(arm.members[j])];
      return r;
    }
    case Family::Coverage: {
      const auto& c = instance.coverage();
      std::vector<char> in(static_cast<std::size_t>(c.left), 0);
      for (int u : arm.members) in[static_cast<std::size_t>(u)] = 1;
      std::vector<double> miss(static_cast<std::size_t>(c.right), 1.0);
      for (std::size_t e = 0; e < c.edges.size(); ++e)
        if (in[static_cast<std::size_t>(c.edges[e].first)])
          miss[static_cast<std::size_t>(c.edges[e].second)] *= 1.0 - means[e];
      double r = 0.0;
      for (double q : miss) r += 1.0 - q;
      return r;
    }
    case Family::Cascade: {
      double miss = 1.0;
      for (int i : arm.members) miss *= 1.0 - means[static_cast<std::size_t>(i)];
      return 1.0 - miss;
    }
    case Family::Influence: {
      const auto prob = activation_probabilities(instance.graph().graph, arm.members, means.values());
      return std::accumulate(prob.begin(), prob.end(), 0.0);
    }
    case Family::Episodic: {
      const auto& w = instance.episodic().weights[episodic_id(instance, arm)];
      double r = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) r += w[i] * means[i];
      return r;
    }
  }
  throw ConfigurationError("unsupported reward form");
}

double realized_reward(const Instance& instance, const SuperArm& arm, const OutcomeVector& outcomes,
                       const TriggerSet& triggered) {
  switch (instance.family) {
    case Family::Linear: {
      double r = arm.offset;
      for (int i : triggered.indices) r += outcomes[static_cast<std::size_t>(i)];
      return r;
    }
    case Family::SpanningTree:
    case Family::ShortestPath: {
      double r = arm.offset;
      for (int i : arm.members) r += outcomes[static_cast<std::size_t>(i)];
      return r;
    }
    case Family::Coverage: {
      const auto& c = instance.coverage();
      std::vector<double> miss(static_cast<std::size_t>(c.right), 1.0);
      for (int e : triggered.indices)
        miss[static_cast<std::size_t>(c.edges[static_cast<std::size_t>(e)].second)] *=
            1.0 - outcomes[static_cast<std::size_t>(e)];
      double r = 0.0;
      for (double q : miss) r += 1.0 - q;
      return r;
    }
    case Family::Cascade: {
      double miss = 1.0;
      for (int i : triggered.indices) miss *= 1.0 - outcomes[static_cast<std::size_t>(i)];
      return 1.0 - miss;
    }
    case Family::Influence: {
      const auto& g = instance.graph().graph;
      const auto active = diffuse(g, g.out_edges(), arm.members, [&](int e) {
        return outcomes[static_cast<std::size_t>(e)] >= 1.0;
      });
      return static_cast<double>(std::count(active.begin(), active.end(), 1));
    }
    case Family::Episodic: {
      double r = 0.0;
      for (std::size_t j = 0; j < triggered.indices.size(); ++j)
        r += triggered.visits[j] * outcomes[static_cast<std::size_t>(triggered.indices[j])];
      return r;
    }
  }
  throw ConfigurationError("unsupported reward form");
}

MeanVector masked_means(const MeanVector& means, const SuperArm& arm, Direction direction) {
  const double fill = direction == Direction::Maximize ? 0.0 : 1.0;
  std::vector<double> out(means.size(), fill);
  for (int i : arm.observable) out[static_cast<std::size_t>(i)] = means[static_cast<std::size_t>(i)];
  return MeanVector(std::move(out));
}

MeanVector masked_means(const Instance& instance, const MeanVector& means, const SuperArm& arm) {
  return masked_means(means, arm, instance.direction);
}

std::vector<double> trigger_probabilities(const Instance& instance, const SuperArm& arm) {
  std::vector<double> p(static_cast<std::size_t>(instance.m()), 0.0);
  switch (instance.family) {
    case Family::Linear:
      if (!arm.trigger_prob.empty()) {
        for (std::size_t j = 0; j < arm.members.size(); ++j)
          p[static_cast<std::size_t>(arm.members[j])] = arm.trigger_prob[j];
        break;
      }
      for (int i : arm.observable) p[static_cast<std::size_t>(i)] = 1.0;
      break;
    case Family::SpanningTree:
    case Family::ShortestPath:
    case Family::Coverage:
      for (int i : arm.observable) p[static_cast<std::size_t>(i)] = 1.0;
      break;
    case Family::Cascade: {
      double reach = 1.0;
      for (int i : arm.members) {
        p[static_cast<std::size_t>(i)] = reach;
        reach *= 1.0 - instance.means[static_cast<std::size_t>(i)];
      }
      break;
    }
    case Family::Influence: {
      const auto& g = instance.graph().graph;
      const auto act = activation_probabilities(g, arm.members, instance.means.values());
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const Edge& edge = g.edges[e];
        const double pu = act[static_cast<std::size_t>(edge.u)];
        // Undirected: attempted when either endpoint is active; P(u or v) >= max.
        p[e] = g.directed ? pu : std::max(pu, act[static_cast<std::size_t>(edge.v)]);
      }
      break;
    }
    case Family::Episodic:
      p = instance.episodic().weights[episodic_id(instance, arm)];
      break;
  }
  return p;
}

double min_trigger_probability(const Instance& instance) {
  switch (instance.family) {
    case Family::SpanningTree:
    case Family::ShortestPath:
    case Family::Coverage:
      return 1.0;
    case Family::Cascade:
      if (!instance.arms) {
        auto mu = instance.means.vector();
        std::sort(mu.begin(), mu.end(), std::greater<>());
        double p = 1.0;
        for (int j = 0; j + 1 < instance.cascade().k; ++j) {
          const double next = p * (1.0 - mu[static_cast<std::size_t>(j)]);
          if (next <= 0.0) break;
          p = next;
        }
        return p;
      }
      break;
    default:
      break;
  }
  const auto arms = instance.arms ? *instance.arms : enumerate_action_space(instance);
  double best = 1.0;
  bool any = false;
  for (const SuperArm& a : arms) {
    const auto p = trigger_probabilities(instance, a);
    for (int i : a.observable) {
      const double q = p[static_cast<std::size_t>(i)];
      if (q > 0.0) {
        best = any ? std::min(best, q) : q;
        any = true;
      }
    }
  }
  return best;
}

int max_observable_size(const Instance& instance) {
  if (instance.arms) {
    std::size_t k = 0;
    for (const SuperArm& a : *instance.arms) k = std::max(k, a.observable.size());
    return static_cast<int>(k);
  }
  switch (instance.family) {
    case Family::SpanningTree:
      return std::max(instance.graph().graph.nodes - 1, 0);
    case Family::ShortestPath:
      return std::min(instance.graph().graph.nodes - 1, instance.m());
    case Family::Coverage: {
      const auto& c = instance.coverage();
      std::vector<int> degree(static_cast<std::size_t>(c.left), 0);
      for (const auto& e : c.edges) ++degree[static_cast<std::size_t>(e.first)];
      std::sort(degree.begin(), degree.end(), std::greater<>());
      return std::accumulate(degree.begin(), degree.begin() + c.k, 0);
    }
    case Family::Cascade:
      return instance.cascade().k;
    default:
      return instance.m();
  }
}

// ---- enumeration -----------------------------------------------------------

std::vector<SuperArm> enumerate_action_space(const Instance& instance, std::size_t cap) {
  if (instance.arms) return *instance.arms;
  std::vector<SuperArm> out;
  auto emit = [&](const std::vector<int>& members) {
    SuperArm a;
    a.id = static_cast<int>(out.size());
    a.members = members;
    a.observable = observable_set(instance, members);
    a.label = default_label(members);
    out.push_back(std::move(a));
  };
  switch (instance.family) {
    case Family::SpanningTree:
      enumerate_spanning_trees(instance.graph().graph, cap, emit);
      break;
    case Family::ShortestPath:
      enumerate_simple_paths(instance.graph().graph, instance.graph().source, instance.graph().dest, cap, emit);
      break;
    case Family::Coverage:
      enumerate_subsets(instance.coverage().left, instance.coverage().k, cap, emit);
      break;
    case Family::Cascade:
      enumerate_permutations(instance.m(), instance.cascade().k, cap, emit);
      break;
    case Family::Influence:
      enumerate_subsets(instance.graph().graph.nodes, instance.graph().k, cap, emit);
      break;
    case Family::Linear:
    case Family::Episodic:
      throw ConfigurationError("instance has no action space to enumerate");
  }
  return out;
}

Instance with_enumerated_action_space(Instance instance, std::size_t cap) {
  if (!instance.arms) instance.arms = enumerate_action_space(instance, cap);
  return instance;
}

}  // namespace cmab
