#include "cmab/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

namespace cmab {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Attackable: return "attackable";
    case Classification::Unattackable: return "unattackable";
    case Classification::Boundary: return "boundary";
  }
  return "?";
}

Classification classify(double delta_m) {
  if (delta_m > 0.0) return Classification::Attackable;
  if (delta_m < 0.0) return Classification::Unattackable;
  return Classification::Boundary;
}

double gap_of(const Instance& instance, const SuperArm& target, GapSolver solver, bool permutations_too,
              Competitor* witness) {
  check_arm(instance, target);
  const double own = expected_reward(instance, target, instance.means);
  const MeanVector masked = masked_means(instance, instance.means, target);
  Competitor c = best_competitor(instance, target, masked, solver, permutations_too);
  double gap = instance.direction == Direction::Maximize ? own - c.value : c.value - own;
  if (std::abs(gap) <= kGapTolerance * std::max({1.0, std::abs(own), std::abs(c.value)})) gap = 0.0;
  if (witness) *witness = std::move(c);
  return gap;
}

GapReport compute_gap(const Instance& instance, const TargetSet& targets, GapSolver solver) {
  if (targets.arms.empty()) throw ParameterError("target set is empty");
  GapReport r;
  for (const SuperArm& s : targets.arms) {
    Competitor w;
    const double gap = gap_of(instance, s, solver, targets.permutation_closed, &w);
    r.targets.push_back(s);
    r.gaps.push_back(gap);
    r.exact = r.exact && w.exact;
    r.witness_values.push_back(w.value);
    r.witnesses.push_back(std::move(w.arm));
    r.delta_m = std::max(r.delta_m, gap);
  }
  r.classification = classify(r.delta_m);
  if (!r.exact)
    r.warnings.push_back("competitor search used a non-exact solver; the classification may be wrong");
  return r;
}

void write_gap_csv(std::ostream& out, const GapReport& report) {
  out << "arm_id,gap,witness_id,classification\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < report.targets.size(); ++i) {
    const SuperArm& s = report.targets[i];
    const SuperArm& w = report.witnesses[i];
    out << (s.label.empty() ? default_label(s.members) : s.label) << ',' << report.gaps[i] << ','
        << (w.label.empty() ? default_label(w.members) : w.label) << ',' << to_string(classify(report.gaps[i]))
        << '\n';
  }
  out.precision(old);
}

bool AttackPolicy::protects(int arm) const {
  return std::binary_search(protected_set.begin(), protected_set.end(), arm);
}

AttackPolicy algorithm1_policy(const Instance& instance, const TargetSet& targets, const SuperArm& target) {
  if (!targets.contains(target)) throw ParameterError("chosen target is not a member of the target set");
  AttackPolicy p;
  p.target_set = targets;
  p.chosen_target = target;
  p.corruption_value = instance.direction == Direction::Maximize ? 0.0 : 1.0;
  p.protected_set = target.observable;
  return p;
}

Corruption algorithm1_corrupt(const AttackPolicy& policy, const TriggerSet& triggered,
                              const std::vector<Observation>& raw) {
  if (raw.size() != triggered.indices.size())
    throw ProtocolError("raw outcomes do not match the triggered set");
  Corruption c;
  c.corrupted.reserve(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    if (raw[j].arm != triggered.indices[j]) throw ProtocolError("raw outcomes do not match the triggered set");
    Observation o = raw[j];
    if (!policy.protects(o.arm)) {
      if (o.value != policy.corruption_value) ++c.cost;
      o.value = policy.corruption_value;
    }
    c.corrupted.push_back(o);
  }
  return c;
}

std::string_view to_string(TargetStrategy s) {
  return s == TargetStrategy::FirstPositive ? "first-positive" : "random-member";
}

TargetStrategy parse_target_strategy(std::string_view s) {
  if (s == "first-positive") return TargetStrategy::FirstPositive;
  if (s == "random-member") return TargetStrategy::RandomMember;
  throw ConfigurationError("unknown target strategy `" + std::string(s) + "`");
}

SuperArm select_target(const GapReport& report, TargetStrategy strategy, std::uint64_t seed) {
  if (report.targets.empty()) throw ParameterError("target set is empty");
  if (strategy == TargetStrategy::RandomMember) {
    Rng rng(seed);
    return report.targets[static_cast<std::size_t>(rng.below(report.targets.size()))];
  }
  const SuperArm* best = nullptr;
  for (std::size_t i = 0; i < report.targets.size(); ++i) {
    if (report.gaps[i] <= 0.0) continue;
    const SuperArm& s = report.targets[i];
    if (!best || (s.id >= 0 && (best->id < 0 || s.id < best->id))) best = &s;
  }
  if (!best) throw NoAttackableTargetError("no target has a positive gap");
  return *best;
}

std::vector<int> extended_target_nodes(const GraphSpec& graph, const std::vector<int>& seeds, int ell) {
  if (ell < 1) throw ParameterError("extension radius must be at least 1");
  const auto adj = graph.out_edges();
  std::vector<int> dist(static_cast<std::size_t>(graph.nodes), -1);
  std::deque<int> queue;
  for (int s : seeds) {
    if (s < 0 || s >= graph.nodes) throw InstanceMismatchError("seed node out of range");
    if (dist[static_cast<std::size_t>(s)] < 0) {
      dist[static_cast<std::size_t>(s)] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (dist[static_cast<std::size_t>(u)] + 1 >= ell) continue;
    for (int e : adj[static_cast<std::size_t>(u)]) {
      const int v = graph.other_end(e, u);
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  std::vector<int> nodes;
  for (int v = 0; v < graph.nodes; ++v)
    if (dist[static_cast<std::size_t>(v)] >= 0) nodes.push_back(v);
  return nodes;
}

AttackPolicy im_extended_target_policy(const Instance& instance, const SuperArm& seeds, int ell) {
  if (instance.family != Family::Influence) throw ConfigurationError("extended targets need an influence instance");
  const auto& g = instance.graph().graph;
  std::vector<char> in(static_cast<std::size_t>(g.nodes), 0);
  if (ell == kUnboundedHops) {
    std::fill(in.begin(), in.end(), 1);
  } else {
    for (int v : extended_target_nodes(g, seeds.members, ell)) in[static_cast<std::size_t>(v)] = 1;
  }
  AttackPolicy p;
  p.target_set.arms = {seeds};
  p.chosen_target = seeds;
  p.corruption_value = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (in[static_cast<std::size_t>(g.edges[e].u)] || in[static_cast<std::size_t>(g.edges[e].v)])
      p.protected_set.push_back(static_cast<int>(e));
  return p;
}

double t0_diagnostic(int k, double smoothness, double budget, double delta_m, int m, std::int64_t horizon,
                     double delta) {
  if (!(delta_m < 0.0)) throw NotApplicableError("T_0 only applies to unattackable targets (Delta_M < 0)");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
  const double g = std::abs(delta_m);
  const double t = static_cast<double>(horizon);
  const double kb = k * smoothness;
  return 6.0 * kb * budget / g + 18.0 * kb * kb * std::log(4.0 * m * t * t * t / delta) / (g * g);
}

double t0_diagnostic(const Instance& instance, const GapReport& report, double budget, std::int64_t horizon,
                     double delta) {
  return t0_diagnostic(max_observable_size(instance), instance.smoothness, budget, report.delta_m, instance.m(),
                       horizon, delta);
}

double pmc_nontarget_bound(int m, std::int64_t horizon, double delta, double gap) {
  if (!(gap > 0.0)) throw NotApplicableError("bound needs a positive gap");
  const double t = static_cast<double>(horizon);
  const double md = m;
  return 8.0 * md * md * md * std::log(4.0 * md * t * t * t / delta) / (gap * gap);
}

void CostLedger::add(int increment) {
  if (increment < 0) throw ParameterError("negative cost increment");
  cumulative_ += increment;
  if (keep_rounds_) per_round_.push_back(increment);
}

Adversary::Adversary(AttackPolicy policy, std::optional<std::int64_t> budget)
    : policy_(std::move(policy)), budget_(budget) {}

Corruption Adversary::corrupt(const TriggerSet& triggered, const std::vector<Observation>& raw) {
  Corruption c;
  if (!policy_) {
    c.corrupted = raw;
    ledger_.add(0);
    return c;
  }
  c = algorithm1_corrupt(*policy_, triggered, raw);
  if (budget_) {
    // Keep the first changes that still fit in the budget; restore the rest.
    std::int64_t left = *budget_ - ledger_.cumulative();
    c.cost = 0;
    for (std::size_t j = 0; j < raw.size(); ++j) {
      if (c.corrupted[j].value == raw[j].value) continue;
      if (left > 0) {
        --left;
        ++c.cost;
      } else {
        c.corrupted[j].value = raw[j].value;
      }
    }
  }
  ledger_.add(c.cost);
  return c;
}

}  // namespace cmab
