#include "cmab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cmab/errors.hpp"
#include "cmab/graph.hpp"
#include "cmab/instance_io.hpp"
#include "cmab/instances.hpp"
#include "cmab/random.hpp"
#include "cmab/rl_reduction.hpp"

namespace cmab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

double to_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto t = trim(s);
  if (t == "inf") return std::numeric_limits<double>::infinity();
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigurationError(std::string(what) + ": not a number: '" + t + "'");
  return v;
}

std::int64_t to_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  const auto t = trim(s);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigurationError(std::string(what) + ": not an integer: '" + t + "'");
  return v;
}

bool to_bool(std::string_view s, std::string_view what) {
  const auto t = trim(s);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigurationError(std::string(what) + ": not a boolean: '" + t + "'");
}

// Typed view of a parameter map with defaults.
class Params {
 public:
  Params(const std::map<std::string, std::string>& kv, std::string prefix) : kv_(kv), prefix_(std::move(prefix)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string str(const std::string& key, const std::string& fallback = {}) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }
  const std::string& required(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigurationError("missing " + prefix_ + key);
    return it->second;
  }
  double real(const std::string& key, double fallback) const {
    return has(key) ? to_double(kv_.at(key), prefix_ + key) : fallback;
  }
  int integer(const std::string& key, int fallback) const {
    return has(key) ? static_cast<int>(to_int(kv_.at(key), prefix_ + key)) : fallback;
  }
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? static_cast<std::uint64_t>(to_int(kv_.at(key), prefix_ + key)) : fallback;
  }
  bool flag(const std::string& key, bool fallback) const {
    return has(key) ? to_bool(kv_.at(key), prefix_ + key) : fallback;
  }
  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& w : words(required(key))) out.push_back(to_double(w, prefix_ + key));
    return out;
  }
  std::vector<int> ints(const std::string& key) const {
    std::vector<int> out;
    for (const auto& w : words(required(key))) out.push_back(static_cast<int>(to_int(w, prefix_ + key)));
    return out;
  }

 private:
  const std::map<std::string, std::string>& kv_;
  std::string prefix_;
};

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

// ---- configuration ---------------------------------------------------------

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'section.key = value'", number);
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty() || key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.')
      throw ParseError("key must have the form section.key", number);
    if (!kv.emplace(key, value).second) throw ParseError("duplicate key '" + key + "'", number);
  }
  return kv;
}

std::string_view to_string(AttackKind a) {
  switch (a) {
    case AttackKind::None: return "none";
    case AttackKind::Algorithm1: return "algorithm1";
    case AttackKind::ImExtended: return "im-extended";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view s) {
  if (s == "none") return AttackKind::None;
  if (s == "algorithm1") return AttackKind::Algorithm1;
  if (s == "im-extended") return AttackKind::ImExtended;
  throw ConfigurationError("unknown attack '" + std::string(s) + "'");
}

std::string_view to_string(TargetChoice c) {
  switch (c) {
    case TargetChoice::FirstPositive: return "first-positive";
    case TargetChoice::RandomMember: return "random-member";
    case TargetChoice::Listed: return "listed";
  }
  return "?";
}

TargetChoice parse_target_choice(std::string_view s) {
  if (s == "first-positive") return TargetChoice::FirstPositive;
  if (s == "random-member") return TargetChoice::RandomMember;
  if (s == "listed") return TargetChoice::Listed;
  throw ConfigurationError("unknown target choice '" + std::string(s) + "'");
}

std::string_view to_string(RegretReference r) { return r == RegretReference::Oracle ? "oracle" : "optimum"; }

RegretReference parse_regret_reference(std::string_view s) {
  if (s == "oracle") return RegretReference::Oracle;
  if (s == "optimum") return RegretReference::Optimum;
  throw ConfigurationError("unknown regret reference '" + std::string(s) + "'");
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
  static const std::set<std::string> known = {
      "instance.source", "instance.builder", "instance.file", "instance.targets",
      "target.kind",
      "learner.kind", "learner.radius", "learner.delta", "learner.im_samples", "learner.im_seed",
      "learner.brute_force",
      "attack.kind", "attack.target", "attack.ell", "attack.budget", "attack.budget_exponent",
      "attack.gap_solver",
      "run.horizon", "run.repetitions", "run.seed", "run.threads", "run.stride", "run.log_rounds",
      "run.regret",
      "output.dir"};

  ExperimentConfig c;
  for (const auto& [key, value] : kv) {
    if (key.rfind("instance.", 0) == 0 && !known.count(key)) {
      c.params[key.substr(9)] = value;
    } else if (key.rfind("target.", 0) == 0 && !known.count(key)) {
      c.target_params[key.substr(7)] = value;
    } else if (!known.count(key)) {
      throw ConfigurationError("unknown configuration key '" + key + "'");
    }
  }
  const Params p(kv, "");
  const std::string source = p.str("instance.source", p.has("instance.file") ? "file" : "builder");
  if (source == "file") {
    c.instance_file = p.required("instance.file");
    if (p.has("instance.targets")) c.targets_file = p.str("instance.targets");
    if (p.has("instance.builder")) throw ConfigurationError("instance.builder given with a file source");
  } else if (source == "builder") {
    c.builder = p.required("instance.builder");
    if (p.has("instance.file")) throw ConfigurationError("instance.file given with a builder source");
  } else {
    throw ConfigurationError("instance.source must be 'builder' or 'file'");
  }
  c.target_kind = p.str("target.kind");

  RunSpec& r = c.run;
  r.learner = parse_learner(p.str("learner.kind", "cucb"));
  r.radius = parse_radius_mode(p.str("learner.radius", "high-prob"));
  r.delta = p.real("learner.delta", kDefaultDelta);
  r.oracle.im_samples = p.integer("learner.im_samples", r.oracle.im_samples);
  r.oracle.im_seed = p.seed("learner.im_seed", r.oracle.im_seed);
  r.oracle.force_brute_force = p.flag("learner.brute_force", false);
  r.attack = parse_attack_kind(p.str("attack.kind", "none"));
  r.target_choice = parse_target_choice(p.str("attack.target", "first-positive"));
  r.gap_solver = parse_gap_solver(p.str("attack.gap_solver", "brute-force"));
  if (p.has("attack.ell")) {
    const std::string ell = p.str("attack.ell");
    r.ell = ell == "inf" ? kUnboundedHops : p.integer("attack.ell", 1);
  }
  if (p.has("attack.budget")) r.budget = to_int(p.str("attack.budget"), "attack.budget");
  if (p.has("attack.budget_exponent")) r.budget_exponent = p.real("attack.budget_exponent", 1.0);
  r.horizon = to_int(p.str("run.horizon", "1"), "run.horizon");
  r.stride = to_int(p.str("run.stride", "1"), "run.stride");
  r.keep_log = p.flag("run.log_rounds", false);
  r.regret = parse_regret_reference(p.str("run.regret", "oracle"));
  c.repetitions = p.integer("run.repetitions", 1);
  c.base_seed = p.seed("run.seed", 0);
  c.threads = p.integer("run.threads", 1);
  if (p.has("output.dir")) c.output_dir = p.str("output.dir");
  return c;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) { return from_map(parse_config_text(text)); }

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ConfigurationError("run.repetitions must be at least 1");
  if (run.horizon < 1) throw ConfigurationError("run.horizon must be at least 1");
  if (run.stride < 1) throw ConfigurationError("run.stride must be at least 1");
  if (threads < 0) throw ConfigurationError("run.threads must be non-negative");
  if (!(run.delta > 0.0 && run.delta < 1.0)) throw ConfigurationError("learner.delta must lie in (0, 1)");
  if (run.ell < 1) throw ConfigurationError("attack.ell must be at least 1");
  if (run.budget && *run.budget < 0) throw ConfigurationError("attack.budget must be non-negative");
  if (run.budget && run.budget_exponent)
    throw ConfigurationError("attack.budget and attack.budget_exponent are exclusive");
  if (run.budget_exponent && !(*run.budget_exponent > 0.0 && *run.budget_exponent <= 1.0))
    throw ConfigurationError("attack.budget_exponent must lie in (0, 1]");
  if (run.attack == AttackKind::None && (run.budget || run.budget_exponent))
    throw ConfigurationError("attack budget given without an attack");
  const bool cascade_learner = run.learner != LearnerKind::Cucb;
  if (!builder.empty()) {
    static const std::set<std::string> builders = {"hard",    "mab",      "random-linear", "spanning-tree",
                                                   "shortest-path", "coverage", "cascade", "influence", "mdp"};
    if (!builders.count(builder)) throw ConfigurationError("unknown builder '" + builder + "'");
    if (cascade_learner && builder != "cascade")
      throw ConfigurationError(std::string(to_string(run.learner)) + " requires a cascade instance");
    if (run.attack == AttackKind::ImExtended && builder != "influence")
      throw ConfigurationError("im-extended requires an influence instance");
  } else if (instance_file.empty()) {
    throw ConfigurationError("no instance source");
  }
}

// ---- scenarios -------------------------------------------------------------

namespace {

TargetSet arms_by_label(const Instance& inst, const std::vector<std::string>& labels) {
  TargetSet t;
  for (const auto& l : labels) {
    const auto& space = inst.action_space();
    const auto it = std::find_if(space.begin(), space.end(), [&](const SuperArm& a) { return a.label == l; });
    if (it == space.end()) throw ConfigurationError("no super arm labelled '" + l + "'");
    t.arms.push_back(*it);
  }
  return t;
}

// Target kinds shared by every builder.
std::optional<TargetSet> generic_target(const Instance& inst, const std::string& kind, const Params& tp) {
  if (kind == "labels") return arms_by_label(inst, words(tp.required("labels")));
  if (kind == "members") return TargetSet{{make_arm(inst, tp.ints("members"))}, tp.flag("permutation_closed", false)};
  if (kind == "index") {
    const int i = tp.integer("index", 0);
    const auto& space = inst.action_space();
    if (i < 0 || i >= static_cast<int>(space.size())) throw ConfigurationError("target.index out of range");
    return TargetSet{{space[static_cast<std::size_t>(i)]}, false};
  }
  return std::nullopt;
}

GraphSpec config_graph(const Params& p, bool directed_default) {
  const bool directed = p.flag("directed", directed_default);
  if (p.has("graph")) return load_edge_list(p.str("graph"), directed);
  const int nodes = p.integer("nodes", 6);
  const double prob = p.real("edge_prob", 0.3);
  const std::uint64_t seed = p.seed("seed", 0);
  if (p.str("graph_model", "connected") == "erdos-renyi")
    return random_graph(nodes, prob, seed, directed, p.real("weight_lo", 0.0), p.real("weight_hi", 1.0));
  return random_connected_graph(nodes, prob, seed, directed);
}

}  // namespace

Scenario build_scenario(const ExperimentConfig& config) {
  const Params p(config.params, "instance.");
  const Params tp(config.target_params, "target.");
  const std::string& kind = config.target_kind;
  Scenario sc;

  if (config.builder.empty()) {
    sc.instance = load_instance(config.instance_file);
    if (!config.targets_file.empty()) {
      sc.targets = load_targets(sc.instance, config.targets_file);
    } else if (auto t = generic_target(sc.instance, kind, tp)) {
      sc.targets = *t;
    } else {
      throw ConfigurationError("file instances need instance.targets or a generic target.kind");
    }
    return sc;
  }

  const std::string& b = config.builder;
  const std::uint64_t tseed = tp.seed("seed", 0);
  if (b == "hard") {
    const HardInstanceParams hp{p.integer("n", 5), p.real("epsilon", 0.1), p.integer("special", 1)};
    sc.instance = build_hard_instance(hp);
    if (kind.empty() || kind == "all") {
      sc.targets = hard_targets(sc.instance);
    } else if (kind == "arm") {
      sc.targets = TargetSet{{hard_arm(sc.instance, tp.integer("j", hp.special))}, false};
    }
  } else if (b == "mab") {
    sc.instance = make_mab_instance(p.reals("means"));
  } else if (b == "random-linear") {
    sc.instance = random_linear_instance(p.integer("m", 6), p.integer("arms", 8), p.integer("max_size", 3),
                                         p.seed("seed", 0));
  } else if (b == "spanning-tree") {
    sc.instance = make_spanning_tree_instance(config_graph(p, false));
    if (kind.empty() || kind == "second-best") sc.targets = second_best_spanning_tree_target(sc.instance);
    if (kind == "random") sc.targets = random_spanning_tree_target(sc.instance, tseed);
  } else if (b == "shortest-path") {
    const GraphSpec g = config_graph(p, false);
    if (kind.empty() || kind == "random") {
      PathTarget pt = random_path_target(g, tseed, tp.flag("require_attackable", true));
      sc.instance = std::move(pt.instance);
      sc.targets = std::move(pt.target);
    } else if (kind == "unattackable") {
      PathTarget pt = unattackable_path_target(g, tp.real("theta", 0.5), tseed, tp.integer("max_steps", 50));
      sc.instance = std::move(pt.instance);
      sc.targets = std::move(pt.target);
    } else {
      sc.instance = make_shortest_path_instance(g, p.integer("source", 0), p.integer("dest", g.nodes - 1));
    }
  } else if (b == "coverage") {
    const int k = p.integer("k", 2);
    sc.instance = random_coverage_instance(p.integer("left", 6), p.integer("right", 6), p.real("edge_prob", 0.4), k,
                                           p.seed("seed", 0));
    if (kind.empty() || kind == "fixed") sc.targets = fixed_pmc_target(sc.instance, k);
    if (kind == "random") sc.targets = random_pmc_target(sc.instance, k, tseed);
  } else if (b == "cascade") {
    const int k = p.integer("k", 2);
    sc.instance = random_cascade_instance(p.integer("m", 8), k, p.seed("seed", 0), p.real("lo", 0.0), p.real("hi", 1.0));
    if (kind.empty() || kind == "random") sc.targets = cascade_target(sc.instance, k, tp.real("threshold", 0.1), tseed);
  } else if (b == "influence") {
    const int k = p.integer("k", 1);
    sc.instance = make_influence_instance(config_graph(p, true), k);
    if (kind.empty() || kind == "random") {
      std::vector<int> nodes(static_cast<std::size_t>(sc.instance.graph().graph.nodes));
      for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<int>(i);
      Rng rng(tseed);
      auto seeds = rng.sample(nodes, static_cast<std::size_t>(k));
      std::sort(seeds.begin(), seeds.end());
      sc.targets = TargetSet{{make_arm(sc.instance, seeds)}, false};
    }
  } else if (b == "mdp") {
    const TabularMdp mdp = p.has("file") ? load_mdp(p.str("file"))
                                         : random_mdp(p.integer("states", 2), p.integer("actions", 2),
                                                      p.integer("horizon", 2), p.seed("seed", 0),
                                                      p.flag("stationary", true));
    ReductionOptions ro;
    ro.step_indexed = p.flag("step_indexed", false);
    ro.stationary_policies = p.flag("stationary_policies", false);
    sc.instance = reduce_to_cmab(mdp, ro);
    if (kind.empty() || kind == "random") {
      Rng rng(tseed);
      const auto& space = sc.instance.action_space();
      sc.targets = TargetSet{{space[static_cast<std::size_t>(rng.below(space.size()))]}, false};
    }
  }

  if (sc.targets.arms.empty()) {
    if (auto t = generic_target(sc.instance, kind, tp)) {
      sc.targets = *t;
    } else {
      throw ConfigurationError("target.kind '" + kind + "' is not available for builder '" + b + "'");
    }
  }
  return sc;
}

void check_compatible(const Instance& instance, const TargetSet& targets, const RunSpec& spec) {
  if (spec.learner != LearnerKind::Cucb && instance.family != Family::Cascade)
    throw ConfigurationError(std::string(to_string(spec.learner)) + " requires a cascade instance");
  if (spec.attack == AttackKind::ImExtended && instance.family != Family::Influence)
    throw ConfigurationError("im-extended requires an influence instance");
  if (targets.arms.empty()) throw ConfigurationError("target set is empty");
  for (const SuperArm& t : targets.arms) check_arm(instance, t);
  if (spec.horizon < 1) throw ConfigurationError("horizon must be at least 1");
  if (spec.stride < 1) throw ConfigurationError("stride must be at least 1");
}

// ---- runs ------------------------------------------------------------------

AttackPlan plan_attack(const Instance& instance, const TargetSet& targets, const RunSpec& spec, std::uint64_t seed) {
  check_compatible(instance, targets, spec);
  AttackPlan plan;
  plan.permutation_closed = targets.permutation_closed;

  const bool need_gaps = spec.attack == AttackKind::Algorithm1 || spec.target_choice == TargetChoice::FirstPositive;
  if (need_gaps) plan.gaps = compute_gap(instance, targets, spec.gap_solver);

  switch (spec.target_choice) {
    case TargetChoice::Listed: plan.target = targets.arms.front(); break;
    case TargetChoice::RandomMember: {
      GapReport r;
      r.targets = targets.arms;
      plan.target = select_target(r, TargetStrategy::RandomMember, seed);
      break;
    }
    case TargetChoice::FirstPositive: plan.target = select_target(*plan.gaps, TargetStrategy::FirstPositive); break;
  }

  if (spec.attack == AttackKind::Algorithm1) plan.policy = algorithm1_policy(instance, targets, plan.target);
  if (spec.attack == AttackKind::ImExtended) plan.policy = im_extended_target_policy(instance, plan.target, spec.ell);

  if (spec.budget) plan.budget = spec.budget;
  if (spec.budget_exponent)
    plan.budget = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(spec.horizon), *spec.budget_exponent)));

  if (spec.regret == RegretReference::Oracle) {
    const OracleReport rep = default_oracle(instance, spec.oracle)(instance.means);
    plan.reference_reward = expected_reward(instance, rep.chosen, instance.means);
  } else {
    Instance full;
    const Instance* src = &instance;
    if (!instance.enumerable()) {
      try {
        full = with_enumerated_action_space(instance);
      } catch (const CapacityError&) {
        throw ConfigurationError("regret against the optimum needs an enumerable action space");
      }
      src = &full;
    }
    const OracleReport rep = brute_force_oracle(*src, src->means);
    plan.reference_reward = rep.value;
  }
  return plan;
}

namespace {

// Expected reward per super arm, memoised for the arms the learner actually plays.
class RewardCache {
 public:
  explicit RewardCache(const Instance& inst) : inst_(inst) {
    if (inst.enumerable()) by_id_.assign(inst.action_space().size(), std::numeric_limits<double>::quiet_NaN());
  }
  double operator()(const SuperArm& arm) {
    if (arm.id >= 0 && static_cast<std::size_t>(arm.id) < by_id_.size()) {
      double& v = by_id_[static_cast<std::size_t>(arm.id)];
      if (std::isnan(v)) v = expected_reward(inst_, arm, inst_.means);
      return v;
    }
    const auto it = by_members_.find(arm.members);
    if (it != by_members_.end()) return it->second;
    const double v = expected_reward(inst_, arm, inst_.means);
    by_members_.emplace(arm.members, v);
    return v;
  }

 private:
  const Instance& inst_;
  std::vector<double> by_id_;
  std::map<std::vector<int>, double> by_members_;
};

double member_fraction(const std::vector<int>& sorted_target, const SuperArm& arm) {
  if (sorted_target.empty()) return 0.0;
  std::size_t hit = 0;
  for (int x : arm.members)
    if (std::binary_search(sorted_target.begin(), sorted_target.end(), x)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(sorted_target.size());
}

}  // namespace

RepetitionResult run_repetition(const Instance& instance, const AttackPlan& plan, const RunSpec& spec,
                                std::uint64_t seed) {
  RepetitionResult res;
  res.seed = seed;
  Rng rng(seed);
  auto learner = make_learner(instance, spec.learner, default_oracle(instance, spec.oracle), spec.radius, spec.delta);
  Adversary adversary = plan.policy ? Adversary(*plan.policy, plan.budget) : Adversary();
  const TargetSet counted{{plan.target}, plan.permutation_closed};
  std::vector<int> target_members = plan.target.members;
  std::sort(target_members.begin(), target_members.end());
  RewardCache reward(instance);
  const double sign = instance.direction == Direction::Maximize ? 1.0 : -1.0;

  const std::int64_t T = spec.horizon;
  const std::size_t points = static_cast<std::size_t>(T / spec.stride + 1);
  MetricSeries& s = res.series;
  s.rounds.reserve(points);
  s.cost.reserve(points);
  s.target_pulls.reserve(points);
  s.regret.reserve(points);
  s.target_fraction.reserve(points);
  if (spec.keep_log) res.log.reserve(static_cast<std::size_t>(T));

  std::int64_t pulls = 0;
  double regret = 0.0;
  std::vector<Observation> raw;
  for (std::int64_t t = 1; t <= T; ++t) {
    const SuperArm arm = learner->select();
    const OutcomeVector x = sample_outcomes(instance, rng);
    TriggerSet tau = trigger(instance, arm, x, rng);
    raw.clear();
    for (int i : tau.indices) raw.push_back({i, x[static_cast<std::size_t>(i)]});
    Corruption c = adversary.corrupt(tau, raw);
    if (counted.contains(arm)) ++pulls;
    regret += sign * (plan.reference_reward - reward(arm));
    const double fraction = member_fraction(target_members, arm);

    if (spec.keep_log) {
      RoundRecord r;
      r.round = t;
      r.pulled_id = arm.id;
      r.pulled = arm.label;
      r.members = arm.members;
      r.triggered = tau;
      r.raw = raw;
      r.corrupted = c.corrupted;
      r.cost_increment = c.cost;
      res.log.push_back(std::move(r));
    }
    learner->observe(CorruptedFeedback(std::move(c.corrupted)));

    if (t % spec.stride == 0 || t == T) {
      s.rounds.push_back(t);
      s.cost.push_back(static_cast<double>(adversary.ledger().cumulative()));
      s.target_pulls.push_back(static_cast<double>(pulls));
      s.regret.push_back(regret);
      s.target_fraction.push_back(fraction);
    }
  }
  return res;
}

AggregateSeries aggregate(const std::vector<RepetitionResult>& reps) {
  AggregateSeries a;
  if (reps.empty()) return a;
  a.rounds = reps.front().series.rounds;
  for (const auto& r : reps)
    if (r.series.rounds != a.rounds) throw InstanceMismatchError("repetitions emitted different rounds");
  const std::size_t n = reps.size();
  const std::size_t len = a.rounds.size();

  auto stats = [&](auto member, std::vector<double>& mean, std::vector<double>& var) {
    mean.assign(len, 0.0);
    var.assign(len, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
      double sum = 0.0;
      for (const auto& r : reps) sum += (r.series.*member)[k];
      const double m = sum / static_cast<double>(n);
      double ss = 0.0;
      for (const auto& r : reps) {
        const double d = (r.series.*member)[k] - m;
        ss += d * d;
      }
      mean[k] = m;
      var[k] = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    }
  };
  stats(&MetricSeries::cost, a.cost_mean, a.cost_var);
  stats(&MetricSeries::target_pulls, a.target_pulls_mean, a.target_pulls_var);
  stats(&MetricSeries::regret, a.regret_mean, a.regret_var);
  stats(&MetricSeries::target_fraction, a.target_fraction_mean, a.target_fraction_var);
  return a;
}

ExperimentResult run_experiment(const Instance& instance, const TargetSet& targets, const RunSpec& spec,
                                int repetitions, std::uint64_t base_seed, int threads) {
  if (repetitions < 1) throw ConfigurationError("repetitions must be at least 1");
  ExperimentResult out;
  out.plan = plan_attack(instance, targets, spec, base_seed);
  out.repetitions.resize(static_cast<std::size_t>(repetitions));
  std::vector<std::exception_ptr> errors(out.repetitions.size());

  auto work = [&](std::size_t r) {
    try {
      out.repetitions[r] = run_repetition(instance, out.plan, spec, repetition_seed(base_seed, r));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  if (threads == 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, repetitions);
  if (threads <= 1) {
    for (std::size_t r = 0; r < out.repetitions.size(); ++r) work(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t r; (r = next.fetch_add(1)) < out.repetitions.size();) work(r);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.aggregate = aggregate(out.repetitions);
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigurationError("cannot write " + path.string());
  body(f);
}

std::string numbered(const char* stem, std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem, r);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Scenario sc = build_scenario(config);
  ExperimentResult res =
      run_experiment(sc.instance, sc.targets, config.run, config.repetitions, config.base_seed, config.threads);
  if (config.output_dir.empty()) return res;

  std::filesystem::create_directories(config.output_dir);
  const auto& dir = config.output_dir;
  write_file(dir / "aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, res.aggregate); });
  for (std::size_t r = 0; r < res.repetitions.size(); ++r) {
    write_file(dir / numbered("rep", r), [&](std::ostream& o) { write_series_csv(o, res.repetitions[r].series); });
    if (config.run.keep_log)
      write_file(dir / numbered("rounds", r), [&](std::ostream& o) { write_round_log(o, res.repetitions[r].log); });
  }
  if (res.plan.gaps) write_file(dir / "gaps.csv", [&](std::ostream& o) { write_gap_csv(o, *res.plan.gaps); });
  return res;
}

// ---- CSV -------------------------------------------------------------------

std::string format_number(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 1e15)
    return std::to_string(static_cast<std::int64_t>(x));
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

void write_aggregate_csv(std::ostream& out, const AggregateSeries& a) {
  out << kAggregateHeader << '\n';
  for (std::size_t k = 0; k < a.rounds.size(); ++k) {
    out << a.rounds[k] << ',' << format_number(a.cost_mean[k]) << ',' << format_number(a.cost_var[k]) << ','
        << format_number(a.target_pulls_mean[k]) << ',' << format_number(a.target_pulls_var[k]) << ','
        << format_number(a.regret_mean[k]) << ',' << format_number(a.regret_var[k]) << ','
        << format_number(a.target_fraction_mean[k]) << ',' << format_number(a.target_fraction_var[k]) << '\n';
  }
}

void write_series_csv(std::ostream& out, const MetricSeries& s) {
  out << "round,cost,target_pulls,regret,target_fraction\n";
  for (std::size_t k = 0; k < s.rounds.size(); ++k)
    out << s.rounds[k] << ',' << format_number(s.cost[k]) << ',' << format_number(s.target_pulls[k]) << ','
        << format_number(s.regret[k]) << ',' << format_number(s.target_fraction[k]) << '\n';
}

namespace {

std::string join_values(const std::vector<Observation>& obs) {
  std::string s;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (i) s += ' ';
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, obs[i].value);
    s.append(buf, p);
  }
  return s;
}

std::vector<double> parse_values(const std::string& cell, int line) {
  std::vector<double> out;
  for (const auto& w : words(cell)) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw ParseError("bad value '" + w + "'", line);
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& cell, int line) {
  std::vector<int> out;
  for (const auto& w : words(cell)) {
    int v = 0;
    const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size()) throw ParseError("bad integer '" + w + "'", line);
    out.push_back(v);
  }
  return out;
}

}  // namespace

void write_round_log(std::ostream& out, const std::vector<RoundRecord>& log) {
  out << "round,pulled_id,pulled,members,triggered,visits,raw,corrupted,cost\n";
  for (const RoundRecord& r : log) {
    out << r.round << ',' << r.pulled_id << ',' << r.pulled << ',' << join_ints(r.members) << ','
        << join_ints(r.triggered.indices) << ',' << join_ints(r.triggered.visits) << ',' << join_values(r.raw) << ','
        << join_values(r.corrupted) << ',' << r.cost_increment << '\n';
  }
}

std::vector<RoundRecord> read_round_log(std::istream& in) {
  std::vector<RoundRecord> log;
  std::string line;
  int number = 0;
  if (!std::getline(in, line)) return log;
  ++number;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 9) throw ParseError("expected 9 columns", number);
    RoundRecord r;
    r.round = to_int(cells[0], "round");
    r.pulled_id = static_cast<int>(to_int(cells[1], "pulled_id"));
    r.pulled = cells[2];
    r.members = parse_ints(cells[3], number);
    r.triggered.indices = parse_ints(cells[4], number);
    r.triggered.visits = parse_ints(cells[5], number);
    const auto raw = parse_values(cells[6], number);
    const auto cor = parse_values(cells[7], number);
    if (raw.size() != r.triggered.indices.size() || cor.size() != raw.size())
      throw ParseError("value lists do not match the triggered set", number);
    for (std::size_t j = 0; j < raw.size(); ++j) {
      r.raw.push_back({r.triggered.indices[j], raw[j]});
      r.corrupted.push_back({r.triggered.indices[j], cor[j]});
    }
    r.cost_increment = static_cast<int>(to_int(cells[8], "cost"));
    log.push_back(std::move(r));
  }
  return log;
}

ReplayAudit audit_replay(const Instance& instance, const AttackPlan& plan, const std::vector<RoundRecord>& log,
                         const MetricSeries& series) {
  ReplayAudit a;
  const TargetSet counted{{plan.target}, plan.permutation_closed};
  std::size_t k = 0;
  auto fail = [&](std::string msg) {
    if (a.mismatch.empty()) a.mismatch = std::move(msg);
  };
  for (std::size_t n = 0; n < log.size(); ++n) {
    const RoundRecord& r = log[n];
    if (r.round != static_cast<std::int64_t>(n) + 1) fail("round " + std::to_string(r.round) + " out of sequence");
    int changed = 0;
    for (std::size_t j = 0; j < r.raw.size(); ++j)
      if (r.raw[j].value != r.corrupted[j].value) ++changed;
    a.cost += changed;
    SuperArm probe;
    if (instance.enumerable() && r.pulled_id >= 0 &&
        static_cast<std::size_t>(r.pulled_id) < instance.action_space().size()) {
      probe = instance.action_space()[static_cast<std::size_t>(r.pulled_id)];
    } else {
      probe.members = r.members;
    }
    if (counted.contains(probe)) ++a.target_pulls;
    if (k < series.rounds.size() && series.rounds[k] == r.round) {
      if (static_cast<double>(a.cost) != series.cost[k])
        fail("cost differs at round " + std::to_string(r.round));
      if (static_cast<double>(a.target_pulls) != series.target_pulls[k])
        fail("target pulls differ at round " + std::to_string(r.round));
      ++k;
    }
  }
  if (k != series.rounds.size()) fail("log ends before the emitted series");
  a.matches = a.mismatch.empty();
  return a;
}

// ---- hardness demonstration ------------------------------------------------

HardnessReport hardness_demo(const HardnessDemoOptions& o) {
  if (o.n < 2 || o.n > 8) throw ParameterError("hardness demo needs 2 <= n <= 8");
  if (!(o.epsilon > 0.0 && o.epsilon < 0.125)) throw ParameterError("hardness demo needs 0 < eps < 1/8");
  if (o.horizon < 1) throw ParameterError("horizon must be at least 1");
  const int special = o.special == 0 ? o.n : o.special;
  if (special < 1 || special > o.n) throw ParameterError("special index out of range");

  HardnessReport rep;
  rep.n = o.n;
  rep.epsilon = o.epsilon;
  rep.special = special;
  rep.growth_bound = 1.0 / (2.0 * o.epsilon);

  const Instance inst = build_hard_instance({o.n, o.epsilon, special});
  const int n = o.n;
  Rng rng(o.seed);
  Cucb learner(inst, default_oracle(inst), o.radius, o.delta);

  // Phase l wants S_l: feed 1 on a_l and b_l, 0 on every other observation.
  int goal = 1;
  std::int64_t bridge = 0;
  std::int64_t t = 0;
  std::vector<Observation> raw;
  while (t < o.horizon && goal <= n) {
    ++t;
    const SuperArm arm = learner.select();
    const OutcomeVector x = sample_outcomes(inst, rng);
    const TriggerSet tau = trigger(inst, arm, x, rng);
    raw.clear();
    for (int i : tau.indices) raw.push_back({i, x[static_cast<std::size_t>(i)]});
    std::vector<Observation> fed = raw;
    for (Observation& ob : fed) {
      const bool keep = ob.arm == hard_a(n, goal) || ob.arm == hard_b(n, goal);
      ob.value = keep ? 1.0 : 0.0;
    }
    for (std::size_t j = 0; j < raw.size(); ++j)
      if (fed[j].value != raw[j].value) ++rep.unknown_cost;
    if (arm.id == n + 1) ++bridge;
    if (arm.id == goal) {
      rep.visit_rounds.push_back(t);
      rep.bridge_pulls.push_back(bridge);
      if (goal == special) rep.reached_special = true;
      bridge = 0;
      ++goal;
    }
    learner.observe(CorruptedFeedback(std::move(fed)));
  }
  rep.rounds = t;
  for (std::size_t l = 1; l < rep.bridge_pulls.size(); ++l)
    rep.growth.push_back(rep.bridge_pulls[l - 1] > 0
                             ? static_cast<double>(rep.bridge_pulls[l]) / static_cast<double>(rep.bridge_pulls[l - 1])
                             : std::numeric_limits<double>::infinity());

  if (o.known_horizon > 0) {
    RunSpec spec;
    spec.radius = o.radius;
    spec.delta = o.delta;
    spec.attack = AttackKind::Algorithm1;
    spec.target_choice = TargetChoice::Listed;
    spec.horizon = o.known_horizon;
    spec.stride = o.known_horizon;
    const TargetSet target{{hard_arm(inst, special)}, false};
    const AttackPlan plan = plan_attack(inst, target, spec, o.seed);
    const RepetitionResult r = run_repetition(inst, plan, spec, splitmix64(o.seed));
    rep.known_rounds = o.known_horizon;
    rep.known_cost = static_cast<std::int64_t>(r.series.cost.back());
    rep.known_target_pulls = static_cast<std::int64_t>(r.series.target_pulls.back());
  }
  return rep;
}

void write_hardness_report(std::ostream& out, const HardnessReport& r) {
  out << "step,visit_round,bridge_pulls,growth\n";
  for (std::size_t l = 0; l < r.visit_rounds.size(); ++l) {
    out << l + 1 << ',' << r.visit_rounds[l] << ',' << r.bridge_pulls[l] << ','
        << (l == 0 ? std::string() : format_number(r.growth[l - 1])) << '\n';
  }
  out << "# n = " << r.n << "\n# epsilon = " << format_number(r.epsilon) << "\n# special = " << r.special
      << "\n# rounds = " << r.rounds << "\n# growth_bound = " << format_number(r.growth_bound)
      << "\n# unknown_cost = " << r.unknown_cost << "\n# reached_special = " << (r.reached_special ? 1 : 0) << '\n';
  if (r.known_rounds > 0)
    out << "# known_rounds = " << r.known_rounds << "\n# known_cost = " << r.known_cost
        << "\n# known_target_pulls = " << r.known_target_pulls << '\n';
}

int exit_code(Classification c) {
  switch (c) {
    case Classification::Attackable: return 0;
    case Classification::Unattackable: return 2;
    case Classification::Boundary: return 3;
  }
  return 1;
}

}  // namespace cmab
