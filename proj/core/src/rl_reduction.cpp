#include "cmab/rl_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace cmab {

namespace {

using Layer3 = std::vector<std::vector<std::vector<double>>>;

Layer3 zeros(int states, int actions, int inner) {
  return Layer3(static_cast<std::size_t>(states),
                std::vector<std::vector<double>>(static_cast<std::size_t>(actions),
                                                 std::vector<double>(static_cast<std::size_t>(inner), 0.0)));
}

void check_policy(const TabularMdp& mdp, const Policy& policy) {
  if (policy.action.size() != static_cast<std::size_t>(mdp.horizon))
    throw ParameterError("policy must define one decision rule per step");
  for (const auto& rule : policy.action) {
    if (rule.size() != static_cast<std::size_t>(mdp.states)) throw ParameterError("policy rule must cover every state");
    for (int a : rule)
      if (a < 0 || a >= mdp.actions) throw ParameterError("policy chooses an action out of range");
  }
}

}  // namespace

OccupancyTable occupancy(const TabularMdp& mdp, const Policy& policy) {
  check_policy(mdp, policy);
  const auto S = static_cast<std::size_t>(mdp.states);
  OccupancyTable occ(static_cast<std::size_t>(mdp.horizon),
                     std::vector<std::vector<double>>(S, std::vector<double>(static_cast<std::size_t>(mdp.actions), 0.0)));
  std::vector<double> state_dist(S, 0.0);
  state_dist[static_cast<std::size_t>(mdp.initial_state)] = 1.0;
  for (int h = 0; h < mdp.horizon; ++h) {
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < mdp.states; ++s) {
      const double w = state_dist[static_cast<std::size_t>(s)];
      const int a = policy(h, s);
      occ[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = w;
      if (w == 0.0) continue;
      const auto& p = mdp.next_state(h, s, a);
      for (std::size_t s2 = 0; s2 < S; ++s2) next[s2] += w * p[s2];
    }
    state_dist = std::move(next);
  }
  return occ;
}

ValueTables value_tables(const TabularMdp& mdp, const Policy& policy) {
  check_policy(mdp, policy);
  const auto S = static_cast<std::size_t>(mdp.states);
  ValueTables t;
  t.v.assign(static_cast<std::size_t>(mdp.horizon) + 1, std::vector<double>(S, 0.0));
  t.q.assign(static_cast<std::size_t>(mdp.horizon),
             std::vector<std::vector<double>>(S, std::vector<double>(static_cast<std::size_t>(mdp.actions), 0.0)));
  for (int h = mdp.horizon - 1; h >= 0; --h) {
    const auto& later = t.v[static_cast<std::size_t>(h) + 1];
    for (int s = 0; s < mdp.states; ++s) {
      for (int a = 0; a < mdp.actions; ++a) {
        const auto& p = mdp.next_state(h, s, a);
        double future = 0.0;
        for (std::size_t s2 = 0; s2 < S; ++s2) future += p[s2] * later[s2];
        t.q[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = mdp.reward(h, s, a) + future;
      }
      t.v[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] =
          t.q[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)][static_cast<std::size_t>(policy(h, s))];
    }
  }
  return t;
}

double value_dp(const TabularMdp& mdp, const Policy& policy) {
  return value_tables(mdp, policy).v[0][static_cast<std::size_t>(mdp.initial_state)];
}

std::vector<Policy> enumerate_policies(const TabularMdp& mdp, bool stationary, std::size_t cap) {
  mdp.validate();
  const int slots = stationary ? mdp.states : mdp.states * mdp.horizon;
  double count = std::pow(static_cast<double>(mdp.actions), slots);
  if (count > static_cast<double>(cap))
    throw CapacityError("policy space has " + std::to_string(count) + " members, above the cap of " + std::to_string(cap));
  std::vector<Policy> out;
  std::vector<int> digits(static_cast<std::size_t>(slots), 0);
  for (;;) {
    Policy p;
    p.action.assign(static_cast<std::size_t>(mdp.horizon), std::vector<int>(static_cast<std::size_t>(mdp.states)));
    for (int h = 0; h < mdp.horizon; ++h)
      for (int s = 0; s < mdp.states; ++s)
        p.action[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)] =
            digits[static_cast<std::size_t>(stationary ? s : h * mdp.states + s)];
    out.push_back(std::move(p));
    int pos = slots - 1;
    while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == mdp.actions) digits[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return out;
}

Instance reduce_to_cmab(const TabularMdp& mdp, const ReductionOptions& options) {
  mdp.validate();
  if (!options.step_indexed && !mdp.stationary_rewards())
    throw ConfigurationError("step-dependent rewards need the step-indexed arm encoding");
  EpisodicStructure ep;
  ep.mdp = mdp;
  ep.step_indexed = options.step_indexed;
  ep.stationary_policies = options.stationary_policies;
  const int sa = mdp.states * mdp.actions;
  const int m = options.step_indexed ? sa * mdp.horizon : sa;

  std::vector<double> means(static_cast<std::size_t>(m));
  for (int h = 0; h < (options.step_indexed ? mdp.horizon : 1); ++h)
    for (int s = 0; s < mdp.states; ++s)
      for (int a = 0; a < mdp.actions; ++a) means[static_cast<std::size_t>(ep.arm_index(h, s, a))] = mdp.reward(h, s, a);

  std::vector<SuperArm> arms;
  std::map<std::vector<double>, int> seen;
  for (Policy& pi : enumerate_policies(mdp, options.stationary_policies, options.cap)) {
    const auto occ = occupancy(mdp, pi);
    std::vector<double> w(static_cast<std::size_t>(m), 0.0);
    for (int h = 0; h < mdp.horizon; ++h)
      for (int s = 0; s < mdp.states; ++s)
        for (int a = 0; a < mdp.actions; ++a)
          w[static_cast<std::size_t>(ep.arm_index(h, s, a))] +=
              occ[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
    if (!seen.emplace(w, static_cast<int>(arms.size())).second) continue;
    SuperArm arm;
    arm.id = static_cast<int>(arms.size());
    arm.label = "pi" + std::to_string(arm.id);
    for (int i = 0; i < m; ++i)
      if (w[static_cast<std::size_t>(i)] > 0.0) arm.members.push_back(i);
    arm.observable = arm.members;
    arms.push_back(std::move(arm));
    ep.policies.push_back(std::move(pi));
    ep.weights.push_back(std::move(w));
  }

  Instance inst;
  inst.family = Family::Episodic;
  inst.direction = Direction::Maximize;
  inst.outcomes = OutcomeModel::Bernoulli;
  inst.means = MeanVector(std::move(means));
  inst.smoothness = 1.0;
  inst.arms = std::move(arms);
  inst.structure = std::move(ep);
  inst.validate();
  return inst;
}

const SuperArm& policy_arm(const Instance& reduced, const Policy& policy) {
  const auto& ep = reduced.episodic();
  const auto occ = occupancy(ep.mdp, policy);
  std::vector<double> w(static_cast<std::size_t>(reduced.m()), 0.0);
  for (int h = 0; h < ep.mdp.horizon; ++h)
    for (int s = 0; s < ep.mdp.states; ++s)
      for (int a = 0; a < ep.mdp.actions; ++a)
        w[static_cast<std::size_t>(ep.arm_index(h, s, a))] +=
            occ[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  for (std::size_t i = 0; i < ep.weights.size(); ++i)
    if (ep.weights[i] == w) return reduced.action_space()[i];
  throw InstanceMismatchError("policy is not represented in the reduced instance");
}

double simulate_episode(const TabularMdp& mdp, const Policy& policy, Rng& rng) {
  double total = 0.0;
  int s = mdp.initial_state;
  for (int h = 0; h < mdp.horizon; ++h) {
    const int a = policy(h, s);
    if (rng.bernoulli(mdp.reward(h, s, a))) total += 1.0;
    s = static_cast<int>(rng.categorical(mdp.next_state(h, s, a)));
  }
  return total;
}

TabularMdp random_mdp(int states, int actions, int horizon, std::uint64_t seed, bool stationary) {
  if (states < 1 || actions < 1 || horizon < 1) throw ParameterError("MDP needs at least one state, action and step");
  Rng rng(seed);
  TabularMdp mdp;
  mdp.states = states;
  mdp.actions = actions;
  mdp.horizon = horizon;
  mdp.initial_state = 0;
  const int layers = stationary ? 1 : horizon;
  for (int h = 0; h < layers; ++h) {
    auto layer = zeros(states, actions, states);
    std::vector<std::vector<double>> r(static_cast<std::size_t>(states), std::vector<double>(static_cast<std::size_t>(actions)));
    for (int s = 0; s < states; ++s) {
      for (int a = 0; a < actions; ++a) {
        auto& p = layer[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
        double total = 0.0;
        for (double& q : p) total += (q = -std::log(1.0 - rng.uniform()));
        for (double& q : p) q /= total;
        // Put the rounding residue on the largest entry so rows sum to 1 within 1e-15.
        double sum = 0.0;
        for (double q : p) sum += q;
        *std::max_element(p.begin(), p.end()) += 1.0 - sum;
        r[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = rng.uniform();
      }
    }
    mdp.transition.push_back(std::move(layer));
    mdp.reward_means.push_back(std::move(r));
  }
  mdp.validate();
  return mdp;
}

TabularMdp parse_mdp(const std::string& text) {
  TabularMdp mdp;
  mdp.states = mdp.actions = 0;
  mdp.horizon = 0;
  struct Entry {
    int line, h, s, a, s2;
    double value;
  };
  std::vector<Entry> transitions, rewards;
  bool step_transitions = false, step_rewards = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    std::vector<double> nums;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw ParseError("`" + tok + "` is not a number", lineno);
      }
    }
    auto need = [&](std::size_t n) {
      if (nums.size() != n) throw ParseError("`" + key + "` expects " + std::to_string(n) + " values", lineno);
    };
    auto as_int = [&](double v) {
      if (v != std::floor(v)) throw ParseError("expected an integer, got " + std::to_string(v), lineno);
      return static_cast<int>(v);
    };
    if (key == "states") { need(1); mdp.states = as_int(nums[0]); }
    else if (key == "actions") { need(1); mdp.actions = as_int(nums[0]); }
    else if (key == "horizon") { need(1); mdp.horizon = as_int(nums[0]); }
    else if (key == "initial") { need(1); mdp.initial_state = as_int(nums[0]); }
    else if (key == "transition") {
      if (nums.size() == 4) transitions.push_back({lineno, 0, as_int(nums[0]), as_int(nums[1]), as_int(nums[2]), nums[3]});
      else if (nums.size() == 5) {
        step_transitions = true;
        transitions.push_back({lineno, as_int(nums[0]), as_int(nums[1]), as_int(nums[2]), as_int(nums[3]), nums[4]});
      } else throw ParseError("`transition` expects [h] s a s' p", lineno);
    } else if (key == "reward") {
      if (nums.size() == 3) rewards.push_back({lineno, 0, as_int(nums[0]), as_int(nums[1]), 0, nums[2]});
      else if (nums.size() == 4) {
        step_rewards = true;
        rewards.push_back({lineno, as_int(nums[0]), as_int(nums[1]), as_int(nums[2]), 0, nums[3]});
      } else throw ParseError("`reward` expects [h] s a mean", lineno);
    } else {
      throw ParseError("unknown keyword `" + key + "`", lineno);
    }
  }
  if (mdp.states < 1 || mdp.actions < 1 || mdp.horizon < 1)
    throw ParseError("`states`, `actions` and `horizon` must all be given and positive");
  auto range_check = [&](const Entry& e, bool step, bool has_next) {
    if (step && (e.h < 0 || e.h >= mdp.horizon)) throw ValidationError("step out of range", e.line);
    if (e.s < 0 || e.s >= mdp.states || (has_next && (e.s2 < 0 || e.s2 >= mdp.states)))
      throw ValidationError("state out of range", e.line);
    if (e.a < 0 || e.a >= mdp.actions) throw ValidationError("action out of range", e.line);
    if (!(e.value >= 0.0 && e.value <= 1.0)) throw ValidationError("value outside [0,1]", e.line);
  };
  mdp.transition.assign(step_transitions ? static_cast<std::size_t>(mdp.horizon) : 1,
                        zeros(mdp.states, mdp.actions, mdp.states));
  for (const Entry& e : transitions) {
    range_check(e, step_transitions, true);
    mdp.transition[static_cast<std::size_t>(e.h)][static_cast<std::size_t>(e.s)][static_cast<std::size_t>(e.a)]
                  [static_cast<std::size_t>(e.s2)] = e.value;
  }
  mdp.reward_means.assign(step_rewards ? static_cast<std::size_t>(mdp.horizon) : 1,
                          std::vector<std::vector<double>>(static_cast<std::size_t>(mdp.states),
                                                           std::vector<double>(static_cast<std::size_t>(mdp.actions), 0.0)));
  for (const Entry& e : rewards) {
    range_check(e, step_rewards, false);
    mdp.reward_means[static_cast<std::size_t>(e.h)][static_cast<std::size_t>(e.s)][static_cast<std::size_t>(e.a)] = e.value;
  }
  mdp.validate();
  return mdp;
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open MDP file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mdp(buf.str());
}

std::string format_mdp(const TabularMdp& mdp) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "states " << mdp.states << "\nactions " << mdp.actions << "\nhorizon " << mdp.horizon << "\ninitial "
      << mdp.initial_state << '\n';
  const bool step_t = !mdp.stationary_transitions();
  for (std::size_t h = 0; h < mdp.transition.size(); ++h)
    for (int s = 0; s < mdp.states; ++s)
      for (int a = 0; a < mdp.actions; ++a)
        for (int s2 = 0; s2 < mdp.states; ++s2) {
          const double p = mdp.next_state(static_cast<int>(h), s, a)[static_cast<std::size_t>(s2)];
          if (p == 0.0) continue;
          out << "transition ";
          if (step_t) out << h << ' ';
          out << s << ' ' << a << ' ' << s2 << ' ' << p << '\n';
        }
  const bool step_r = !mdp.stationary_rewards();
  for (std::size_t h = 0; h < mdp.reward_means.size(); ++h)
    for (int s = 0; s < mdp.states; ++s)
      for (int a = 0; a < mdp.actions; ++a) {
        out << "reward ";
        if (step_r) out << h << ' ';
        out << s << ' ' << a << ' ' << mdp.reward(static_cast<int>(h), s, a) << '\n';
      }
  return out.str();
}

}  // namespace cmab
