#pragma once

// The adversary: attackability gap, Algorithm-1 corruption and its variants,
// the influence extended-target heuristic, and l0 cost accounting.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmab/environment.hpp"
#include "cmab/oracles.hpp"

namespace cmab {

enum class Classification { Attackable, Unattackable, Boundary };

std::string_view to_string(Classification c);

/// Gaps within this relative distance of zero are reported as exactly zero.
inline constexpr double kGapTolerance = 1e-12;

/// Pure function of sign: attackable iff > 0, unattackable iff < 0.
Classification classify(double delta_m);

struct GapReport {
  std::vector<SuperArm> targets;
  std::vector<double> gaps;            ///< Delta_S per target
  std::vector<SuperArm> witnesses;     ///< best competitor under the mask
  std::vector<double> witness_values;
  double delta_m = -std::numeric_limits<double>::infinity();
  Classification classification = Classification::Unattackable;
  bool exact = true;
  std::vector<std::string> warnings;
};

/// Delta_S for one target. Maximise: r_S(mu) - max_{S'} r_S'(mu masked to O_S).
/// Minimise: min_{S'} r_S'(mu masked to O_S, 1 outside) - r_S(mu).
double gap_of(const Instance& instance, const SuperArm& target, GapSolver solver, bool permutations_too = false,
              Competitor* witness = nullptr);

/// Gap of every member of `targets`. Non-exact solvers are allowed but the
/// report carries a warning and exact = false.
GapReport compute_gap(const Instance& instance, const TargetSet& targets, GapSolver solver = GapSolver::BruteForce);

/// CSV with columns `arm_id,gap,witness_id,classification`.
void write_gap_csv(std::ostream& out, const GapReport& report);

struct AttackPolicy {
  TargetSet target_set;
  SuperArm chosen_target;
  double corruption_value = 0.0;
  std::vector<int> protected_set;  ///< sorted base-arm indices never corrupted

  bool protects(int arm) const;
};

/// Algorithm 1: protect O_target, write 0 (maximise) or 1 (minimise) elsewhere.
AttackPolicy algorithm1_policy(const Instance& instance, const TargetSet& targets, const SuperArm& target);

struct Corruption {
  std::vector<Observation> corrupted;
  int cost = 0;  ///< entries whose value actually changed
};

/// Rewrites every unprotected observation to the corruption value.
Corruption algorithm1_corrupt(const AttackPolicy& policy, const TriggerSet& triggered,
                              const std::vector<Observation>& raw);

enum class TargetStrategy { FirstPositive, RandomMember };

std::string_view to_string(TargetStrategy s);
TargetStrategy parse_target_strategy(std::string_view s);

/// FirstPositive: smallest-id target with Delta > 0 (NoAttackableTargetError otherwise).
/// RandomMember: seeded uniform member regardless of its gap.
SuperArm select_target(const GapReport& report, TargetStrategy strategy, std::uint64_t seed = 0);

inline constexpr int kUnboundedHops = std::numeric_limits<int>::max();

/// Nodes within hop distance < ell of `seeds` (following edge direction).
std::vector<int> extended_target_nodes(const GraphSpec& graph, const std::vector<int>& seeds, int ell);

/// Protects every edge with an endpoint in the extended target set.
AttackPolicy im_extended_target_policy(const Instance& instance, const SuperArm& seeds, int ell);

/// T_0 = 6 K B budget / |Delta| + 18 K^2 B^2 ln(4 m T^3 / delta) / Delta^2.
/// NotApplicableError unless delta_m < 0.
double t0_diagnostic(int k, double smoothness, double budget, double delta_m, int m, std::int64_t horizon,
                     double delta);
double t0_diagnostic(const Instance& instance, const GapReport& report, double budget, std::int64_t horizon,
                     double delta);

/// 8 m^3 ln(4 m T^3 / delta) / Delta^2: rounds spent off the target by CUCB
/// with the greedy coverage oracle under Algorithm 1.
double pmc_nontarget_bound(int m, std::int64_t horizon, double delta, double gap);

class CostLedger {
 public:
  explicit CostLedger(bool keep_rounds = false) : keep_rounds_(keep_rounds) {}
  void add(int increment);
  std::int64_t cumulative() const noexcept { return cumulative_; }
  const std::vector<int>& per_round() const noexcept { return per_round_; }

 private:
  bool keep_rounds_;
  std::int64_t cumulative_ = 0;
  std::vector<int> per_round_;
};

/// Stateful attacker for one run: applies a policy until an optional budget
/// (total number of changed entries) is exhausted.
class Adversary {
 public:
  Adversary() = default;  ///< no attack
  explicit Adversary(AttackPolicy policy, std::optional<std::int64_t> budget = std::nullopt);

  Corruption corrupt(const TriggerSet& triggered, const std::vector<Observation>& raw);
  const CostLedger& ledger() const noexcept { return ledger_; }
  const std::optional<AttackPolicy>& policy() const noexcept { return policy_; }

 private:
  std::optional<AttackPolicy> policy_;
  std::optional<std::int64_t> budget_;
  CostLedger ledger_;
};

}  // namespace cmab
