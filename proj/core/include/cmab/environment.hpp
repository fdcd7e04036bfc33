#pragma once

// The CMAB environment: base arms with unknown means, super arms with
// probabilistically triggered observation sets, and closed-form expected rewards.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cmab/errors.hpp"
#include "cmab/graph.hpp"
#include "cmab/mdp.hpp"
#include "cmab/random.hpp"

namespace cmab {

/// Vector with every entry in [0,1]. The tag keeps means and outcomes apart.
template <typename Tag>
class UnitVector {
 public:
  UnitVector() = default;

  explicit UnitVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!(v >= 0.0 && v <= 1.0))
        throw ParameterError("entry " + std::to_string(i) + " = " + std::to_string(v) +
                             " is outside [0,1]");
    }
  }

  static UnitVector filled(std::size_t m, double value) {
    return UnitVector(std::vector<double>(m, value));
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  std::vector<double> values_;
};

using MeanVector = UnitVector<struct MeanTag>;
using OutcomeVector = UnitVector<struct OutcomeTag>;

enum class Direction { Maximize, Minimize };

enum class Family {
  Linear,        ///< enumerated arms, reward = offset + sum of member means
  SpanningTree,  ///< base arm = edge, super arm = spanning tree, minimise total cost
  ShortestPath,  ///< base arm = edge, super arm = source-dest path, minimise total cost
  Coverage,      ///< probabilistic maximum coverage on a bipartite graph
  Cascade,       ///< ranked list of K items under the cascade click model
  Influence,     ///< independent-cascade influence maximisation
  Episodic,      ///< policies of a known-transition episodic MDP
};

enum class OutcomeModel { Bernoulli, DeterministicMean };

std::string_view to_string(Family f);
std::string_view to_string(Direction d);
std::string_view to_string(OutcomeModel o);
Family parse_family(std::string_view s);
Direction parse_direction(std::string_view s);
OutcomeModel parse_outcome_model(std::string_view s);

/// A combinatorial action.
///
/// `members` is ordered (order only matters for cascades and paths),
/// `observable` is the sorted set O_S of base arms with positive trigger
/// probability, and `offset` is a constant reward term (linear family only).
/// A linear arm may trigger its members at random: member j is observed with
/// probability trigger_prob[j] and contributes only when observed.
struct SuperArm {
  int id = -1;  ///< index into the enumerated action space, -1 when implicit
  std::string label;
  std::vector<int> members;
  std::vector<int> observable;
  double offset = 0.0;
  std::vector<double> trigger_prob;  ///< linear family: per-member trigger probability; empty means all 1

  bool same_action(const SuperArm& other) const {
    return members == other.members && offset == other.offset && trigger_prob == other.trigger_prob;
  }
};

/// Canonical label for an implicit arm: members joined by '-', or "empty".
std::string default_label(const std::vector<int>& members);

struct TriggerSet {
  std::vector<int> indices;  ///< sorted
  std::vector<int> visits;   ///< parallel visit counts; empty unless multi-visit (episodic)
};

struct Observation {
  int arm = 0;
  double value = 0.0;
  friend bool operator==(const Observation&, const Observation&) = default;
};

/// One interaction round as seen by the environment and the adversary.
struct RoundRecord {
  std::int64_t round = 0;
  int pulled_id = -1;
  std::string pulled;
  std::vector<int> members;            ///< of the pulled arm, in order
  TriggerSet triggered;
  std::vector<Observation> raw;        ///< X restricted to the triggered set
  std::vector<Observation> corrupted;  ///< what the learner received
  int cost_increment = 0;
};

/// Set of target super arms. When `permutation_closed`, any reordering of a
/// listed arm is also a target (cascading lists).
struct TargetSet {
  std::vector<SuperArm> arms;
  bool permutation_closed = false;

  bool contains(const SuperArm& arm) const;
  /// The listed target equal to `arm` (up to permutation when closed), or nullptr.
  const SuperArm* find(const SuperArm& arm) const;
};

struct CoverageStructure {
  int left = 0;
  int right = 0;
  std::vector<std::pair<int, int>> edges;  ///< base arm i = edges[i] = (left node, right node)
  int k = 1;
};

struct GraphStructure {
  GraphSpec graph;  ///< base arm i = graph.edges[i]
  int source = -1;  ///< shortest path only
  int dest = -1;
  int k = 0;        ///< seed-set size, influence only
};

struct CascadeStructure {
  int k = 1;
};

struct EpisodicStructure {
  TabularMdp mdp;
  bool step_indexed = false;              ///< base arms (s,a,h) instead of (s,a)
  bool stationary_policies = false;       ///< policy space restricted to pi_h = pi_1
  std::vector<Policy> policies;           ///< super arm id -> policy
  std::vector<std::vector<double>> weights;  ///< per policy, expected observation count of each arm

  int arm_index(int h, int s, int a) const {
    const int sa = s * mdp.actions + a;
    return step_indexed ? h * mdp.states * mdp.actions + sa : sa;
  }
};

struct LinearStructure {};

using Structure = std::variant<LinearStructure, GraphStructure, CoverageStructure,
                               CascadeStructure, EpisodicStructure>;

/// A CMAB problem instance: ([m], action space, outcome distribution, trigger rule, reward).
///
/// Built by the functions in instances.hpp / rl_reduction.hpp and immutable
/// afterwards; share it by const reference across repetitions.
struct Instance {
  Family family = Family::Linear;
  Direction direction = Direction::Maximize;
  OutcomeModel outcomes = OutcomeModel::Bernoulli;
  MeanVector means;
  double smoothness = 1.0;                     ///< B in the 1-norm TPM bound
  std::optional<std::vector<SuperArm>> arms;   ///< present when enumerated
  Structure structure;

  int m() const noexcept { return static_cast<int>(means.size()); }
  bool enumerable() const noexcept { return arms.has_value(); }
  const std::vector<SuperArm>& action_space() const;

  const GraphStructure& graph() const { return std::get<GraphStructure>(structure); }
  const CoverageStructure& coverage() const { return std::get<CoverageStructure>(structure); }
  const CascadeStructure& cascade() const { return std::get<CascadeStructure>(structure); }
  const EpisodicStructure& episodic() const { return std::get<EpisodicStructure>(structure); }

  /// Throws InstanceMismatchError / ParameterError on structural problems.
  void validate() const;
};

/// O_S for the given ordered member list under the instance's true triggering law.
std::vector<int> observable_set(const Instance& instance, const std::vector<int>& members);

/// Builds a super arm from members, filling observable set, label and (when
/// the action space is enumerated and contains it) the id.
SuperArm make_arm(const Instance& instance, std::vector<int> members);

/// Throws InstanceMismatchError when `arm` is not an action of `instance`.
void check_arm(const Instance& instance, const SuperArm& arm);

/// One joint outcome draw X ~ D: independent Bernoulli(mu_i) or the means themselves.
OutcomeVector sample_outcomes(const Instance& instance, Rng& rng);

/// Draws the triggered set for pulling `arm` under outcomes X.
TriggerSet trigger(const Instance& instance, const SuperArm& arm, const OutcomeVector& outcomes,
                   Rng& rng);

/// r_S(mu), closed form per family.
double expected_reward(const Instance& instance, const SuperArm& arm, const MeanVector& means);

/// R(S, X, tau) for one realised round.
double realized_reward(const Instance& instance, const SuperArm& arm, const OutcomeVector& outcomes,
                       const TriggerSet& triggered);

/// mu masked to O_S: entries outside O_S become 0 (maximise) or 1 (minimise).
MeanVector masked_means(const MeanVector& means, const SuperArm& arm, Direction direction);
MeanVector masked_means(const Instance& instance, const MeanVector& means, const SuperArm& arm);

/// p_i^{D,S} for every base arm (expected observation count for stationary episodic arms).
std::vector<double> trigger_probabilities(const Instance& instance, const SuperArm& arm);

/// p* = min over S and i in O_S of p_i^{D,S}.
double min_trigger_probability(const Instance& instance);

/// K = max over S of |O_S|.
int max_observable_size(const Instance& instance);

/// All super arms of an implicitly described instance. Throws CapacityError above `cap`.
std::vector<SuperArm> enumerate_action_space(const Instance& instance,
                                             std::size_t cap = 1'000'000);

/// Copy of `instance` with its action space materialised.
Instance with_enumerated_action_space(Instance instance, std::size_t cap = 1'000'000);

/// True when `a` is strictly better than `b` under the instance's direction.
inline bool better(Direction d, double a, double b) { return d == Direction::Maximize ? a > b : a < b; }

}  // namespace cmab
