#pragma once

// Victim algorithms. Every learner consumes only CorruptedFeedback, the
// post-adversary view of one round; raw outcomes never reach it.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "cmab/environment.hpp"
#include "cmab/oracles.hpp"

namespace cmab {

enum class RadiusMode {
  HighProbability,  ///< sqrt(ln(4 m t^3 / delta) / (2 T_i))
  Hoeffding,        ///< sqrt(3 ln t / (2 T_i))
};

std::string_view to_string(RadiusMode r);
RadiusMode parse_radius_mode(std::string_view s);

inline constexpr double kDefaultDelta = 0.05;
inline constexpr double kUnobservedRadius = std::numeric_limits<double>::infinity();

/// Radius for an arm observed `observations` times at round t. +inf when unobserved.
double confidence_radius(RadiusMode mode, int m, std::int64_t t, std::int64_t observations,
                         double delta = kDefaultDelta);

/// Outcomes delivered to the learner after the adversary has acted.
class CorruptedFeedback {
 public:
  CorruptedFeedback() = default;
  explicit CorruptedFeedback(std::vector<Observation> observations) : observations_(std::move(observations)) {}
  const std::vector<Observation>& observations() const noexcept { return observations_; }

 private:
  std::vector<Observation> observations_;
};

struct LearnerState {
  std::int64_t t = 0;                    ///< completed rounds
  std::vector<std::int64_t> obs_count;   ///< T_i
  std::vector<double> sum;               ///< sum of received outcomes
  std::vector<double> sum_sq;
  std::vector<std::int64_t> counters;    ///< N_i: rounds in which i was observable
  RadiusMode mode = RadiusMode::HighProbability;
  double delta = kDefaultDelta;

  LearnerState() = default;
  LearnerState(int m, RadiusMode mode, double delta);

  int m() const noexcept { return static_cast<int>(obs_count.size()); }
  double emp_mean(int i) const;
  double emp_variance(int i) const;
  /// Radius used when selecting in round t + 1.
  double radius(int i) const;
};

/// UCB_t = min(mean + rho, 1) (maximise) or LCB_t = max(mean - rho, 0) (minimise).
MeanVector confidence_bounds(const LearnerState& state, Direction direction);

class Learner {
 public:
  virtual ~Learner() = default;
  /// Chooses the super arm for round state().t + 1.
  virtual SuperArm select() = 0;
  /// Feedback for the arm returned by the last select(). ProtocolError when it
  /// mentions an arm outside that arm's observable set or no arm is pending.
  virtual void observe(const CorruptedFeedback& feedback);
  const LearnerState& state() const noexcept { return state_; }

 protected:
  Learner(const Instance& instance, RadiusMode mode, double delta);
  const Instance& instance_;
  LearnerState state_;
  std::optional<SuperArm> pending_;
};

/// Combinatorial UCB over an arbitrary oracle.
class Cucb : public Learner {
 public:
  Cucb(const Instance& instance, Oracle oracle, RadiusMode mode = RadiusMode::HighProbability,
       double delta = kDefaultDelta);
  SuperArm select() override;
  const OracleReport& last_report() const noexcept { return last_; }

 private:
  Oracle oracle_;
  OracleReport last_;
};

/// Applies the previous round's feedback (if any), then selects.
SuperArm cucb_step(Cucb& learner, const CorruptedFeedback* previous);

enum class CascadeIndex { Ucb1, KlUcb, UcbV };

std::string_view to_string(CascadeIndex c);

/// Largest q in [mean, 1] with n * kl(mean, q) <= budget, by bisection to 1e-9.
double kl_ucb_index(double mean, std::int64_t n, double budget);

/// Per-item index for round t; 1 for unobserved items.
double cascade_index(CascadeIndex kind, const LearnerState& state, int item, std::int64_t t);

/// Ranked-list learner for cascading instances: top-K items by index.
class CascadeLearner : public Learner {
 public:
  CascadeLearner(const Instance& instance, CascadeIndex kind);
  SuperArm select() override;
  std::vector<double> indices() const;
  CascadeIndex kind() const noexcept { return kind_; }

 private:
  CascadeIndex kind_;
};

SuperArm cascade_ucb1_step(CascadeLearner& learner, const CorruptedFeedback* previous);
SuperArm cascade_klucb_step(CascadeLearner& learner, const CorruptedFeedback* previous);
SuperArm cascade_ucbv_step(CascadeLearner& learner, const CorruptedFeedback* previous);

enum class LearnerKind { Cucb, CascadeUcb1, CascadeKlUcb, CascadeUcbV };

std::string_view to_string(LearnerKind k);
LearnerKind parse_learner(std::string_view s);

std::unique_ptr<Learner> make_learner(const Instance& instance, LearnerKind kind, Oracle oracle,
                                      RadiusMode mode = RadiusMode::HighProbability,
                                      double delta = kDefaultDelta);

}  // namespace cmab
