#pragma once

#include <vector>

namespace cmab {

/// Finite-horizon episodic MDP with known transitions and a fixed initial state.
///
/// `transition[h][s][a]` is the next-state distribution at step h (0-based).
/// Stationary models store one layer which is reused for every step.
/// `reward_means[h][s][a]` follows the same convention.
struct TabularMdp {
  int states = 0;
  int actions = 0;
  int horizon = 1;
  int initial_state = 0;
  std::vector<std::vector<std::vector<std::vector<double>>>> transition;
  std::vector<std::vector<std::vector<double>>> reward_means;

  bool stationary_transitions() const noexcept { return transition.size() == 1; }
  bool stationary_rewards() const noexcept { return reward_means.size() == 1; }

  const std::vector<double>& next_state(int h, int s, int a) const {
    const auto& layer = transition[stationary_transitions() ? 0 : static_cast<std::size_t>(h)];
    return layer[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  }

  double reward(int h, int s, int a) const {
    const auto& layer = reward_means[stationary_rewards() ? 0 : static_cast<std::size_t>(h)];
    return layer[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  }

  /// Row sums within 1e-12, probabilities and rewards in [0,1]. Throws ParameterError.
  void validate() const;
};

/// Deterministic non-stationary policy: `action[h][s]`.
struct Policy {
  std::vector<std::vector<int>> action;

  int operator()(int h, int s) const {
    return action[static_cast<std::size_t>(h)][static_cast<std::size_t>(s)];
  }
  friend bool operator==(const Policy&, const Policy&) = default;
};

}  // namespace cmab
