#include "cmab/mdp.hpp"

#include <cmath>
#include <string>

#include "cmab/errors.hpp"

namespace cmab {

void TabularMdp::validate() const {
  if (states < 1 || actions < 1 || horizon < 1) throw ParameterError("MDP needs at least one state, action and step");
  if (initial_state < 0 || initial_state >= states) throw ParameterError("initial state out of range");
  const auto layers_ok = [&](std::size_t n) { return n == 1 || n == static_cast<std::size_t>(horizon); };
  if (!layers_ok(transition.size())) throw ParameterError("transition needs 1 or H layers");
  if (!layers_ok(reward_means.size())) throw ParameterError("reward table needs 1 or H layers");
  for (std::size_t h = 0; h < transition.size(); ++h) {
    if (transition[h].size() != static_cast<std::size_t>(states)) throw ParameterError("transition layer has wrong state count");
    for (int s = 0; s < states; ++s) {
      const auto& row = transition[h][static_cast<std::size_t>(s)];
      if (row.size() != static_cast<std::size_t>(actions)) throw ParameterError("transition layer has wrong action count");
      for (int a = 0; a < actions; ++a) {
        const auto& p = row[static_cast<std::size_t>(a)];
        if (p.size() != static_cast<std::size_t>(states)) throw ParameterError("next-state distribution has wrong length");
        double sum = 0.0;
        for (double q : p) {
          if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("transition probability outside [0,1]");
          sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-12)
          throw ParameterError("P(.|" + std::to_string(s) + "," + std::to_string(a) + ") sums to " + std::to_string(sum));
      }
    }
  }
  for (const auto& layer : reward_means) {
    if (layer.size() != static_cast<std::size_t>(states)) throw ParameterError("reward layer has wrong state count");
    for (const auto& row : layer) {
      if (row.size() != static_cast<std::size_t>(actions)) throw ParameterError("reward layer has wrong action count");
      for (double r : row)
        if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("reward mean outside [0,1]");
    }
  }
}

}  // namespace cmab
