#pragma once

// Known-transition episodic MDPs as CMAB instances: base arms are
// (state, action) pairs, super arms are deterministic policies.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cmab/environment.hpp"
#include "cmab/mdp.hpp"

namespace cmab {

/// A[h][s][a]: probability of being in s at step h and playing a.
using OccupancyTable = std::vector<std::vector<std::vector<double>>>;

OccupancyTable occupancy(const TabularMdp& mdp, const Policy& policy);

struct ValueTables {
  std::vector<std::vector<double>> v;               ///< V[h][s], h = 0..H (V[H] = 0)
  std::vector<std::vector<std::vector<double>>> q;  ///< Q[h][s][a]
};

ValueTables value_tables(const TabularMdp& mdp, const Policy& policy);

/// V_1(s_1) by backward induction.
double value_dp(const TabularMdp& mdp, const Policy& policy);

/// All deterministic policies (non-stationary unless `stationary`). CapacityError above `cap`.
std::vector<Policy> enumerate_policies(const TabularMdp& mdp, bool stationary = false, std::size_t cap = 100'000);

struct ReductionOptions {
  bool step_indexed = false;         ///< base arms (h, s, a) instead of (s, a)
  bool stationary_policies = false;  ///< only enumerate policies with pi_h = pi_1
  std::size_t cap = 100'000;
};

/// One super arm per occupancy-distinct policy; the first policy (in
/// enumeration order) of each class represents it.
Instance reduce_to_cmab(const TabularMdp& mdp, const ReductionOptions& options = {});

/// The super arm of `reduced` that plays `policy` (InstanceMismatchError when absent).
const SuperArm& policy_arm(const Instance& reduced, const Policy& policy);

/// Return of one episode with Bernoulli per-step rewards.
double simulate_episode(const TabularMdp& mdp, const Policy& policy, Rng& rng);

TabularMdp random_mdp(int states, int actions, int horizon, std::uint64_t seed, bool stationary = true);

/// Line format: `states N`, `actions N`, `horizon H`, `initial s`,
/// `transition [h] s a s' p`, `reward [h] s a mean`; `#` comments.
TabularMdp parse_mdp(const std::string& text);
TabularMdp load_mdp(const std::filesystem::path& path);
std::string format_mdp(const TabularMdp& mdp);

}  // namespace cmab
