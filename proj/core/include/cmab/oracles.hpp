#pragma once

// Offline solvers mapping a mean (or confidence-bound) vector to a best super arm.
// Tie-breaking is deterministic everywhere: smallest id, smallest edge id,
// lexicographically smallest node sequence.

#include <cstdint>
#include <functional>
#include <string>

#include "cmab/environment.hpp"

namespace cmab {

struct OracleReport {
  SuperArm chosen;
  double value = 0.0;  ///< r_chosen(query)
  bool exact = true;
};

using Oracle = std::function<OracleReport(const MeanVector& query)>;

/// Arg-best over the (enumerated or enumerable) action space; ties to the smallest id.
OracleReport brute_force_oracle(const Instance& instance, const MeanVector& query,
                                std::size_t cap = 1'000'000);

/// Minimum spanning tree, ties by edge id. InfeasibleError on a disconnected graph.
OracleReport kruskal_oracle(const Instance& instance, const MeanVector& query);

/// Shortest source-dest path, ties by lexicographic node sequence then edge id.
/// InfeasibleError when dest is unreachable.
OracleReport dijkstra_oracle(const Instance& instance, const MeanVector& query);
OracleReport dijkstra_oracle(const Instance& instance, int source, int dest, const MeanVector& query);

/// Greedy maximum coverage with k left nodes, marginal-gain ties to the smallest node id.
OracleReport greedy_pmc_oracle(const Instance& instance, int k, const MeanVector& query);

/// The K items of largest query value in descending order, ties to the smallest item id.
OracleReport topk_cascade_oracle(const Instance& instance, int k, const MeanVector& query);

/// Greedy seed selection with spread estimated on `samples` shared live-edge
/// graphs drawn from `seed`. Deterministic given (query, seed).
OracleReport mc_greedy_im_oracle(const Instance& instance, int k, const MeanVector& query,
                                 int samples = 1000, std::uint64_t seed = 0);

struct OracleOptions {
  bool force_brute_force = false;
  int im_samples = 200;
  std::uint64_t im_seed = 0;
};

/// The family's natural oracle (brute force for linear and episodic instances).
Oracle default_oracle(const Instance& instance, OracleOptions options = {});

// ---- competitor search for the attackability gap ---------------------------

enum class GapSolver {
  BruteForce,   ///< enumerate every super arm
  FamilyExact,  ///< second-best MST swap, second shortest path, top-K exclusion; brute force otherwise
  Greedy,       ///< greedy / MC oracle plus single swaps; not exact
};

std::string_view to_string(GapSolver s);
GapSolver parse_gap_solver(std::string_view s);

struct Competitor {
  SuperArm arm;
  double value = 0.0;
  bool exact = true;
};

/// The best super arm S' != `excluded` under `query`. When `permutations_too`
/// every reordering of `excluded` is also skipped. InfeasibleError when no
/// competitor exists.
Competitor best_competitor(const Instance& instance, const SuperArm& excluded, const MeanVector& query,
                           GapSolver solver, bool permutations_too = false);

}  // namespace cmab
