#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cmab {

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

/// Weighted graph. Edge index doubles as base-arm index in graph-backed instances.
/// Invariants: weights in [0,1], no self-loops, endpoints in [0, nodes).
struct GraphSpec {
  int nodes = 0;
  std::vector<Edge> edges;
  bool directed = false;

  std::size_t edge_count() const noexcept { return edges.size(); }

  /// Throws ValidationError when an invariant is violated.
  void validate() const;

  /// Weights of all edges in index order.
  std::vector<double> weights() const;

  /// Incidence lists: for every node the indices of edges leaving it
  /// (both endpoints for undirected graphs).
  std::vector<std::vector<int>> out_edges() const;

  /// The endpoint of `edge` opposite to `from`.
  int other_end(int edge, int from) const {
    const Edge& e = edges[static_cast<std::size_t>(edge)];
    return e.u == from ? e.v : e.u;
  }

  bool connected() const;
};

/// Reads `u v w` lines; `#` starts a comment; blank lines skipped. Node count is
/// one past the largest endpoint seen. Throws ParseError / ValidationError with
/// the offending line number.
GraphSpec load_edge_list(const std::filesystem::path& path, bool directed = false);

/// Parses the same format from a string (used by the loader and tests).
GraphSpec parse_edge_list(const std::string& text, bool directed = false);

}  // namespace cmab
