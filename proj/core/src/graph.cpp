#include "cmab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cmab/errors.hpp"

namespace cmab {

void GraphSpec::validate() const {
  if (nodes < 0) throw ValidationError("negative node count");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    const std::string where = "edge " + std::to_string(i);
    if (e.u < 0 || e.u >= nodes || e.v < 0 || e.v >= nodes)
      throw ValidationError(where + " has an endpoint out of range");
    if (e.u == e.v) throw ValidationError(where + " is a self-loop");
    if (!(e.weight >= 0.0 && e.weight <= 1.0))
      throw ValidationError(where + " weight " + std::to_string(e.weight) + " outside [0,1]");
  }
}

std::vector<double> GraphSpec::weights() const {
  std::vector<double> w;
  w.reserve(edges.size());
  for (const Edge& e : edges) w.push_back(e.weight);
  return w;
}

std::vector<std::vector<int>> GraphSpec::out_edges() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[static_cast<std::size_t>(edges[i].u)].push_back(static_cast<int>(i));
    if (!directed) adj[static_cast<std::size_t>(edges[i].v)].push_back(static_cast<int>(i));
  }
  return adj;
}

bool GraphSpec::connected() const {
  if (nodes <= 1) return true;
  std::vector<int> parent(static_cast<std::size_t>(nodes));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = nodes;
  for (const Edge& e : edges) {
    const int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

GraphSpec parse_edge_list(const std::string& text, bool directed) {
  GraphSpec g;
  g.directed = directed;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    Edge e;
    std::string extra;
    try {
      std::size_t used = 0;
      e.u = std::stoi(first, &used);
      if (used != first.size()) throw std::invalid_argument(first);
      std::string sv, sw;
      if (!(fields >> sv >> sw) || (fields >> extra)) throw std::invalid_argument(line);
      e.v = std::stoi(sv, &used);
      if (used != sv.size()) throw std::invalid_argument(sv);
      e.weight = std::stod(sw, &used);
      if (used != sw.size()) throw std::invalid_argument(sw);
    } catch (const std::logic_error&) {
      throw ParseError("expected `u v w`, got `" + line + "`", lineno);
    }
    if (e.u < 0 || e.v < 0) throw ValidationError("negative node id", lineno);
    if (e.u == e.v) throw ValidationError("self-loop on node " + std::to_string(e.u), lineno);
    if (!(e.weight >= 0.0 && e.weight <= 1.0))
      throw ValidationError("weight " + std::to_string(e.weight) + " outside [0,1]", lineno);
    g.nodes = std::max({g.nodes, e.u + 1, e.v + 1});
    g.edges.push_back(e);
  }
  return g;
}

GraphSpec load_edge_list(const std::filesystem::path& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edge_list(buf.str(), directed);
}

}  // namespace cmab
