#include "cmab/instance_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "cmab/instances.hpp"
#include "cmab/rl_reduction.hpp"

namespace cmab {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Line {
  int number = 0;
  std::string key;
  std::vector<std::string> args;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream fields(raw);
    Line l;
    l.number = n;
    if (!(fields >> l.key)) continue;
    for (std::string tok; fields >> tok;) l.args.push_back(tok);
    lines.push_back(std::move(l));
  }
  return lines;
}

double to_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ParseError("`" + s + "` is not a number", line);
}

int to_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ParseError("`" + s + "` is not an integer", line);
}

void arity(const Line& l, std::size_t n) {
  if (l.args.size() != n)
    throw ParseError("`" + l.key + "` expects " + std::to_string(n) + " values, got " + std::to_string(l.args.size()),
                     l.number);
}

template <typename F>
auto at_line(int line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what(), line);
  }
}

}  // namespace

Instance parse_instance(const std::string& text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty instance file");
  const Line& header = lines.front();
  if (header.args.size() < 2 || header.args.size() > 3)
    throw ParseError("header must read `family m direction [outcomes]`", header.number);
  const std::string family_name = header.key;
  const int m = to_int(header.args[0], header.number);
  const Direction direction = at_line(header.number, [&] { return parse_direction(header.args[1]); });
  const OutcomeModel outcomes = header.args.size() == 3
                                    ? at_line(header.number, [&] { return parse_outcome_model(header.args[2]); })
                                    : OutcomeModel::Bernoulli;

  std::vector<double> means;
  int means_line = 0;
  std::vector<SuperArm> arms;
  GraphSpec graph;
  bool directed = false;
  int nodes = -1, source = -1, dest = -1, k = -1, left = -1, right = -1;
  std::vector<Edge> edges;
  std::optional<HardInstanceParams> hard;
  std::string mdp_text;
  ReductionOptions reduction;
  std::optional<double> smoothness;

  for (std::size_t idx = 1; idx < lines.size(); ++idx) {
    const Line& l = lines[idx];
    if (l.key == "means") {
      means.clear();
      for (const auto& a : l.args) means.push_back(to_double(a, l.number));
      means_line = l.number;
    } else if (l.key == "arm") {
      // arm <label> <offset> : i j@q ...
      if (l.args.size() < 3 || l.args[2] != ":") throw ParseError("expected `arm <label> <offset> : members`", l.number);
      SuperArm a;
      a.label = l.args[0];
      a.offset = to_double(l.args[1], l.number);
      bool any_prob = false;
      std::vector<double> probs;
      for (std::size_t j = 3; j < l.args.size(); ++j) {
        const auto& tok = l.args[j];
        const auto at = tok.find('@');
        a.members.push_back(to_int(tok.substr(0, at), l.number));
        if (at != std::string::npos) {
          any_prob = true;
          probs.push_back(to_double(tok.substr(at + 1), l.number));
        } else {
          probs.push_back(1.0);
        }
      }
      if (any_prob) a.trigger_prob = std::move(probs);
      arms.push_back(std::move(a));
    } else if (l.key == "nodes") {
      arity(l, 1);
      nodes = to_int(l.args[0], l.number);
    } else if (l.key == "directed") {
      arity(l, 1);
      directed = to_int(l.args[0], l.number) != 0;
    } else if (l.key == "edge") {
      arity(l, 3);
      edges.push_back({to_int(l.args[0], l.number), to_int(l.args[1], l.number), to_double(l.args[2], l.number)});
    } else if (l.key == "source") {
      arity(l, 1);
      source = to_int(l.args[0], l.number);
    } else if (l.key == "dest") {
      arity(l, 1);
      dest = to_int(l.args[0], l.number);
    } else if (l.key == "k") {
      arity(l, 1);
      k = to_int(l.args[0], l.number);
    } else if (l.key == "left") {
      arity(l, 1);
      left = to_int(l.args[0], l.number);
    } else if (l.key == "right") {
      arity(l, 1);
      right = to_int(l.args[0], l.number);
    } else if (l.key == "smoothness") {
      arity(l, 1);
      smoothness = to_double(l.args[0], l.number);
    } else if (l.key == "hard") {
      arity(l, 3);
      hard = HardInstanceParams{to_int(l.args[0], l.number), to_double(l.args[1], l.number), to_int(l.args[2], l.number)};
    } else if (l.key == "step_indexed") {
      arity(l, 1);
      reduction.step_indexed = to_int(l.args[0], l.number) != 0;
    } else if (l.key == "stationary_policies") {
      arity(l, 1);
      reduction.stationary_policies = to_int(l.args[0], l.number) != 0;
    } else if (l.key == "states" || l.key == "actions" || l.key == "horizon" || l.key == "initial" ||
               l.key == "transition" || l.key == "reward") {
      mdp_text += l.key;
      for (const auto& a : l.args) mdp_text += ' ' + a;
      mdp_text += '\n';
    } else {
      throw ParseError("unknown keyword `" + l.key + "`", l.number);
    }
  }

  auto check_m = [&](const Instance& inst) {
    if (inst.m() != m)
      throw ValidationError("header declares m = " + std::to_string(m) + " but the instance has " +
                                std::to_string(inst.m()) + " base arms",
                            header.number);
  };
  auto edge_means = [&]() {
    if (!means.empty()) {
      if (means.size() != edges.size()) throw ValidationError("`means` length differs from the edge count", means_line);
      for (std::size_t e = 0; e < edges.size(); ++e) edges[e].weight = means[e];
    }
  };

  Instance inst;
  if (family_name == "hard") {
    if (!hard) throw ParseError("hard instance needs a `hard n epsilon special` line");
    inst = at_line(header.number, [&] { return build_hard_instance(*hard); });
  } else {
    const Family family = at_line(header.number, [&] { return parse_family(family_name); });
    switch (family) {
      case Family::Linear:
        if (static_cast<int>(means.size()) != m) throw ValidationError("`means` must list m values", means_line);
        inst = at_line(header.number, [&] { return make_linear_instance(means, arms, direction, outcomes); });
        break;
      case Family::SpanningTree:
      case Family::ShortestPath:
      case Family::Influence: {
        edge_means();
        graph.directed = directed;
        graph.edges = edges;
        graph.nodes = nodes;
        if (nodes < 0)
          for (const Edge& e : edges) graph.nodes = std::max({graph.nodes, e.u + 1, e.v + 1});
        inst = at_line(header.number, [&] {
          if (family == Family::SpanningTree) return make_spanning_tree_instance(graph, outcomes);
          if (family == Family::ShortestPath) return make_shortest_path_instance(graph, source, dest, outcomes);
          return make_influence_instance(graph, k);
        });
        break;
      }
      case Family::Coverage:
        edge_means();
        inst = at_line(header.number, [&] { return make_coverage_instance(left, right, edges, k); });
        break;
      case Family::Cascade:
        if (static_cast<int>(means.size()) != m) throw ValidationError("`means` must list m values", means_line);
        inst = at_line(header.number, [&] { return make_cascade_instance(means, k); });
        break;
      case Family::Episodic:
        inst = at_line(header.number, [&] { return reduce_to_cmab(parse_mdp(mdp_text), reduction); });
        break;
    }
  }
  if (inst.family != Family::Linear && inst.direction != direction)
    throw ValidationError(std::string(to_string(inst.family)) + " instances must " +
                              std::string(to_string(inst.direction)),
                          header.number);
  inst.direction = direction;
  inst.outcomes = outcomes;
  if (smoothness) inst.smoothness = *smoothness;
  check_m(inst);
  at_line(header.number, [&] {
    inst.validate();
    return 0;
  });
  return inst;
}

Instance load_instance(const std::filesystem::path& path) { return parse_instance(read_file(path)); }

std::string format_instance(const Instance& inst) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << to_string(inst.family) << ' ' << inst.m() << ' ' << to_string(inst.direction) << ' '
      << to_string(inst.outcomes) << '\n';
  if (inst.smoothness != 1.0) out << "smoothness " << inst.smoothness << '\n';
  auto write_means = [&] {
    out << "means";
    for (double v : inst.means.values()) out << ' ' << v;
    out << '\n';
  };
  switch (inst.family) {
    case Family::Linear:
      write_means();
      for (const SuperArm& a : inst.action_space()) {
        out << "arm " << a.label << ' ' << a.offset << " :";
        for (std::size_t j = 0; j < a.members.size(); ++j) {
          out << ' ' << a.members[j];
          if (!a.trigger_prob.empty()) out << '@' << a.trigger_prob[j];
        }
        out << '\n';
      }
      break;
    case Family::SpanningTree:
    case Family::ShortestPath:
    case Family::Influence: {
      const auto& gs = inst.graph();
      out << "nodes " << gs.graph.nodes << "\ndirected " << (gs.graph.directed ? 1 : 0) << '\n';
      if (inst.family == Family::ShortestPath) out << "source " << gs.source << "\ndest " << gs.dest << '\n';
      if (inst.family == Family::Influence) out << "k " << gs.k << '\n';
      for (std::size_t e = 0; e < gs.graph.edges.size(); ++e)
        out << "edge " << gs.graph.edges[e].u << ' ' << gs.graph.edges[e].v << ' ' << inst.means[e] << '\n';
      break;
    }
    case Family::Coverage: {
      const auto& c = inst.coverage();
      out << "left " << c.left << "\nright " << c.right << "\nk " << c.k << '\n';
      for (std::size_t e = 0; e < c.edges.size(); ++e)
        out << "edge " << c.edges[e].first << ' ' << c.edges[e].second << ' ' << inst.means[e] << '\n';
      break;
    }
    case Family::Cascade:
      out << "k " << inst.cascade().k << '\n';
      write_means();
      break;
    case Family::Episodic: {
      const auto& ep = inst.episodic();
      out << "step_indexed " << (ep.step_indexed ? 1 : 0) << '\n';
      out << "stationary_policies " << (ep.stationary_policies ? 1 : 0) << '\n';
      out << format_mdp(ep.mdp);
      break;
    }
  }
  return out.str();
}

TargetSet parse_targets(const Instance& instance, const std::string& text) {
  TargetSet t;
  for (const Line& l : tokenize(text)) {
    if (l.key == "arm") {
      arity(l, 1);
      if (!instance.arms) throw ValidationError("`arm` needs an enumerated action space", l.number);
      const SuperArm* found = nullptr;
      for (const SuperArm& a : *instance.arms)
        if (a.label == l.args[0]) found = &a;
      if (!found) throw ValidationError("no super arm labelled `" + l.args[0] + "`", l.number);
      t.arms.push_back(*found);
    } else if (l.key == "members") {
      std::vector<int> members;
      for (const auto& a : l.args) members.push_back(to_int(a, l.number));
      SuperArm arm = at_line(l.number, [&] { return make_arm(instance, members); });
      at_line(l.number, [&] {
        check_arm(instance, arm);
        return 0;
      });
      t.arms.push_back(std::move(arm));
    } else if (l.key == "permutation_closed") {
      arity(l, 1);
      t.permutation_closed = to_int(l.args[0], l.number) != 0;
    } else {
      throw ParseError("unknown keyword `" + l.key + "`", l.number);
    }
  }
  if (t.arms.empty()) throw ParseError("target file lists no super arms");
  return t;
}

TargetSet load_targets(const Instance& instance, const std::filesystem::path& path) {
  return parse_targets(instance, read_file(path));
}

std::string format_targets(const TargetSet& targets) {
  std::ostringstream out;
  if (targets.permutation_closed) out << "permutation_closed 1\n";
  for (const SuperArm& a : targets.arms) {
    if (a.id >= 0 && !a.label.empty()) {
      out << "arm " << a.label << '\n';
    } else {
      out << "members";
      for (int x : a.members) out << ' ' << x;
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace cmab
