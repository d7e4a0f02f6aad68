#include "psm/analysis.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace psm {

namespace {

const GraphNode& node_or_throw(const PsmGraph& g, const std::string& id) {
  const GraphNode* n = g.find_by_id(id);
  if (!n) throw Error(ErrorCode::unknown_node, "no node with id '" + id + "'");
  return *n;
}

// Adjacency as (neighbour, edge index), ordered for deterministic traversal.
std::map<std::string, std::vector<std::pair<std::string, int>>> adjacency(
    const PsmGraph& g) {
  std::map<std::string, std::vector<std::pair<std::string, int>>> adj;
  const auto& edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    adj[edges[i].from].emplace_back(edges[i].to, static_cast<int>(i));
  for (auto& [from, outs] : adj) {
    std::sort(outs.begin(), outs.end());
    // Parallel edges: keep the smallest edge index per neighbour so a node
    // sequence maps to one canonical path.
    outs.erase(std::unique(outs.begin(), outs.end(),
                           [](const auto& a, const auto& b) {
                             return a.first == b.first;
                           }),
               outs.end());
  }
  return adj;
}

}  // namespace

std::vector<std::string> seed_node_ids(const PsmGraph& g) {
  auto deg = g.in_degrees();
  std::vector<std::string> out;
  for (const GraphNode* n : g.sorted_nodes())
    if (n->kind == NodeKind::structural && deg[n->id] == 0)
      out.push_back(n->id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Path> enumerate_paths(const PsmGraph& g,
                                  const std::vector<std::string>& from,
                                  const std::string& to, int budget) {
  for (const auto& id : from) node_or_throw(g, id);
  node_or_throw(g, to);

  auto adj = adjacency(g);
  std::vector<Path> out;

  std::vector<std::string> starts = from;
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  Path current;
  std::set<std::string> on_path;
  std::function<void(const std::string&)> dfs = [&](const std::string& id) {
    if (id == to) {
      if (static_cast<int>(out.size()) >= budget)
        throw Error(ErrorCode::path_budget_exceeded,
                    "more than " + std::to_string(budget) + " paths");
      out.push_back(current);
      return;
    }
    auto it = adj.find(id);
    if (it == adj.end()) return;
    for (const auto& [next, edge] : it->second) {
      if (on_path.count(next)) continue;
      on_path.insert(next);
      current.nodes.push_back(next);
      current.edges.push_back(edge);
      dfs(next);
      current.nodes.pop_back();
      current.edges.pop_back();
      on_path.erase(next);
    }
  };

  for (const auto& start : starts) {
    current = Path{{start}, {}};
    on_path = {start};
    dfs(start);
  }

  std::sort(out.begin(), out.end(), [](const Path& a, const Path& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    return a.nodes < b.nodes;
  });
  return out;
}

std::vector<Path> capture_free_paths(const PsmGraph& g,
                                     const std::string& action, int budget) {
  const GraphNode& target = node_or_throw(g, action);
  if (target.kind != NodeKind::action)
    throw Error(ErrorCode::kind_mismatch,
                "node '" + target.term.literal() + "' is not an action node");
  std::vector<Path> out;
  for (const Path& p : enumerate_paths(g, seed_node_ids(g), action, budget)) {
    bool grey = true;
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i)
      if (node_or_throw(g, p.nodes[i]).kind != NodeKind::structural) {
        grey = false;
        break;
      }
    if (grey) out.push_back(p);
  }
  return out;
}

CapabilityReport required_capabilities(const PsmGraph& g,
                                       const std::string& action, int budget) {
  node_or_throw(g, action);
  CapabilityReport report;
  report.action = action;

  std::set<std::string> facts_on_paths;
  for (const Path& p : enumerate_paths(g, seed_node_ids(g), action, budget))
    for (const auto& id : p.nodes) {
      const GraphNode& n = node_or_throw(g, id);
      if (n.kind == NodeKind::capture) report.required_captures.insert(n.term);
      if (n.kind == NodeKind::fact) {
        report.required_facts.insert(n.term);
        facts_on_paths.insert(n.id);
      }
    }

  // Signal nodes are path sources, never interior: report the prior
  // knowledge feeding the facts that lie on the paths.
  for (const auto& e : g.edges())
    if (facts_on_paths.count(e.to)) {
      const GraphNode& from = node_or_throw(g, e.from);
      if (from.kind == NodeKind::signal) report.required_signals.insert(from.term);
    }

  return report;
}

std::vector<Path> target_behaviour(const PsmGraph& g,
                                   const std::set<std::string>& rule_ids,
                                   int budget) {
  if (rule_ids.empty()) return {};
  std::set<std::string> known;
  for (const auto& e : g.edges()) known.insert(e.rule_id);
  for (const auto& id : rule_ids)
    if (!known.count(id))
      throw Error(ErrorCode::unknown_rule,
                  "rule '" + id + "' was not applied in this graph");

  // Group the graph's edges by (from, to) once.
  std::map<std::pair<std::string, std::string>, std::vector<int>> by_pair;
  const auto& edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    by_pair[{edges[i].from, edges[i].to}].push_back(static_cast<int>(i));

  std::vector<Path> out;
  const auto seeds = seed_node_ids(g);
  for (const GraphNode* n : g.sorted_nodes()) {
    if (n->kind != NodeKind::action) continue;
    for (Path p : enumerate_paths(g, seeds, n->id, budget)) {
      if (p.nodes.size() < 2) continue;
      const auto& candidates =
          by_pair[{p.nodes[p.nodes.size() - 2], p.nodes.back()}];
      for (int idx : candidates)
        if (rule_ids.count(edges[idx].rule_id)) {
          p.edges.back() = idx;
          out.push_back(p);
          break;
        }
    }
  }
  std::sort(out.begin(), out.end(), [](const Path& a, const Path& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    return a.nodes < b.nodes;
  });
  return out;
}

}  // namespace psm
