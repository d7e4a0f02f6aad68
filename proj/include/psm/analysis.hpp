#pragma once

#include <set>
#include <string>
#include <vector>

#include "psm/graph.hpp"

namespace psm {

/// A simple path: node ids plus the edge index used for each hop.
struct Path {
  std::vector<std::string> nodes;
  std::vector<int> edges;
};

struct CapabilityReport {
  std::string action;
  std::set<Term> required_captures;
  std::set<Term> required_facts;
  std::set<Term> required_signals;

  bool empty() const {
    return required_captures.empty() && required_facts.empty() &&
           required_signals.empty();
  }
};

inline constexpr int kDefaultPathBudget = 100000;

/// Structural nodes without incoming edges; the scenario start conditions.
std::vector<std::string> seed_node_ids(const PsmGraph& g);

/// All simple paths from any `from` node to `to`, shortest first, then
/// lexicographic by node ids. Throws unknown_node / path_budget_exceeded.
std::vector<Path> enumerate_paths(const PsmGraph& g,
                                  const std::vector<std::string>& from,
                                  const std::string& to,
                                  int budget = kDefaultPathBudget);

/// Seed-to-action paths whose interior nodes are all structural. Throws
/// kind_mismatch when `action` is not an action node.
std::vector<Path> capture_free_paths(const PsmGraph& g,
                                     const std::string& action,
                                     int budget = kDefaultPathBudget);

/// Unions the capture and fact node terms lying on any seed-to-action path,
/// plus the signal-node prior knowledge feeding those facts. Empty report
/// when the action is unreachable.
CapabilityReport required_capabilities(const PsmGraph& g,
                                       const std::string& action,
                                       int budget = kDefaultPathBudget);

/// Seed-to-action paths whose final edge was produced by one of the given
/// behavioural rules. Throws unknown_rule for ids absent from the graph.
std::vector<Path> target_behaviour(const PsmGraph& g,
                                   const std::set<std::string>& rule_ids,
                                   int budget = kDefaultPathBudget);

}  // namespace psm
