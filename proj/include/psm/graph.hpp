#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psm/rule.hpp"
#include "psm/term.hpp"
#include "psm/vocabulary.hpp"

namespace psm {

/// Scenario inputs: structural start terms per agent, prior-knowledge signal
/// declarations (order-1 sequences; each expands to `?- s ! s`), the
/// vocabulary and the rule set.
struct Scenario {
  std::string name;
  Vocabulary vocabulary;
  std::vector<Rule> rules;
  std::vector<Term> signals;  // order-1 sequences
  std::vector<Term> seeds;    // order-1 sequences

  bool operator==(const Scenario& o) const {
    return name == o.name && vocabulary == o.vocabulary && rules == o.rules &&
           signals == o.signals && seeds == o.seeds;
  }
};

enum class NodeKind { structural, capture, fact, signal, action };

std::string node_kind_name(NodeKind k);
std::optional<NodeKind> node_kind_from_name(const std::string& name);

struct BuildOptions {
  bool prune = false;
  int max_iterations = 10000;
  int max_term_len = kDefaultMaxTermLen;
  // Diagnostic knob: permutes rule-application insertion order per round to
  // demonstrate schedule independence. Not serialized.
  std::optional<std::uint64_t> shuffle_seed{};

  bool operator==(const BuildOptions& o) const {
    return prune == o.prune && max_iterations == o.max_iterations &&
           max_term_len == o.max_term_len;
  }
};

struct GraphNode {
  std::string id;  // content hash of kind + canonical term
  Term term;
  NodeKind kind = NodeKind::structural;
};

struct GraphEdge {
  std::string from;
  std::string to;
  std::string rule_id;
  int application = 0;  // edges sharing an id belong to one AND-linked firing
};

struct GraphMeta {
  std::string scenario;
  BuildOptions options;
  int iterations = 0;
};

/// Directed multigraph of normalized terms. Node identity is the canonical
/// term; re-derivations only add edges.
class PsmGraph {
public:
  bool has_node(const std::string& id) const;
  const GraphNode* find_by_id(const std::string& id) const;
  const GraphNode* find_by_term(const Term& t) const;

  /// Adds a node for `t` (which must be normalized) unless one exists.
  /// Returns (id, inserted).
  std::pair<std::string, bool> add_node(const Term& t, NodeKind kind);

  void add_edge(const std::string& from, const std::string& to,
                const std::string& rule_id, int application);

  bool application_recorded(const std::string& key) const;
  void record_application(const std::string& key);
  int next_application_id() { return next_application_id_++; }
  void set_next_application_id(int id) { next_application_id_ = id; }

  std::size_t node_count() const { return by_id_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Nodes sorted by term literal; the canonical export order.
  std::vector<const GraphNode*> sorted_nodes() const;
  const std::vector<GraphEdge>& edges() const { return edges_; }

  std::map<std::string, int> in_degrees() const;

  const GraphMeta& meta() const { return meta_; }
  GraphMeta& meta() { return meta_; }

private:
  std::map<std::string, GraphNode> by_id_;
  std::map<std::string, std::string> id_by_term_;  // term literal -> id
  std::vector<GraphEdge> edges_;
  std::set<std::string> applications_;
  int next_application_id_ = 0;
  GraphMeta meta_;
};

/// Node classification: signal shape first, then the leading order-2 symbol,
/// then the producing rule class. `producer` is empty for seed-time nodes.
NodeKind classify(const Term& term, std::optional<RuleClass> producer);

/// Step 1: place seeds (structural) and expanded signal declarations
/// (signal) as nodes. Throws invalid_seed / invalid_signal.
PsmGraph seed(const Scenario& sc);

struct StepResult {
  int new_nodes = 0;
  int new_edges = 0;
};

/// Step 2: one saturation round. Applies every rule application found over
/// the current node terms; new terms become nodes, every firing adds one
/// edge per matched node. Throws term_length_exceeded on runaway rule sets.
StepResult step(PsmGraph& g, const Scenario& sc, const BuildOptions& opts = {});

/// Steps 1-4: seed, then saturate to the least fixpoint, then prune when
/// requested. Throws iteration_budget_exceeded past opts.max_iterations.
PsmGraph build(const Scenario& sc, const BuildOptions& opts = {});

/// Keeps exactly the nodes from which an action node is reachable, all
/// action nodes, and the edges among them.
PsmGraph prune(const PsmGraph& g);

/// The worked intersection example as a built-in scenario (same content as
/// scenarios/intersection.psm).
Scenario paper_scenario();

}  // namespace psm
