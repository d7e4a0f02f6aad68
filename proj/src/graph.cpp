#include "psm/graph.hpp"

#include <algorithm>
#include <deque>
#include <random>

namespace psm {

std::string node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::structural: return "structural";
    case NodeKind::capture: return "capture";
    case NodeKind::fact: return "fact";
    case NodeKind::signal: return "signal";
    case NodeKind::action: return "action";
  }
  return "structural";
}

std::optional<NodeKind> node_kind_from_name(const std::string& name) {
  if (name == "structural") return NodeKind::structural;
  if (name == "capture") return NodeKind::capture;
  if (name == "fact") return NodeKind::fact;
  if (name == "signal") return NodeKind::signal;
  if (name == "action") return NodeKind::action;
  return std::nullopt;
}

namespace {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string node_id_for(const Term& t, NodeKind kind) {
  return fnv1a_hex(node_kind_name(kind) + "\n" + t.literal());
}

bool signal_shape(const Term& t) {
  const auto& a = t.atoms();
  if (a.size() < 3) return false;
  const auto* first = std::get_if<Order2Sym>(&a[0]);
  const auto* second = std::get_if<Order2Sym>(&a[1]);
  if (!first || *first != Order2Sym::capture_inverse) return false;
  if (!second || *second != Order2Sym::fact) return false;
  return std::all_of(a.begin() + 2, a.end(),
                     [](const Atom& x) { return is_effectus(x); });
}

}  // namespace

NodeKind classify(const Term& term, std::optional<RuleClass> producer) {
  if (signal_shape(term)) return NodeKind::signal;
  if (!term.empty()) {
    if (const auto* o = std::get_if<Order2Sym>(&term.atoms()[0])) {
      if (*o == Order2Sym::capture) return NodeKind::capture;
      if (*o == Order2Sym::fact) return NodeKind::fact;
    }
    if (is_action(term.atoms()[0])) return NodeKind::action;
  }
  if (producer && *producer == RuleClass::behavioural) return NodeKind::action;
  return NodeKind::structural;
}

bool PsmGraph::has_node(const std::string& id) const {
  return by_id_.count(id) > 0;
}

const GraphNode* PsmGraph::find_by_id(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

const GraphNode* PsmGraph::find_by_term(const Term& t) const {
  auto it = id_by_term_.find(t.literal());
  return it == id_by_term_.end() ? nullptr : find_by_id(it->second);
}

std::pair<std::string, bool> PsmGraph::add_node(const Term& t, NodeKind kind) {
  auto it = id_by_term_.find(t.literal());
  if (it != id_by_term_.end()) return {it->second, false};
  std::string id = node_id_for(t, kind);
  by_id_.emplace(id, GraphNode{id, t, kind});
  id_by_term_.emplace(t.literal(), id);
  return {id, true};
}

void PsmGraph::add_edge(const std::string& from, const std::string& to,
                        const std::string& rule_id, int application) {
  edges_.push_back(GraphEdge{from, to, rule_id, application});
}

bool PsmGraph::application_recorded(const std::string& key) const {
  return applications_.count(key) > 0;
}

void PsmGraph::record_application(const std::string& key) {
  applications_.insert(key);
}

std::vector<const GraphNode*> PsmGraph::sorted_nodes() const {
  std::vector<const GraphNode*> out;
  out.reserve(by_id_.size());
  for (const auto& [lit, id] : id_by_term_) out.push_back(find_by_id(id));
  return out;
}

std::map<std::string, int> PsmGraph::in_degrees() const {
  std::map<std::string, int> deg;
  for (const auto& [id, node] : by_id_) deg[id] = 0;
  for (const auto& e : edges_) ++deg[e.to];
  return deg;
}

PsmGraph seed(const Scenario& sc) {
  PsmGraph g;
  g.meta().scenario = sc.name;

  for (const Term& s : sc.seeds) {
    if (!s.is_order1() || s.empty())
      throw Error(ErrorCode::invalid_seed,
                  "seed '" + s.literal() + "' is not a plain effectus sequence");
    for (const Atom& a : s.atoms()) {
      const auto& e = std::get<Effectus>(a);
      if (!sc.vocabulary.effectus_valid(e))
        throw Error(ErrorCode::invalid_seed,
                    "seed '" + s.literal() + "' uses invalid effectus '" +
                        atom_literal(a) + "'");
    }
    Term norm = normalize(s, sc.vocabulary);
    if (norm.empty())
      throw Error(ErrorCode::invalid_seed,
                  "seed '" + s.literal() + "' normalizes to the neutrum");
    g.add_node(norm, classify(norm, std::nullopt));
  }

  for (const Term& s : sc.signals) {
    Term expanded = concat(apply_successus(Order2Sym::capture_inverse, s),
                           apply_successus(Order2Sym::fact, s));
    Term norm = normalize(expanded, sc.vocabulary);
    if (classify(norm, std::nullopt) != NodeKind::signal)
      throw Error(ErrorCode::invalid_signal,
                  "signal declaration '" + s.literal() +
                      "' does not form a capture-to-fact signal");
    g.add_node(norm, NodeKind::signal);
  }
  return g;
}

namespace {

std::string application_key(const RuleApplication& app) {
  std::string k = app.rule_id + "\x1e";
  for (const auto& m : app.matched) k += m.literal() + "\x1f";
  k += "\x1e" + app.binding.canonical();
  return k;
}

}  // namespace

StepResult step(PsmGraph& g, const Scenario& sc, const BuildOptions& opts) {
  std::vector<Term> node_terms;
  for (const GraphNode* n : g.sorted_nodes()) node_terms.push_back(n->term);

  std::vector<std::pair<const Rule*, RuleApplication>> firings;
  for (const Rule& r : sc.rules)
    for (auto& app : applicable(r, node_terms, sc.vocabulary, opts.max_term_len))
      firings.emplace_back(&r, std::move(app));

  if (opts.shuffle_seed) {
    std::mt19937_64 rng(*opts.shuffle_seed + g.meta().iterations);
    std::shuffle(firings.begin(), firings.end(), rng);
  }

  StepResult result;
  for (auto& [rule, app] : firings) {
    const std::string key = application_key(app);
    if (g.application_recorded(key)) continue;
    g.record_application(key);
    const int app_id = g.next_application_id();
    for (const Term& produced : app.produced) {
      auto [to_id, inserted] = g.add_node(produced, classify(produced, rule->klass));
      if (inserted) ++result.new_nodes;
      for (const Term& m : app.matched) {
        const GraphNode* from = g.find_by_term(m);
        g.add_edge(from->id, to_id, rule->id, app_id);
        ++result.new_edges;
      }
    }
  }
  return result;
}

PsmGraph build(const Scenario& sc, const BuildOptions& opts) {
  PsmGraph g = seed(sc);
  g.meta().options = opts;
  int rounds = 0;
  for (;;) {
    if (rounds >= opts.max_iterations)
      throw Error(ErrorCode::iteration_budget_exceeded,
                  "no fixpoint after " + std::to_string(opts.max_iterations) +
                      " rounds");
    StepResult r = step(g, sc, opts);
    ++rounds;
    g.meta().iterations = rounds;
    if (r.new_nodes == 0 && r.new_edges == 0) break;
  }
  if (opts.prune) {
    PsmGraph pruned = prune(g);
    pruned.meta() = g.meta();
    return pruned;
  }
  return g;
}

PsmGraph prune(const PsmGraph& g) {
  // Reverse reachability from the action nodes.
  std::set<std::string> keep;
  std::deque<std::string> queue;
  for (const GraphNode* n : g.sorted_nodes())
    if (n->kind == NodeKind::action) {
      keep.insert(n->id);
      queue.push_back(n->id);
    }
  std::multimap<std::string, std::string> reverse;
  for (const auto& e : g.edges()) reverse.emplace(e.to, e.from);
  while (!queue.empty()) {
    std::string id = queue.front();
    queue.pop_front();
    auto [lo, hi] = reverse.equal_range(id);
    for (auto it = lo; it != hi; ++it)
      if (keep.insert(it->second).second) queue.push_back(it->second);
  }

  PsmGraph out;
  out.meta() = g.meta();
  for (const GraphNode* n : g.sorted_nodes())
    if (keep.count(n->id)) out.add_node(n->term, n->kind);
  int max_app = -1;
  for (const auto& e : g.edges())
    if (keep.count(e.from) && keep.count(e.to)) {
      out.add_edge(e.from, e.to, e.rule_id, e.application);
      max_app = std::max(max_app, e.application);
    }
  out.set_next_application_id(max_app + 1);
  return out;
}

Scenario paper_scenario() {
  Scenario sc;
  sc.name = "intersection";
  sc.vocabulary = paper_vocabulary();
  sc.rules = paper_rules();
  sc.signals = {parse_term("ü:Q r1:P", false), parse_term("r:Q r1:P", false)};
  sc.seeds = {parse_term("ü:Q r1:P", false), parse_term("+:B b2:P", false),
              parse_term("r:Q g2:P", false)};
  return sc;
}

}  // namespace psm
