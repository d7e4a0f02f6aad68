#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "psm/term.hpp"
#include "psm/vocabulary.hpp"

namespace psm {

/// Uppercase pattern variable; matches a non-empty effectus subsequence.
struct CausaSeqVar {
  std::string name;

  auto operator<=>(const CausaSeqVar&) const = default;
};

/// Effectus position with a variable successus and a fixed causa, e.g. x:P.
struct SuccVarEffectus {
  std::string var;
  std::string causa;

  auto operator<=>(const SuccVarEffectus&) const = default;
};

using PatternAtom =
    std::variant<Order2Sym, Effectus, ActionSym, CausaSeqVar, SuccVarEffectus>;

class Pattern {
public:
  Pattern() = default;
  explicit Pattern(std::vector<PatternAtom> atoms) : atoms_(std::move(atoms)) {}

  const std::vector<PatternAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  bool has_variables() const;

  std::string literal() const;

  bool operator==(const Pattern& o) const { return atoms_ == o.atoms_; }
  bool operator!=(const Pattern& o) const { return !(*this == o); }

private:
  std::vector<PatternAtom> atoms_;
};

enum class RuleClass { structural, behavioural, equivalence };

std::string rule_class_name(RuleClass k);

struct Rule {
  std::string id;
  RuleClass klass = RuleClass::structural;
  bool distinct_vars = false;
  bool builtin = false;  // injected automatically, not written by the DSL
  std::vector<Pattern> conditions;   // AND-linked
  std::vector<Pattern> consequents;  // templates over the condition variables

  bool operator==(const Rule& o) const {
    return id == o.id && klass == o.klass && distinct_vars == o.distinct_vars &&
           builtin == o.builtin && conditions == o.conditions &&
           consequents == o.consequents;
  }
};

struct Binding {
  std::map<std::string, Term> causa_seq;      // uppercase name -> effectus run
  std::map<std::string, std::string> succ;    // lowercase name -> successus

  std::string canonical() const;

  bool operator==(const Binding& o) const {
    return causa_seq == o.causa_seq && succ == o.succ;
  }
  bool operator<(const Binding& o) const;
};

struct RuleApplication {
  std::string rule_id;
  Binding binding;
  std::vector<Term> matched;   // one node term per condition
  std::vector<Term> produced;  // normalized consequent instantiations
};

/// Rewrites a pattern to canonical form, treating variables as opaque
/// effectus runs. Done once at rule construction so patterns line up with
/// normalized node terms.
Pattern canonicalize_pattern(const Pattern& p, const Vocabulary& vocab);

/// All bindings extending `seed` under which `p` instantiates exactly to
/// `t`. Sequence variables enumerate every split, so several bindings can
/// result; output is canonically ordered.
std::vector<Binding> match_pattern(const Pattern& p, const Term& t,
                                   const Binding& seed = {});

/// Substitutes bound variables into `p`. Throws ErrorCode::rule_authoring on
/// an unbound variable.
Term instantiate(const Pattern& p, const Binding& b);

/// Builds a rule, canonicalizing patterns and rejecting authoring errors
/// (empty sides, consequent variables unbound by any condition, consequents
/// that normalize to the neutrum). Throws ErrorCode::rule_authoring.
Rule make_rule(std::string id, RuleClass klass, std::vector<Pattern> conditions,
               std::vector<Pattern> consequents, const Vocabulary& vocab,
               bool distinct_vars = false, bool builtin = false);

/// Every way to assign one node term per condition with a consistent
/// binding. Symmetric duplicates (same node set, same produced terms) are
/// collapsed; the result is canonically ordered and deterministic.
std::vector<RuleApplication> applicable(const Rule& r,
                                        const std::vector<Term>& nodes,
                                        const Vocabulary& vocab,
                                        int max_term_len = kDefaultMaxTermLen);

/// The built-in structural rule turning a capture into a fact when the
/// matching prior knowledge is present; loaded into every rule set.
Rule signal_rule(const Vocabulary& vocab);

/// The worked-example rule set: visibility, movement (including the cyclist
/// quality-movement variants), the signal rule, the two stop rules, the
/// collision rule and the forward equivalence rule.
std::vector<Rule> paper_rules();

}  // namespace psm
