#include "psm/rule.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "rewrite_internal.hpp"

namespace psm {

namespace {

// Variables ride through the rewrite engine as opaque effectus atoms with a
// reserved marker, so factoring and repeat collapse treat them like runs.
constexpr char kSeqVarMark = '\x01';
constexpr char kSuccVarMark = '\x02';

Atom encode(const PatternAtom& pa) {
  if (const auto* o = std::get_if<Order2Sym>(&pa)) return *o;
  if (const auto* e = std::get_if<Effectus>(&pa)) return *e;
  if (const auto* act = std::get_if<ActionSym>(&pa)) return *act;
  if (const auto* v = std::get_if<CausaSeqVar>(&pa))
    return Effectus{std::string(1, kSeqVarMark) + v->name,
                    std::string(1, kSeqVarMark)};
  const auto& sv = std::get<SuccVarEffectus>(pa);
  return Effectus{std::string(1, kSuccVarMark) + sv.var, sv.causa};
}

PatternAtom decode(const Atom& a) {
  if (const auto* e = std::get_if<Effectus>(&a)) {
    if (!e->successus.empty() && e->successus[0] == kSeqVarMark)
      return CausaSeqVar{e->successus.substr(1)};
    if (!e->successus.empty() && e->successus[0] == kSuccVarMark)
      return SuccVarEffectus{e->successus.substr(1), e->causa};
    return *e;
  }
  if (const auto* o = std::get_if<Order2Sym>(&a)) return *o;
  return std::get<ActionSym>(a);
}

std::string pattern_atom_literal(const PatternAtom& pa) {
  if (const auto* v = std::get_if<CausaSeqVar>(&pa)) return v->name;
  if (const auto* sv = std::get_if<SuccVarEffectus>(&pa))
    return sv->var + ":" + sv->causa;
  if (const auto* act = std::get_if<ActionSym>(&pa))
    return "\"" + act->name + "\"";
  if (const auto* e = std::get_if<Effectus>(&pa))
    return e->successus + ":" + e->causa;
  return atom_literal(std::get<Order2Sym>(pa));
}

void collect_vars(const Pattern& p, std::set<std::string>& seq,
                  std::set<std::string>& succ) {
  for (const auto& pa : p.atoms()) {
    if (const auto* v = std::get_if<CausaSeqVar>(&pa)) seq.insert(v->name);
    if (const auto* sv = std::get_if<SuccVarEffectus>(&pa)) succ.insert(sv->var);
  }
}

}  // namespace

bool Pattern::has_variables() const {
  return std::any_of(atoms_.begin(), atoms_.end(), [](const PatternAtom& pa) {
    return std::holds_alternative<CausaSeqVar>(pa) ||
           std::holds_alternative<SuccVarEffectus>(pa);
  });
}

std::string Pattern::literal() const {
  std::string out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) out += ' ';
    out += pattern_atom_literal(atoms_[i]);
  }
  return out;
}

std::string rule_class_name(RuleClass k) {
  switch (k) {
    case RuleClass::structural: return "structural";
    case RuleClass::behavioural: return "behavioural";
    case RuleClass::equivalence: return "equivalence";
  }
  return "structural";
}

std::string Binding::canonical() const {
  std::string out;
  for (const auto& [name, value] : causa_seq) {
    if (!out.empty()) out += ',';
    out += name + "=" + value.literal();
  }
  for (const auto& [name, value] : succ) {
    if (!out.empty()) out += ',';
    out += name + "=" + value;
  }
  return out;
}

bool Binding::operator<(const Binding& o) const {
  if (causa_seq != o.causa_seq) return causa_seq < o.causa_seq;
  return succ < o.succ;
}

Pattern canonicalize_pattern(const Pattern& p, const Vocabulary& vocab) {
  std::vector<Atom> encoded;
  encoded.reserve(p.size());
  for (const auto& pa : p.atoms()) encoded.push_back(encode(pa));

  // Invalid literal effectus are kept: such a condition simply never
  // matches a normalized term (the parser warns about it).
  detail::RewriteHooks hooks{
      [](const Effectus&) { return true; },
      detail::vocab_hooks(vocab).constancy_rewrite,
  };
  auto canonical = detail::normalize_atoms(std::move(encoded), hooks);

  std::vector<PatternAtom> out;
  out.reserve(canonical.size());
  for (const auto& a : canonical) out.push_back(decode(a));
  return Pattern(std::move(out));
}

namespace {

void match_rec(const std::vector<PatternAtom>& p, std::size_t pi,
               const std::vector<Atom>& t, std::size_t ti, Binding& b,
               std::vector<Binding>& out) {
  if (pi == p.size()) {
    if (ti == t.size()) out.push_back(b);
    return;
  }
  const PatternAtom& pa = p[pi];

  if (const auto* v = std::get_if<CausaSeqVar>(&pa)) {
    auto bound = b.causa_seq.find(v->name);
    if (bound != b.causa_seq.end()) {
      const auto& val = bound->second.atoms();
      if (ti + val.size() <= t.size() &&
          std::equal(val.begin(), val.end(), t.begin() + ti))
        match_rec(p, pi + 1, t, ti + val.size(), b, out);
      return;
    }
    for (std::size_t len = 1; ti + len <= t.size(); ++len) {
      if (!is_effectus(t[ti + len - 1])) break;
      b.causa_seq[v->name] = Term(
          std::vector<Atom>(t.begin() + ti, t.begin() + ti + len));
      match_rec(p, pi + 1, t, ti + len, b, out);
      b.causa_seq.erase(v->name);
    }
    return;
  }

  if (ti >= t.size()) return;

  if (const auto* sv = std::get_if<SuccVarEffectus>(&pa)) {
    const auto* e = std::get_if<Effectus>(&t[ti]);
    if (!e || e->causa != sv->causa) return;
    auto bound = b.succ.find(sv->var);
    if (bound != b.succ.end()) {
      if (bound->second == e->successus)
        match_rec(p, pi + 1, t, ti + 1, b, out);
      return;
    }
    b.succ[sv->var] = e->successus;
    match_rec(p, pi + 1, t, ti + 1, b, out);
    b.succ.erase(sv->var);
    return;
  }

  if (t[ti] == encode(pa)) match_rec(p, pi + 1, t, ti + 1, b, out);
}

}  // namespace

std::vector<Binding> match_pattern(const Pattern& p, const Term& t,
                                   const Binding& seed) {
  std::vector<Binding> out;
  Binding b = seed;
  match_rec(p.atoms(), 0, t.atoms(), 0, b, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Term instantiate(const Pattern& p, const Binding& b) {
  std::vector<Atom> atoms;
  for (const auto& pa : p.atoms()) {
    if (const auto* v = std::get_if<CausaSeqVar>(&pa)) {
      auto it = b.causa_seq.find(v->name);
      if (it == b.causa_seq.end())
        throw Error(ErrorCode::rule_authoring,
                    "unbound sequence variable '" + v->name + "'");
      const auto& run = it->second.atoms();
      atoms.insert(atoms.end(), run.begin(), run.end());
      continue;
    }
    if (const auto* sv = std::get_if<SuccVarEffectus>(&pa)) {
      auto it = b.succ.find(sv->var);
      if (it == b.succ.end())
        throw Error(ErrorCode::rule_authoring,
                    "unbound successus variable '" + sv->var + "'");
      atoms.push_back(Effectus{it->second, sv->causa});
      continue;
    }
    atoms.push_back(encode(pa));
  }
  return Term(std::move(atoms));
}

Rule make_rule(std::string id, RuleClass klass, std::vector<Pattern> conditions,
               std::vector<Pattern> consequents, const Vocabulary& vocab,
               bool distinct_vars, bool builtin) {
  if (conditions.empty())
    throw Error(ErrorCode::rule_authoring, "rule '" + id + "' has no conditions");
  if (consequents.empty())
    throw Error(ErrorCode::rule_authoring, "rule '" + id + "' has no consequents");

  Rule r;
  r.id = std::move(id);
  r.klass = klass;
  r.distinct_vars = distinct_vars;
  r.builtin = builtin;
  for (auto& c : conditions) {
    Pattern canonical = canonicalize_pattern(c, vocab);
    if (canonical.empty())
      throw Error(ErrorCode::rule_authoring,
                  "rule '" + r.id + "': condition '" + c.literal() +
                      "' normalizes to the neutrum");
    r.conditions.push_back(std::move(canonical));
  }
  std::set<std::string> seq_vars, succ_vars;
  for (const auto& c : r.conditions) collect_vars(c, seq_vars, succ_vars);
  for (auto& q : consequents) {
    Pattern canonical = canonicalize_pattern(q, vocab);
    if (canonical.empty())
      throw Error(ErrorCode::rule_authoring,
                  "rule '" + r.id + "': consequent '" + q.literal() +
                      "' normalizes to the neutrum");
    std::set<std::string> cseq, csucc;
    collect_vars(canonical, cseq, csucc);
    for (const auto& v : cseq)
      if (!seq_vars.count(v))
        throw Error(ErrorCode::rule_authoring,
                    "rule '" + r.id + "': consequent variable '" + v +
                        "' is not bound by any condition");
    for (const auto& v : csucc)
      if (!succ_vars.count(v))
        throw Error(ErrorCode::rule_authoring,
                    "rule '" + r.id + "': consequent variable '" + v +
                        "' is not bound by any condition");
    r.consequents.push_back(std::move(canonical));
  }
  return r;
}

std::vector<RuleApplication> applicable(const Rule& r,
                                        const std::vector<Term>& nodes,
                                        const Vocabulary& vocab,
                                        int max_term_len) {
  std::vector<Term> sorted_nodes = nodes;
  std::sort(sorted_nodes.begin(), sorted_nodes.end());
  sorted_nodes.erase(std::unique(sorted_nodes.begin(), sorted_nodes.end()),
                     sorted_nodes.end());

  std::vector<RuleApplication> apps;
  std::vector<Term> chosen;

  std::function<void(std::size_t, const Binding&)> assign =
      [&](std::size_t ci, const Binding& b) {
        if (ci == r.conditions.size()) {
          if (r.distinct_vars) {
            for (std::size_t i = 0; i < chosen.size(); ++i)
              for (std::size_t j = i + 1; j < chosen.size(); ++j)
                if (chosen[i] == chosen[j]) return;
            for (auto i = b.causa_seq.begin(); i != b.causa_seq.end(); ++i)
              for (auto j = std::next(i); j != b.causa_seq.end(); ++j)
                if (i->second == j->second) return;
          }
          std::vector<Term> produced;
          for (const auto& q : r.consequents) {
            Term norm = normalize(instantiate(q, b), vocab);
            if (static_cast<int>(norm.size()) > max_term_len)
              throw Error(ErrorCode::term_length_exceeded,
                          "rule '" + r.id + "' produced a term of " +
                              std::to_string(norm.size()) + " atoms (limit " +
                              std::to_string(max_term_len) + ")");
            if (!norm.empty()) produced.push_back(std::move(norm));
          }
          apps.push_back({r.id, b, chosen, std::move(produced)});
          return;
        }
        for (const Term& node : sorted_nodes)
          for (const Binding& nb : match_pattern(r.conditions[ci], node, b)) {
            chosen.push_back(node);
            assign(ci + 1, nb);
            chosen.pop_back();
          }
      };
  assign(0, Binding{});

  auto key = [](const RuleApplication& a) {
    std::string k;
    for (const auto& m : a.matched) k += m.literal() + "\x1f";
    return std::make_pair(k, a.binding);
  };
  std::sort(apps.begin(), apps.end(),
            [&](const RuleApplication& x, const RuleApplication& y) {
              return key(x) < key(y);
            });

  // Two assignments that consume the same node set and produce the same
  // terms are one application (e.g. swapped symmetric variables).
  std::set<std::string> seen;
  std::vector<RuleApplication> out;
  for (auto& a : apps) {
    std::vector<std::string> m;
    for (const auto& t : a.matched) m.push_back(t.literal());
    std::sort(m.begin(), m.end());
    std::vector<std::string> p;
    for (const auto& t : a.produced) p.push_back(t.literal());
    std::sort(p.begin(), p.end());
    std::string k;
    for (const auto& s : m) k += s + "\x1f";
    k += "\x1e";
    for (const auto& s : p) k += s + "\x1f";
    if (seen.insert(k).second) out.push_back(std::move(a));
  }
  return out;
}

namespace {

PatternAtom pe(const char* succ, const char* causa) {
  return Effectus{succ, causa};
}
PatternAtom var(const char* name) { return CausaSeqVar{name}; }
PatternAtom svar(const char* v, const char* causa) {
  return SuccVarEffectus{v, causa};
}
PatternAtom o2(Order2Sym s) { return s; }
PatternAtom act(const char* name) { return ActionSym{name}; }

Pattern pat(std::vector<PatternAtom> atoms) { return Pattern(std::move(atoms)); }

}  // namespace

Rule signal_rule(const Vocabulary& vocab) {
  return make_rule(
      "signal", RuleClass::structural,
      {pat({o2(Order2Sym::capture), var("X")}),
       pat({o2(Order2Sym::capture_inverse), var("X"), o2(Order2Sym::fact),
            var("X")})},
      {pat({o2(Order2Sym::fact), var("X")})}, vocab,
      /*distinct_vars=*/false, /*builtin=*/true);
}

std::vector<Rule> paper_rules() {
  const Vocabulary v = paper_vocabulary();
  std::vector<Rule> rules;
  auto add = [&](const char* id, RuleClass k, std::vector<Pattern> when,
                 std::vector<Pattern> then, bool distinct = false) {
    rules.push_back(make_rule(id, k, std::move(when), std::move(then), v,
                              distinct));
  };

  // Visibility: zone r1 is seen from b1 and b2, zone g2 from b2 only.
  add("vis_b1_r1", RuleClass::structural,
      {pat({var("X"), pe("b1", "P")}), pat({var("Y"), pe("r1", "P")})},
      {pat({o2(Order2Sym::capture), var("Y"), pe("r1", "P")})});
  add("vis_b2_r1", RuleClass::structural,
      {pat({var("X"), pe("b2", "P")}), pat({var("Y"), pe("r1", "P")})},
      {pat({o2(Order2Sym::capture), var("Y"), pe("r1", "P")})});
  add("vis_b2_g2", RuleClass::structural,
      {pat({var("X"), pe("b2", "P")}), pat({var("Y"), pe("g2", "P")})},
      {pat({o2(Order2Sym::capture), var("Y"), pe("g2", "P")})});

  // Movement along the ego approach and the cycle path.
  add("move_b2_b1", RuleClass::structural, {pat({pe("+", "B"), pe("b2", "P")})},
      {pat({pe("+", "B"), pe("b1", "P")})});
  add("move_b1_r1", RuleClass::structural, {pat({pe("+", "B"), pe("b1", "P")})},
      {pat({pe("+", "B"), pe("r1", "P")})});
  add("move_g2_g1", RuleClass::structural,
      {pat({var("X"), pe("+", "B"), pe("g2", "P")})},
      {pat({var("X"), pe("+", "B"), pe("g1", "P")})});
  add("move_g1_r1", RuleClass::structural, {pat({pe("+", "B"), pe("g1", "P")})},
      {pat({pe("+", "B"), pe("r1", "P")})});

  // The cyclist seed carries a quality marker instead of a movement atom;
  // these variants advance any quality-tagged agent along g2 -> g1 -> r1.
  add("ride_g2_g1", RuleClass::structural,
      {pat({svar("x", "Q"), pe("g2", "P")})},
      {pat({svar("x", "Q"), pe("g1", "P")})});
  add("ride_g1_r1", RuleClass::structural,
      {pat({svar("x", "Q"), pe("g1", "P")})},
      {pat({svar("x", "Q"), pe("r1", "P")})});

  // Stop when the crossing lies ahead with the cyclist at it. The first
  // form needs the (occluded, hence never formable) fact of the cyclist in
  // g1; the second works from the two formable facts.
  add("stop_crossing_ahead", RuleClass::behavioural,
      {pat({o2(Order2Sym::fact), pe("+", "B"), pe("ü", "Q"), pe("+", "R")}),
       pat({o2(Order2Sym::fact), pe("r", "Q"), pe("g1", "P")})},
      {pat({act("0B")})});
  add("stop_cyclist_on_crossing", RuleClass::behavioural,
      {pat({o2(Order2Sym::fact), pe("ü", "Q"), pe("r1", "P")}),
       pat({o2(Order2Sym::fact), pe("r", "Q"), pe("r1", "P")})},
      {pat({act("0B")})});

  // Things in the same zone collide; a thing does not collide with itself.
  add("collision", RuleClass::behavioural,
      {pat({var("X"), svar("x", "P")}), pat({var("Y"), svar("x", "P")})},
      {pat({act("00")})}, /*distinct=*/true);

  // "Something given in r1 while ego is in b1" is the same circumstance as
  // "an object of that quality ahead".
  add("forward", RuleClass::equivalence,
      {pat({o2(Order2Sym::fact), pe("b1", "P"), var("X"), svar("x", "Q"),
            pe("r1", "P")})},
      {pat({o2(Order2Sym::fact), svar("x", "Q"), pe("+", "R")})});

  rules.push_back(signal_rule(v));
  return rules;
}

}  // namespace psm
