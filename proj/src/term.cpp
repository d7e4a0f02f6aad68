#include "psm/term.hpp"

#include <algorithm>
#include <optional>

namespace psm {

Order2Sym inverse_of(Order2Sym s) {
  switch (s) {
    case Order2Sym::fact: return Order2Sym::fact_inverse;
    case Order2Sym::capture: return Order2Sym::capture_inverse;
    case Order2Sym::fact_inverse: return Order2Sym::fact;
    case Order2Sym::capture_inverse: return Order2Sym::capture;
  }
  return Order2Sym::fact;
}

bool is_inverse_pair(Order2Sym a, Order2Sym b) { return inverse_of(a) == b; }

bool Term::is_order1() const {
  return std::all_of(atoms_.begin(), atoms_.end(),
                     [](const Atom& a) { return is_effectus(a); });
}

std::string atom_literal(const Atom& a) {
  if (const auto* o = std::get_if<Order2Sym>(&a)) {
    switch (*o) {
      case Order2Sym::fact: return "!";
      case Order2Sym::capture: return "?";
      case Order2Sym::fact_inverse: return "!-";
      case Order2Sym::capture_inverse: return "?-";
    }
  }
  if (const auto* e = std::get_if<Effectus>(&a))
    return e->successus + ":" + e->causa;
  return std::get<ActionSym>(a).name;
}

std::string Term::literal() const {
  if (atoms_.empty()) return "I";
  std::string out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) out += ' ';
    out += atom_literal(atoms_[i]);
  }
  return out;
}

Term compose(const Term& seq, const Atom& atom) {
  if (!seq.empty() && seq.atoms().back() == atom) return seq;
  auto atoms = seq.atoms();
  atoms.push_back(atom);
  return Term(std::move(atoms));
}

Term concat(const Term& s1, const Term& s2) {
  Term out = s1;
  for (const Atom& a : s2.atoms()) out = compose(out, a);
  return out;
}

Term apply_successus(Order2Sym omega, const Term& s) {
  if (!s.is_order1())
    throw Error(ErrorCode::invalid_term,
                "apply_successus expects a plain effectus sequence, got '" +
                    s.literal() + "'");
  std::vector<Atom> atoms;
  atoms.reserve(s.size() + 1);
  atoms.emplace_back(omega);
  atoms.insert(atoms.end(), s.atoms().begin(), s.atoms().end());
  return Term(std::move(atoms));
}

namespace {

std::optional<Order2Sym> order2_from_token(std::string_view tok) {
  if (tok == "!") return Order2Sym::fact;
  if (tok == "?") return Order2Sym::capture;
  if (tok == "!-") return Order2Sym::fact_inverse;
  if (tok == "?-") return Order2Sym::capture_inverse;
  return std::nullopt;
}

}  // namespace

Term parse_term(std::string_view text, bool allow_actions, int max_len) {
  std::vector<Atom> atoms;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(pos, end - pos);
    pos = end;

    if (tok == "I") continue;  // neutrum contributes nothing
    if (auto o = order2_from_token(tok)) {
      atoms.emplace_back(*o);
      continue;
    }
    if (auto colon = tok.find(':'); colon != std::string_view::npos) {
      if (colon == 0)
        throw Error(ErrorCode::invalid_term,
                    "effectus token '" + std::string(tok) +
                        "' has an empty successus");
      atoms.emplace_back(Effectus{std::string(tok.substr(0, colon)),
                                  std::string(tok.substr(colon + 1))});
      continue;
    }
    if (allow_actions) {
      atoms.emplace_back(ActionSym{std::string(tok)});
      continue;
    }
    throw Error(ErrorCode::invalid_term,
                "unrecognized atom '" + std::string(tok) + "'");
  }
  if (max_len >= 0 && atoms.size() > static_cast<std::size_t>(max_len))
    throw Error(ErrorCode::term_length_exceeded,
                "term has " + std::to_string(atoms.size()) +
                    " atoms, limit is " + std::to_string(max_len));
  return Term(std::move(atoms));
}

}  // namespace psm
