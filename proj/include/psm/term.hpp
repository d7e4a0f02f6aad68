#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "psm/error.hpp"

namespace psm {

class Vocabulary;

/// Second-order successus symbols: a term headed by `!` states a fact, one
/// headed by `?` a capture event. The inverse symbols cancel their base
/// symbol during normalization.
enum class Order2Sym { fact, capture, fact_inverse, capture_inverse };

Order2Sym inverse_of(Order2Sym s);
bool is_inverse_pair(Order2Sym a, Order2Sym b);

/// A measured property: a successus realised by a causa (indicator), e.g.
/// "b1:P" = position is zone b1. The empty causa is the canonical carrier
/// for constancy successus, whose effect does not depend on the causa.
struct Effectus {
  std::string successus;
  std::string causa;

  auto operator<=>(const Effectus&) const = default;
};

/// Opaque behaviour label such as "0B" (brake) or "00" (collision). Kept
/// distinct from effectus so "00" never parses as successus 0 of causa 0.
struct ActionSym {
  std::string name;

  auto operator<=>(const ActionSym&) const = default;
};

using Atom = std::variant<Order2Sym, Effectus, ActionSym>;

inline bool is_order2(const Atom& a) { return std::holds_alternative<Order2Sym>(a); }
inline bool is_effectus(const Atom& a) { return std::holds_alternative<Effectus>(a); }
inline bool is_action(const Atom& a) { return std::holds_alternative<ActionSym>(a); }

/// A term is an ordered atom sequence; the universal value of the calculus.
/// Facts, captures, signals and structural circumstances are term shapes.
/// The neutrum is the empty term.
class Term {
public:
  Term() = default;
  explicit Term(std::vector<Atom> atoms, bool normalized = false)
      : atoms_(std::move(atoms)), normalized_(normalized) {}

  static Term neutrum() { return Term{}; }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  bool is_normalized() const { return normalized_; }

  /// True when the term is a plain effectus sequence (no order-2 or action
  /// atoms) -- the shape required of seeds and of `apply_successus` inputs.
  bool is_order1() const;

  std::string literal() const;

  bool operator==(const Term& o) const { return atoms_ == o.atoms_; }
  bool operator!=(const Term& o) const { return !(*this == o); }
  bool operator<(const Term& o) const { return atoms_ < o.atoms_; }

private:
  std::vector<Atom> atoms_;
  bool normalized_ = false;
};

inline constexpr int kDefaultMaxTermLen = 64;

/// Appends `atom` unless it equals the last atom of `seq`; the base
/// composition step of the calculus. Total.
Term compose(const Term& seq, const Atom& atom);

/// Left fold of `compose` over the atoms of `s2`, starting from `s1`.
Term concat(const Term& s1, const Term& s2);

/// Prefixes an order-1 sequence with an order-2 symbol (unnormalized).
/// Throws ErrorCode::invalid_term when `s` is not order-1.
Term apply_successus(Order2Sym omega, const Term& s);

/// Canonical form under the rewrite laws: repeat collapse, shared-symbol and
/// shared-run factoring, inverse cancellation, neutrum and constancy
/// erasure. Deterministic (fixed rule priority, leftmost match) and total.
Term normalize(const Term& t, const Vocabulary& vocab);

/// Terms are E-equal when their canonical forms coincide.
bool e_equal(const Term& t1, const Term& t2, const Vocabulary& vocab);

std::string atom_literal(const Atom& a);

/// Parses the term literal syntax: atoms separated by spaces, prefix tokens
/// `!` `?` `!-` `?-`, effectus `succ:Causa`, neutrum `I`, and (when allowed)
/// bare action labels. Throws ErrorCode::invalid_term / term_length_exceeded.
Term parse_term(std::string_view text, bool allow_actions = true,
                int max_len = kDefaultMaxTermLen);

}  // namespace psm
