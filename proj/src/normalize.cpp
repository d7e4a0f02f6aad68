#include <algorithm>
#include <cstddef>

#include "psm/term.hpp"
#include "psm/vocabulary.hpp"
#include "rewrite_internal.hpp"

namespace psm::detail {

RewriteHooks vocab_hooks(const Vocabulary& vocab) {
  return RewriteHooks{
      // An effectus survives when it is in the validity set, or when it is
      // the canonical constancy form (empty causa).
      [&vocab](const Effectus& e) {
        if (e.causa.empty()) return vocab.is_constancy(e.successus);
        return vocab.effectus_valid(e);
      },
      [&vocab](const Effectus& e) {
        return !e.causa.empty() && vocab.is_constancy(e.successus) &&
               vocab.effectus_valid(e);
      },
  };
}

std::vector<std::vector<Atom>> rewrite_candidates(const std::vector<Atom>& a,
                                                  const RewriteHooks& hooks,
                                                  bool first_only) {
  std::vector<std::vector<Atom>> out;
  const std::size_t n = a.size();
  auto emit = [&](std::vector<Atom> v) { out.push_back(std::move(v)); };

  // Repeat collapse: an adjacent duplicate block carries no new information,
  // w w -> w. Covers single-atom duplicates and repeated whole runs.
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (std::size_t len = 1; pos + 2 * len <= n; ++len) {
      if (std::equal(a.begin() + pos, a.begin() + pos + len,
                     a.begin() + pos + len)) {
        std::vector<Atom> v(a);
        v.erase(v.begin() + pos, v.begin() + pos + len);
        emit(std::move(v));
        if (first_only) return out;
      }
    }
  }

  // Shared-symbol factoring: w s1 w s2 -> w s1 s2 for the same order-2
  // symbol w and non-empty effectus runs s1, s2.
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_order2(a[i])) continue;
    std::size_t j = i + 1;
    while (j < n && is_effectus(a[j])) ++j;
    if (j == i + 1) continue;                          // s1 empty
    if (j >= n || !(a[j] == a[i])) continue;           // same symbol required
    if (j + 1 >= n || !is_effectus(a[j + 1])) continue;  // s2 empty
    std::vector<Atom> v(a);
    v.erase(v.begin() + j);
    emit(std::move(v));
    if (first_only) return out;
  }

  // Shared-run factoring: w1 s w2 s -> w1 w2 s where both copies of s are
  // maximal effectus runs. w1 may be absent at the start of the term (the
  // neutrum acts as the missing symbol).
  for (std::ptrdiff_t i = -1; i + 1 < static_cast<std::ptrdiff_t>(n); ++i) {
    if (i >= 0 && !is_order2(a[i])) continue;
    const std::size_t rb = static_cast<std::size_t>(i + 1);
    std::size_t re = rb;
    while (re < n && is_effectus(a[re])) ++re;
    if (re == rb) continue;                       // no run after w1
    if (re >= n || !is_order2(a[re])) continue;   // w2 must follow the run
    const std::size_t len = re - rb;
    const std::size_t sb = re + 1;
    if (sb + len > n) continue;
    if (!std::equal(a.begin() + rb, a.begin() + re, a.begin() + sb)) continue;
    if (sb + len < n && is_effectus(a[sb + len])) continue;  // second copy maximal
    std::vector<Atom> v(a);
    v.erase(v.begin() + rb, v.begin() + re);
    emit(std::move(v));
    if (first_only) return out;
  }

  // Inverse cancellation: adjacent matching-kind inverse pairs realise the
  // neutrum. Mixed kinds (e.g. ? !-) do not interact.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto* x = std::get_if<Order2Sym>(&a[i]);
    const auto* y = std::get_if<Order2Sym>(&a[i + 1]);
    if (!x || !y || !is_inverse_pair(*x, *y)) continue;
    std::vector<Atom> v(a);
    v.erase(v.begin() + i, v.begin() + i + 2);
    emit(std::move(v));
    if (first_only) return out;
  }

  // Neutrum erasure: effectus outside the validity set realise nothing.
  for (std::size_t i = 0; i < n; ++i) {
    const auto* e = std::get_if<Effectus>(&a[i]);
    if (!e || hooks.keeps(*e)) continue;
    std::vector<Atom> v(a);
    v.erase(v.begin() + i);
    emit(std::move(v));
    if (first_only) return out;
  }

  // Constancy erasure: a constancy successus shields its causa, which is
  // replaced by the canonical empty causa.
  for (std::size_t i = 0; i < n; ++i) {
    const auto* e = std::get_if<Effectus>(&a[i]);
    if (!e || !hooks.constancy_rewrite(*e)) continue;
    std::vector<Atom> v(a);
    v[i] = Effectus{e->successus, ""};
    emit(std::move(v));
    if (first_only) return out;
  }

  return out;
}

std::vector<Atom> normalize_atoms(std::vector<Atom> atoms,
                                  const RewriteHooks& hooks) {
  for (;;) {
    auto next = rewrite_candidates(atoms, hooks, /*first_only=*/true);
    if (next.empty()) return atoms;
    atoms = std::move(next.front());
  }
}

}  // namespace psm::detail

namespace psm {

Term normalize(const Term& t, const Vocabulary& vocab) {
  if (t.is_normalized()) return t;
  auto atoms = detail::normalize_atoms(t.atoms(), detail::vocab_hooks(vocab));
  return Term(std::move(atoms), /*normalized=*/true);
}

bool e_equal(const Term& t1, const Term& t2, const Vocabulary& vocab) {
  return normalize(t1, vocab) == normalize(t2, vocab);
}

}  // namespace psm
