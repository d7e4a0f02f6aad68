#pragma once

#include <functional>
#include <vector>

#include "psm/term.hpp"

namespace psm::detail {

// Hooks let pattern canonicalization reuse the rewrite engine: variables are
// encoded as opaque effectus atoms that the invalid-erasure rule must keep.
struct RewriteHooks {
  std::function<bool(const Effectus&)> keeps;             // erases atom when false
  std::function<bool(const Effectus&)> constancy_rewrite; // causa -> empty applies
};

RewriteHooks vocab_hooks(const Vocabulary& vocab);

// One-step rewrite results, ordered by rule priority (repeat collapse,
// shared-symbol factoring, shared-run factoring, inverse cancellation,
// invalid erasure, constancy erasure), then leftmost position, then smallest
// repeat block. With first_only, at most one result is returned.
std::vector<std::vector<Atom>> rewrite_candidates(const std::vector<Atom>& atoms,
                                                  const RewriteHooks& hooks,
                                                  bool first_only);

std::vector<Atom> normalize_atoms(std::vector<Atom> atoms,
                                  const RewriteHooks& hooks);

}  // namespace psm::detail
