#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "psm/diagnostics.hpp"
#include "psm/term.hpp"

namespace psm {

struct SuccessusSym {
  std::string name;
  bool constancy = false;

  bool operator==(const SuccessusSym& o) const {
    return name == o.name && constancy == o.constancy;
  }
};

/// One indicator row: a causa, a human-readable label and the successus
/// domain it can realise.
struct IndicatorDecl {
  std::string causa;
  std::string label;
  std::vector<SuccessusSym> domain;
  int line = 0;  // source location when parsed from a file
  int column = 0;

  bool operator==(const IndicatorDecl& o) const {
    return causa == o.causa && label == o.label && domain == o.domain;
  }
};

/// The set of declared indicators. Decides which effectus are real: a pair
/// outside every domain realises only the neutrum and is erased by
/// normalization.
class Vocabulary {
public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<IndicatorDecl> indicators);

  const std::vector<IndicatorDecl>& indicators() const { return indicators_; }

  bool has_causa(const std::string& causa) const;
  bool has_successus(const std::string& succ) const;
  bool is_constancy(const std::string& succ) const;

  /// True iff e.successus lies in the domain of e.causa.
  bool effectus_valid(const Effectus& e) const;

  /// Ordered successus universe (union of all domains).
  const std::vector<SuccessusSym>& successus_universe() const {
    return universe_;
  }

  /// Number of valid (successus, causa) pairs.
  std::size_t w_size() const;

  /// Well-formedness diagnostics: duplicate causae, empty domains, duplicate
  /// domain members, successus flagged constancy in one place but not
  /// another. Empty result means well-formed.
  std::vector<Diagnostic> validate() const;

  bool operator==(const Vocabulary& o) const {
    return indicators_ == o.indicators_;
  }

private:
  std::vector<IndicatorDecl> indicators_;
  std::map<std::string, std::set<std::string>> domains_;  // causa -> successus
  std::vector<SuccessusSym> universe_;
  std::set<std::string> constancy_;
};

/// The built-in indicator table of the intersection example: position,
/// extension, quality, direction and movement.
Vocabulary paper_vocabulary();

}  // namespace psm
