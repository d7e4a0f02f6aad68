#include "psm/vocabulary.hpp"

#include <algorithm>

namespace psm {

Vocabulary::Vocabulary(std::vector<IndicatorDecl> indicators)
    : indicators_(std::move(indicators)) {
  std::set<std::string> seen_succ;
  for (const auto& ind : indicators_) {
    auto& dom = domains_[ind.causa];
    for (const auto& s : ind.domain) {
      dom.insert(s.name);
      if (s.constancy) constancy_.insert(s.name);
      if (seen_succ.insert(s.name).second)
        universe_.push_back(SuccessusSym{s.name, s.constancy});
    }
  }
  for (auto& s : universe_) s.constancy = constancy_.count(s.name) > 0;
}

bool Vocabulary::has_causa(const std::string& causa) const {
  return domains_.count(causa) > 0;
}

bool Vocabulary::has_successus(const std::string& succ) const {
  return std::any_of(universe_.begin(), universe_.end(),
                     [&](const SuccessusSym& s) { return s.name == succ; });
}

bool Vocabulary::is_constancy(const std::string& succ) const {
  return constancy_.count(succ) > 0;
}

bool Vocabulary::effectus_valid(const Effectus& e) const {
  auto it = domains_.find(e.causa);
  return it != domains_.end() && it->second.count(e.successus) > 0;
}

std::size_t Vocabulary::w_size() const {
  std::size_t n = 0;
  for (const auto& [causa, dom] : domains_) n += dom.size();
  return n;
}

std::vector<Diagnostic> Vocabulary::validate() const {
  std::vector<Diagnostic> out;
  std::set<std::string> seen_causae;
  std::map<std::string, bool> flag_by_succ;
  for (const auto& ind : indicators_) {
    if (!seen_causae.insert(ind.causa).second)
      out.push_back({Diagnostic::Severity::error, ind.line, ind.column,
                     "duplicate indicator '" + ind.causa + "'"});
    if (ind.domain.empty())
      out.push_back({Diagnostic::Severity::error, ind.line, ind.column,
                     "indicator '" + ind.causa + "' has an empty domain"});
    std::set<std::string> seen;
    for (const auto& s : ind.domain) {
      if (!seen.insert(s.name).second)
        out.push_back({Diagnostic::Severity::error, ind.line, ind.column,
                       "successus '" + s.name + "' declared twice in '" +
                           ind.causa + "'"});
      auto [it, inserted] = flag_by_succ.emplace(s.name, s.constancy);
      if (!inserted && it->second != s.constancy)
        out.push_back({Diagnostic::Severity::error, ind.line, ind.column,
                       "successus '" + s.name +
                           "' has conflicting constancy declarations"});
    }
  }
  return out;
}

Vocabulary paper_vocabulary() {
  auto plain = [](std::initializer_list<const char*> names) {
    std::vector<SuccessusSym> out;
    for (const char* n : names) out.push_back(SuccessusSym{n, false});
    return out;
  };
  std::vector<IndicatorDecl> inds;
  // Position includes g2: the movement rules and the cyclist seed use it.
  inds.push_back({"P", "Position", plain({"b1", "b2", "g1", "g2", "r1"})});
  inds.push_back({"A", "Extension", plain({"r", "f", "a", "l"})});
  inds.push_back({"Q", "Quality", plain({"ü", "r", "f", "a", "l"})});
  inds.push_back({"R", "Direction", plain({"<", ">", "+", "-"})});
  inds.push_back({"B", "Movement", plain({"0", "<", ">", "+", "-"})});
  return Vocabulary(std::move(inds));
}

}  // namespace psm
