#pragma once

#include <stdexcept>
#include <string>

namespace psm {

enum class ErrorCode {
  invalid_term,
  term_length_exceeded,
  invalid_seed,
  invalid_signal,
  iteration_budget_exceeded,
  path_budget_exceeded,
  unknown_node,
  unknown_rule,
  kind_mismatch,
  rule_authoring,
  bad_graph_file,
  io_error,
};

/// Library failures are reported as exceptions carrying a stable code so the
/// CLI can map them onto exit statuses.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace psm
