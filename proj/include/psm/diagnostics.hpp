#pragma once

#include <string>

namespace psm {

struct Diagnostic {
  enum class Severity { error, warning };

  Severity severity = Severity::error;
  int line = 0;    // 1-based; 0 when no source location applies
  int column = 0;  // 1-based
  std::string message;
};

inline std::string format_diagnostic(const Diagnostic& d,
                                     const std::string& filename = "") {
  std::string out;
  if (!filename.empty()) out += filename + ":";
  out += std::to_string(d.line) + ":" + std::to_string(d.column) + ": ";
  out += d.severity == Diagnostic::Severity::error ? "error: " : "warning: ";
  out += d.message;
  return out;
}

}  // namespace psm
