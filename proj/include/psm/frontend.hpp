#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psm/diagnostics.hpp"
#include "psm/graph.hpp"

namespace psm {

struct ParseResult {
  std::optional<Scenario> scenario;  // absent when any error was emitted
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return scenario.has_value(); }
};

/// Parses a .psm source file into a validated scenario. Errors leave
/// `scenario` empty; warnings do not.
ParseResult parse_scenario(std::string_view source,
                           std::string_view filename = "");

/// Canonical source form of a scenario; parsing the output yields a
/// structurally equal scenario.
std::string print_scenario(const Scenario& sc);

/// Graphviz rendering with the conventional node coloring: structural grey,
/// capture lightblue, fact green, signal orange, action red. Byte
/// deterministic for equal graphs.
std::string export_dot(const PsmGraph& g);

/// Canonical JSON: meta{scenario, iterations, options}, nodes[{id, term,
/// kind}], edges[{from, to, rule, application}]. Sorted keys and canonical
/// element order; round-trips through import_json.
std::string export_json(const PsmGraph& g);

/// Inverse of export_json. Throws ErrorCode::bad_graph_file.
PsmGraph import_json(std::string_view json_text);

}  // namespace psm
