#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "psm/analysis.hpp"
#include "psm/frontend.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw psm::Error(psm::ErrorCode::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw psm::Error(psm::ErrorCode::io_error, "cannot write '" + path + "'");
  out << content;
}

// Prints diagnostics to stderr; returns false when any is an error.
bool report(const psm::ParseResult& pr, const std::string& filename) {
  for (const auto& d : pr.diagnostics)
    std::cerr << psm::format_diagnostic(d, filename) << "\n";
  return pr.ok();
}

psm::Scenario load_scenario(const std::string& path) {
  auto pr = psm::parse_scenario(read_file(path), path);
  if (!report(pr, path))
    throw psm::Error(psm::ErrorCode::io_error,
                     "'" + path + "' did not parse cleanly");
  return *pr.scenario;
}

// Nodes are addressed by their canonical term literal (as printed in the
// JSON/DOT exports) or by a bare action label.
const psm::GraphNode& resolve_node(const psm::PsmGraph& g,
                                   const std::string& text) {
  psm::Term t = psm::parse_term(text);
  if (const auto* n = g.find_by_term(t)) return *n;
  throw psm::Error(psm::ErrorCode::unknown_node,
                   "no node '" + t.literal() + "' in the graph");
}

std::string path_display(const psm::PsmGraph& g, const psm::Path& p) {
  std::string out;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) out += " -> ";
    out += g.find_by_id(p.nodes[i])->term.literal();
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phenomenon-signal model: scenario graphs and path analyses"};
  app.require_subcommand(1);

  auto* cmd_build = app.add_subcommand("build", "build the graph of a scenario");
  std::string build_file, build_out, build_dot;
  bool build_prune = false;
  int build_max_iter = 10000;
  cmd_build->add_option("file", build_file, "scenario source (.psm)")->required();
  cmd_build->add_option("-o,--out", build_out, "write the graph as JSON");
  cmd_build->add_option("--dot", build_dot, "write the graph as DOT");
  cmd_build->add_flag("--prune", build_prune,
                      "drop paths that reach no action node");
  cmd_build->add_option("--max-iterations", build_max_iter,
                        "fixpoint round budget");

  auto* cmd_check = app.add_subcommand("check", "parse and validate a scenario");
  std::string check_file;
  cmd_check->add_option("file", check_file, "scenario source (.psm)")->required();

  auto* cmd_eval = app.add_subcommand("eval", "print the canonical form of a term");
  std::string eval_term, eval_vocab_file;
  cmd_eval->add_option("term", eval_term, "term literal")->required();
  cmd_eval->add_option("--vocab", eval_vocab_file,
                       "take the vocabulary from this scenario file");

  auto* cmd_paths = app.add_subcommand("paths", "enumerate paths in a built graph");
  std::string paths_file, paths_to, paths_from;
  bool paths_capture_free = false;
  cmd_paths->add_option("graph", paths_file, "graph JSON file")->required();
  cmd_paths->add_option("--to", paths_to, "target node (term or action)")
      ->required();
  auto* from_opt =
      cmd_paths->add_option("--from", paths_from, "source node (default: seeds)");
  cmd_paths
      ->add_flag("--capture-free", paths_capture_free,
                 "only seed paths whose interior is structural")
      ->excludes(from_opt);

  auto* cmd_caps = app.add_subcommand(
      "capabilities", "captures, facts and signals required for an action");
  std::string caps_file, caps_action;
  cmd_caps->add_option("graph", caps_file, "graph JSON file")->required();
  cmd_caps->add_option("--action", caps_action, "action node")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cmd_build)) {
      psm::Scenario sc = load_scenario(build_file);
      psm::BuildOptions opts;
      opts.prune = build_prune;
      opts.max_iterations = build_max_iter;
      psm::PsmGraph g = psm::build(sc, opts);
      if (!build_out.empty()) write_file(build_out, psm::export_json(g));
      if (!build_dot.empty()) write_file(build_dot, psm::export_dot(g));
      std::cout << "graph '" << g.meta().scenario << "': " << g.node_count()
                << " nodes, " << g.edge_count() << " edges, "
                << g.meta().iterations << " rounds\n";
      return 0;
    }
    if (app.got_subcommand(cmd_check)) {
      auto pr = psm::parse_scenario(read_file(check_file), check_file);
      if (!report(pr, check_file)) return 1;
      std::cout << "OK: " << pr.scenario->rules.size() << " rules, "
                << pr.scenario->seeds.size() << " seeds, "
                << pr.scenario->signals.size() << " signals\n";
      return 0;
    }
    if (app.got_subcommand(cmd_eval)) {
      psm::Vocabulary vocab = eval_vocab_file.empty()
                                  ? psm::paper_vocabulary()
                                  : load_scenario(eval_vocab_file).vocabulary;
      psm::Term t = psm::parse_term(eval_term);
      std::cout << psm::normalize(t, vocab).literal() << "\n";
      return 0;
    }
    if (app.got_subcommand(cmd_paths)) {
      psm::PsmGraph g = psm::import_json(read_file(paths_file));
      const auto& to = resolve_node(g, paths_to);
      std::vector<psm::Path> paths;
      if (paths_capture_free) {
        paths = psm::capture_free_paths(g, to.id);
      } else {
        std::vector<std::string> from = paths_from.empty()
                                            ? psm::seed_node_ids(g)
                                            : std::vector<std::string>{
                                                  resolve_node(g, paths_from).id};
        paths = psm::enumerate_paths(g, from, to.id);
      }
      for (const auto& p : paths) std::cout << path_display(g, p) << "\n";
      return 0;
    }
    if (app.got_subcommand(cmd_caps)) {
      psm::PsmGraph g = psm::import_json(read_file(caps_file));
      const auto& action = resolve_node(g, caps_action);
      psm::CapabilityReport report = psm::required_capabilities(g, action.id);
      auto literals = [](const std::set<psm::Term>& terms) {
        std::string out = "[";
        bool first = true;
        for (const auto& t : terms) {
          if (!first) out += ", ";
          out += "\"" + t.literal() + "\"";
          first = false;
        }
        return out + "]";
      };
      std::cout << "{\"action\": \"" << action.term.literal() << "\", "
                << "\"required_captures\": " << literals(report.required_captures)
                << ", \"required_facts\": " << literals(report.required_facts)
                << ", \"required_signals\": " << literals(report.required_signals)
                << "}\n";
      return 0;
    }
  } catch (const psm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
