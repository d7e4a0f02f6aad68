#include "psm/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "psm/analysis.hpp"

namespace psm {

namespace {

// ---------------------------------------------------------------- lexer --

struct Token {
  enum class Kind { word, str, lbrace, rbrace, comma, eof };
  Kind kind = Kind::eof;
  std::string text;
  int line = 0;
  int col = 0;
};

std::vector<Token> tokenize(std::string_view src,
                            std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Token::Kind k, std::string text, int l, int c) {
    out.push_back(Token{k, std::move(text), l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') ++i, ++col;
      continue;
    }
    int tl = line, tc = col;
    if (c == '{' || c == '}' || c == ',') {
      push(c == '{' ? Token::Kind::lbrace
                    : c == '}' ? Token::Kind::rbrace : Token::Kind::comma,
           std::string(1, c), tl, tc);
      ++i;
      ++col;
      continue;
    }
    if (c == '"') {
      ++i;
      ++col;
      std::string text;
      bool closed = false;
      while (i < src.size() && src[i] != '\n') {
        if (src[i] == '"') {
          closed = true;
          ++i;
          ++col;
          break;
        }
        text += src[i];
        ++i;
        ++col;
      }
      if (!closed)
        diags.push_back({Diagnostic::Severity::error, tl, tc,
                         "unterminated string literal"});
      push(Token::Kind::str, std::move(text), tl, tc);
      continue;
    }
    std::string word;
    while (i < src.size()) {
      char w = src[i];
      if (w == ' ' || w == '\t' || w == '\r' || w == '\n' || w == '{' ||
          w == '}' || w == ',' || w == '"' || w == '#')
        break;
      word += w;
      ++i;
      ++col;
    }
    push(Token::Kind::word, std::move(word), tl, tc);
  }
  push(Token::Kind::eof, "", line, col);
  return out;
}

// --------------------------------------------------------------- parser --

bool ascii_upper_start(const std::string& s) {
  return !s.empty() && s[0] >= 'A' && s[0] <= 'Z';
}
bool ascii_lower_start(const std::string& s) {
  return !s.empty() && s[0] >= 'a' && s[0] <= 'z';
}

class Parser {
public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  std::optional<Scenario> run() {
    collect_vocabulary();
    if (!has_error()) parse_sections();
    if (!has_error()) finish();
    if (has_error()) return std::nullopt;
    return std::move(scenario_);
  }

private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t p = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[p];
  }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::eof; }

  void error(const Token& t, const std::string& msg) {
    diags_.push_back({Diagnostic::Severity::error, t.line, t.col, msg});
  }
  void warning(const Token& t, const std::string& msg) {
    diags_.push_back({Diagnostic::Severity::warning, t.line, t.col, msg});
  }
  std::size_t error_count() const {
    return std::count_if(diags_.begin(), diags_.end(), [](const Diagnostic& d) {
      return d.severity == Diagnostic::Severity::error;
    });
  }
  bool has_error() const { return error_count() > 0; }

  bool expect_lbrace(const char* what) {
    if (peek().kind != Token::Kind::lbrace) {
      error(peek(), std::string("expected '{' after ") + what);
      return false;
    }
    advance();
    return true;
  }

  void expect_rbrace(const char* what) {
    if (peek().kind == Token::Kind::rbrace) {
      advance();
      return;
    }
    error(peek(), std::string("expected '}' to close ") + what);
  }

  // Skips a balanced { ... } block, including any words before the brace.
  void skip_block() {
    while (!at_end() && peek().kind != Token::Kind::lbrace) advance();
    if (at_end()) return;
    int depth = 0;
    do {
      const Token& t = advance();
      if (t.kind == Token::Kind::lbrace) ++depth;
      if (t.kind == Token::Kind::rbrace) --depth;
    } while (!at_end() && depth > 0);
  }

  // First pass: only the vocabulary, so terms and patterns can resolve.
  void collect_vocabulary() {
    bool seen = false;
    pos_ = 0;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == Token::Kind::word && t.text == "vocab") {
        if (seen) {
          error(t, "duplicate vocab block");
          skip_block();
          continue;
        }
        seen = true;
        parse_vocab();
        continue;
      }
      if (t.kind == Token::Kind::word &&
          (t.text == "rules" || t.text == "signals" || t.text == "scenario")) {
        skip_block();
        continue;
      }
      error(t, "expected a vocab, rules, signals or scenario block");
      advance();
      skip_block();
    }
    if (!seen)
      diags_.push_back({Diagnostic::Severity::error, 1, 1,
                        "missing vocab block"});
    vocab_ = Vocabulary(indicators_);
    for (const Diagnostic& d : vocab_.validate()) diags_.push_back(d);
    scenario_.vocabulary = vocab_;
  }

  void parse_vocab() {
    advance();  // 'vocab'
    if (!expect_lbrace("'vocab'")) return skip_block();
    while (!at_end() && peek().kind != Token::Kind::rbrace) {
      const Token& t = peek();
      if (t.kind != Token::Kind::word || t.text != "indicator") {
        error(t, "expected 'indicator'");
        return skip_to_rbrace();
      }
      advance();
      parse_indicator();
    }
    expect_rbrace("the vocab block");
  }

  void parse_indicator() {
    const Token& name = peek();
    if (name.kind != Token::Kind::word) {
      error(name, "expected an indicator symbol");
      return skip_to_rbrace();
    }
    advance();
    IndicatorDecl decl;
    decl.causa = name.text;
    decl.line = name.line;
    decl.column = name.col;
    if (peek().kind == Token::Kind::str) decl.label = advance().text;
    if (!expect_lbrace("the indicator name")) return skip_to_rbrace();
    while (!at_end() && peek().kind != Token::Kind::rbrace) {
      const Token& kw = peek();
      if (kw.kind != Token::Kind::word ||
          (kw.text != "succ" && kw.text != "constancy")) {
        error(kw, "expected 'succ' or 'constancy'");
        return skip_to_rbrace();
      }
      bool constancy = kw.text == "constancy";
      advance();
      bool any = false;
      while (peek().kind == Token::Kind::word && peek().text != "succ" &&
             peek().text != "constancy") {
        decl.domain.push_back(SuccessusSym{advance().text, constancy});
        any = true;
      }
      if (!any) error(kw, "expected at least one successus symbol");
    }
    expect_rbrace("the indicator block");
    indicators_.push_back(std::move(decl));
  }

  void skip_to_rbrace() {
    int depth = 1;
    while (!at_end() && depth > 0) {
      const Token& t = advance();
      if (t.kind == Token::Kind::lbrace) ++depth;
      if (t.kind == Token::Kind::rbrace) --depth;
    }
  }

  // Second pass: everything else, in file order.
  void parse_sections() {
    pos_ = 0;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind != Token::Kind::word) {
        advance();
        continue;
      }
      if (t.text == "vocab") {
        skip_block();
      } else if (t.text == "rules") {
        parse_rules();
      } else if (t.text == "signals") {
        parse_signals();
      } else if (t.text == "scenario") {
        parse_scenario_block();
      } else {
        advance();
        skip_block();
      }
    }
  }

  void parse_rules() {
    advance();  // 'rules'
    if (!expect_lbrace("'rules'")) return skip_block();
    while (!at_end() && peek().kind != Token::Kind::rbrace) parse_rule();
    expect_rbrace("the rules block");
  }

  std::optional<RuleClass> rule_class_from(const std::string& word) {
    if (word == "structural") return RuleClass::structural;
    if (word == "behavioural") return RuleClass::behavioural;
    if (word == "equivalence") return RuleClass::equivalence;
    return std::nullopt;
  }

  void parse_rule() {
    const Token& klass_tok = peek();
    auto klass = klass_tok.kind == Token::Kind::word
                     ? rule_class_from(klass_tok.text)
                     : std::nullopt;
    if (!klass) {
      error(klass_tok, "expected a rule class (structural, behavioural or "
                       "equivalence)");
      advance();
      skip_to_rbrace();
      return;
    }
    advance();
    const Token id_tok = peek();
    if (id_tok.kind != Token::Kind::word) {
      error(id_tok, "expected a rule id");
      skip_to_rbrace();
      return;
    }
    advance();
    if (id_tok.text == "signal") {
      error(id_tok, "rule id 'signal' is reserved for the built-in rule");
    }
    if (!rule_ids_.insert(id_tok.text).second)
      error(id_tok, "duplicate rule id '" + id_tok.text + "'");

    bool distinct = false;
    if (peek().kind == Token::Kind::word && peek().text == "distinct") {
      distinct = true;
      advance();
    }
    if (!expect_lbrace("the rule id")) return skip_to_rbrace();
    if (peek().kind != Token::Kind::word || peek().text != "when") {
      error(peek(), "expected 'when'");
      return skip_to_rbrace();
    }
    advance();
    const std::size_t errors_before = error_count();
    std::vector<Pattern> conditions = parse_pattern_list(/*stop_at_then=*/true);
    if (peek().kind != Token::Kind::word || peek().text != "then") {
      error(peek(), "expected 'then'");
      return skip_to_rbrace();
    }
    advance();
    std::vector<Pattern> consequents = parse_pattern_list(false);
    expect_rbrace("the rule");

    if (error_count() != errors_before) return;  // atoms already diagnosed
    try {
      Rule r = make_rule(id_tok.text, *klass, std::move(conditions),
                         std::move(consequents), vocab_, distinct);
      for (const auto& c : r.conditions)
        for (const auto& pa : c.atoms())
          if (const auto* e = std::get_if<Effectus>(&pa);
              e && !vocab_.effectus_valid(*e) &&
              !(e->causa.empty() && vocab_.is_constancy(e->successus))) {
            warning(id_tok, "rule '" + r.id + "' can never fire: condition "
                            "effectus '" + atom_literal(*e) +
                            "' is outside the vocabulary");
            break;
          }
      scenario_.rules.push_back(std::move(r));
    } catch (const Error& e) {
      error(id_tok, e.what());
    }
  }

  std::vector<Pattern> parse_pattern_list(bool stop_at_then) {
    std::vector<Pattern> out;
    for (;;) {
      out.push_back(parse_pattern(stop_at_then));
      if (peek().kind == Token::Kind::comma) {
        advance();
        continue;
      }
      break;
    }
    return out;
  }

  Pattern parse_pattern(bool stop_at_then) {
    std::vector<PatternAtom> atoms;
    for (;;) {
      const Token& t = peek();
      if (t.kind == Token::Kind::comma || t.kind == Token::Kind::rbrace ||
          t.kind == Token::Kind::eof)
        break;
      if (stop_at_then && t.kind == Token::Kind::word && t.text == "then")
        break;
      if (t.kind == Token::Kind::str) {
        atoms.push_back(ActionSym{t.text});
        advance();
        continue;
      }
      if (auto atom = pattern_atom(t)) atoms.push_back(*atom);
      advance();
    }
    if (atoms.empty()) error(peek(), "empty pattern");
    return Pattern(std::move(atoms));
  }

  std::optional<PatternAtom> pattern_atom(const Token& t) {
    const std::string& w = t.text;
    if (w == "!") return PatternAtom{Order2Sym::fact};
    if (w == "?") return PatternAtom{Order2Sym::capture};
    if (w == "!-") return PatternAtom{Order2Sym::fact_inverse};
    if (w == "?-") return PatternAtom{Order2Sym::capture_inverse};
    auto colon = w.find(':');
    if (colon != std::string::npos) {
      std::string succ = w.substr(0, colon);
      std::string causa = w.substr(colon + 1);
      if (succ.empty()) {
        error(t, "effectus '" + w + "' has an empty successus");
        return std::nullopt;
      }
      if (!causa.empty() && !vocab_.has_causa(causa)) {
        error(t, "unknown indicator '" + causa + "'");
        return std::nullopt;
      }
      if (causa.empty() && !vocab_.is_constancy(succ)) {
        error(t, "'" + w + "': only constancy successus may omit the causa");
        return std::nullopt;
      }
      used_causae_.insert(causa);
      if (vocab_.has_successus(succ)) return PatternAtom{Effectus{succ, causa}};
      if (ascii_lower_start(succ)) return PatternAtom{SuccVarEffectus{succ, causa}};
      error(t, "unknown successus '" + succ + "'");
      return std::nullopt;
    }
    if (ascii_upper_start(w)) {
      if (vocab_.has_causa(w))
        warning(t, "variable '" + w + "' shadows indicator '" + w + "'");
      return PatternAtom{CausaSeqVar{w}};
    }
    error(t, "unrecognized pattern atom '" + w +
                 "' (effectus are written succ:Causa, actions are quoted)");
    return std::nullopt;
  }

  // An order-1 term of valid effectus; used by signals and seeds.
  std::optional<Term> parse_plain_term(const std::vector<Token>& atoms) {
    std::vector<Atom> out;
    bool ok = true;
    for (const Token& t : atoms) {
      auto colon = t.text.find(':');
      if (t.kind != Token::Kind::word || colon == std::string::npos) {
        error(t, "expected an effectus atom (succ:Causa)");
        ok = false;
        continue;
      }
      std::string succ = t.text.substr(0, colon);
      std::string causa = t.text.substr(colon + 1);
      if (succ.empty()) {
        error(t, "effectus '" + t.text + "' has an empty successus");
        ok = false;
        continue;
      }
      Effectus e{succ, causa};
      bool canonical_constancy = causa.empty() && vocab_.is_constancy(succ);
      if (!canonical_constancy && !vocab_.has_causa(causa)) {
        error(t, "unknown indicator '" + causa + "'");
        ok = false;
        continue;
      }
      if (!canonical_constancy && !vocab_.effectus_valid(e)) {
        error(t, "successus '" + succ + "' is not in the domain of indicator '" +
                     causa + "'");
        ok = false;
        continue;
      }
      used_causae_.insert(causa);
      out.emplace_back(std::move(e));
    }
    if (!ok) return std::nullopt;
    return Term(std::move(out));
  }

  void parse_signals() {
    advance();  // 'signals'
    if (!expect_lbrace("'signals'")) return skip_block();
    std::vector<Token> line_atoms;
    int current_line = -1;
    auto flush = [&]() {
      if (line_atoms.empty()) return;
      if (auto t = parse_plain_term(line_atoms); t && !t->empty())
        scenario_.signals.push_back(std::move(*t));
      line_atoms.clear();
    };
    while (!at_end() && peek().kind != Token::Kind::rbrace) {
      const Token& t = peek();
      if (t.line != current_line) {
        flush();
        current_line = t.line;
      }
      line_atoms.push_back(t);
      advance();
    }
    flush();
    expect_rbrace("the signals block");
  }

  void parse_scenario_block() {
    const Token& kw = peek();
    advance();  // 'scenario'
    if (seen_scenario_) error(kw, "duplicate scenario block");
    seen_scenario_ = true;
    if (peek().kind == Token::Kind::str)
      scenario_.name = advance().text;
    else
      error(peek(), "expected a quoted scenario name");
    if (!expect_lbrace("the scenario name")) return skip_block();
    while (!at_end() && peek().kind != Token::Kind::rbrace) {
      const Token& t = peek();
      if (t.kind != Token::Kind::word || t.text != "seed") {
        error(t, "expected 'seed'");
        return skip_to_rbrace();
      }
      advance();
      std::vector<Token> atoms;
      while (peek().kind == Token::Kind::word && peek().text != "seed")
        atoms.push_back(advance());
      if (atoms.empty()) {
        error(t, "empty seed");
        continue;
      }
      if (auto term = parse_plain_term(atoms)) {
        Term norm = normalize(*term, vocab_);
        if (norm.empty())
          error(t, "seed normalizes to the neutrum");
        else
          scenario_.seeds.push_back(std::move(norm));
      }
    }
    expect_rbrace("the scenario block");
  }

  void finish() {
    scenario_.rules.push_back(signal_rule(vocab_));
    if (!seen_scenario_)
      diags_.push_back({Diagnostic::Severity::warning, 1, 1,
                        "no scenario block: nothing will be seeded"});
    for (const auto& ind : indicators_)
      if (!used_causae_.count(ind.causa))
        diags_.push_back({Diagnostic::Severity::warning, ind.line, ind.column,
                          "indicator '" + ind.causa +
                              "' is not used by any rule, seed or signal"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
  std::vector<IndicatorDecl> indicators_;
  Vocabulary vocab_;
  Scenario scenario_;
  std::set<std::string> rule_ids_;
  std::set<std::string> used_causae_;
  bool seen_scenario_ = false;
};

}  // namespace

ParseResult parse_scenario(std::string_view source, std::string_view filename) {
  (void)filename;
  ParseResult result;
  auto tokens = tokenize(source, result.diagnostics);
  Parser parser(std::move(tokens), result.diagnostics);
  result.scenario = parser.run();
  return result;
}

// --------------------------------------------------------------- printer --

std::string print_scenario(const Scenario& sc) {
  std::ostringstream out;
  out << "vocab {\n";
  for (const auto& ind : sc.vocabulary.indicators()) {
    out << "  indicator " << ind.causa << " \"" << ind.label << "\" {";
    std::string plain, constancy;
    for (const auto& s : ind.domain)
      (s.constancy ? constancy : plain) += " " + s.name;
    if (!plain.empty()) out << " succ" << plain;
    if (!constancy.empty()) out << " constancy" << constancy;
    out << " }\n";
  }
  out << "}\n\nrules {\n";
  for (const auto& r : sc.rules) {
    if (r.builtin) continue;
    out << "  " << rule_class_name(r.klass) << " " << r.id;
    if (r.distinct_vars) out << " distinct";
    out << " { when ";
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
      if (i) out << ", ";
      out << r.conditions[i].literal();
    }
    out << " then ";
    for (std::size_t i = 0; i < r.consequents.size(); ++i) {
      if (i) out << ", ";
      out << r.consequents[i].literal();
    }
    out << " }\n";
  }
  out << "}\n\nsignals {\n";
  for (const auto& s : sc.signals) out << "  " << s.literal() << "\n";
  out << "}\n\nscenario \"" << sc.name << "\" {\n";
  for (const auto& s : sc.seeds) out << "  seed " << s.literal() << "\n";
  out << "}\n";
  return out.str();
}

// ------------------------------------------------------------- exporters --

namespace {

const char* kind_color(NodeKind k) {
  switch (k) {
    case NodeKind::structural: return "grey";
    case NodeKind::capture: return "lightblue";
    case NodeKind::fact: return "green";
    case NodeKind::signal: return "orange";
    case NodeKind::action: return "red";
  }
  return "grey";
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::vector<GraphEdge> canonical_edges(const PsmGraph& g) {
  std::vector<GraphEdge> edges = g.edges();
  std::sort(edges.begin(), edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) {
              return std::tie(a.application, a.from, a.to, a.rule_id) <
                     std::tie(b.application, b.from, b.to, b.rule_id);
            });
  return edges;
}

}  // namespace

std::string export_dot(const PsmGraph& g) {
  std::ostringstream out;
  out << "digraph psm {\n  rankdir=LR;\n  node [style=filled];\n";
  for (const GraphNode* n : g.sorted_nodes())
    out << "  \"" << n->id << "\" [label=\"" << dot_escape(n->term.literal())
        << "\", fillcolor=" << kind_color(n->kind) << "];\n";
  for (const GraphEdge& e : canonical_edges(g))
    out << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\""
        << dot_escape(e.rule_id) << "#" << e.application << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string export_json(const PsmGraph& g) {
  nlohmann::json j;
  j["meta"]["scenario"] = g.meta().scenario;
  j["meta"]["iterations"] = g.meta().iterations;
  j["meta"]["options"] = {
      {"prune", g.meta().options.prune},
      {"max_iterations", g.meta().options.max_iterations},
      {"max_term_len", g.meta().options.max_term_len},
  };
  j["nodes"] = nlohmann::json::array();
  for (const GraphNode* n : g.sorted_nodes())
    j["nodes"].push_back({{"id", n->id},
                          {"term", n->term.literal()},
                          {"kind", node_kind_name(n->kind)}});
  j["edges"] = nlohmann::json::array();
  for (const GraphEdge& e : canonical_edges(g))
    j["edges"].push_back({{"from", e.from},
                          {"to", e.to},
                          {"rule", e.rule_id},
                          {"application", e.application}});
  return j.dump(2) + "\n";
}

PsmGraph import_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_graph_file, std::string("not a graph file: ") +
                                               e.what());
  }
  try {
    PsmGraph g;
    g.meta().scenario = j.at("meta").at("scenario").get<std::string>();
    g.meta().iterations = j.at("meta").at("iterations").get<int>();
    const auto& opts = j.at("meta").at("options");
    g.meta().options.prune = opts.at("prune").get<bool>();
    g.meta().options.max_iterations = opts.at("max_iterations").get<int>();
    g.meta().options.max_term_len = opts.at("max_term_len").get<int>();
    for (const auto& n : j.at("nodes")) {
      auto kind = node_kind_from_name(n.at("kind").get<std::string>());
      if (!kind)
        throw Error(ErrorCode::bad_graph_file,
                    "unknown node kind '" + n.at("kind").get<std::string>() + "'");
      Term term = parse_term(n.at("term").get<std::string>());
      auto [id, inserted] = g.add_node(term, *kind);
      if (!inserted || id != n.at("id").get<std::string>())
        throw Error(ErrorCode::bad_graph_file,
                    "node id '" + n.at("id").get<std::string>() +
                        "' does not match its term");
    }
    int max_app = -1;
    for (const auto& e : j.at("edges")) {
      GraphEdge edge{e.at("from").get<std::string>(),
                     e.at("to").get<std::string>(),
                     e.at("rule").get<std::string>(),
                     e.at("application").get<int>()};
      if (!g.has_node(edge.from) || !g.has_node(edge.to))
        throw Error(ErrorCode::bad_graph_file,
                    "edge references an unknown node id");
      g.add_edge(edge.from, edge.to, edge.rule_id, edge.application);
      max_app = std::max(max_app, edge.application);
    }
    g.set_next_application_id(max_app + 1);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_graph_file,
                std::string("malformed graph file: ") + e.what());
  }
}

}  // namespace psm
