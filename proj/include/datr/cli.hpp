#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "datr/crosscheck.hpp"
#include "datr/syntax.hpp"

namespace datr {

// Exit codes: 0 ok, 1 theory error, 2 usage error, 3 cross-check failure.
enum ExitCode {
  kExitOk = 0,
  kExitTheoryError = 1,
  kExitUsage = 2,
  kExitCrossCheck = 3,
};

struct RunConfig {
  std::string theory_path;
  int max_path_len = 10;
  int max_depth = 50;
  std::string format = "text";  // text | json
  std::string trace;            // "" | chart | forward

  EvalLimits limits() const { return {max_path_len, max_depth}; }
};

namespace cli_detail {

using nlohmann::json;

inline json path_json(const AttrPath& p) { return json(p); }

inline json constraint_json(const ConstraintSet& c) {
  json out = json::array();
  for (const auto& p : c) out.push_back(path_json(p));
  return out;
}

inline json answer_json(const ReverseAnswer& a) {
  return json{{"node", a.node},
              {"path", path_json(a.path)},
              {"open", a.open_extension},
              {"forbidden", constraint_json(a.forbidden)}};
}

inline json rule_json(const Rule& rule) {
  auto node_json = [](const NodeSlot& s) {
    return s.is_var() ? json{{"var", s.var}} : json{{"node", s.name}};
  };
  auto pathterm_json = [](const PathTerm& p) {
    json out{{"atoms", p.atoms}};
    if (p.open()) out["tail"] = p.tail;
    return out;
  };
  auto nt_json = [&](const NonTerminal& nt) {
    return json{{"local_node", node_json(nt.local_node)},
                {"local_path", pathterm_json(nt.local_path)},
                {"constraint", constraint_json(nt.constraint)},
                {"global_node", node_json(nt.global_node)},
                {"global_path", pathterm_json(nt.global_path)}};
  };
  json rhs = json::array();
  for (const auto& sym : rule.rhs) {
    if (sym.is_atom)
      rhs.push_back(json{{"atom", sym.atom}});
    else
      rhs.push_back(nt_json(sym.nt));
  }
  return json{{"lhs", nt_json(rule.lhs)}, {"rhs", rhs}};
}

inline bool load_theory(const RunConfig& cfg, Theory& theory, std::ostream& err) {
  std::ifstream in(cfg.theory_path);
  if (!in) {
    err << "error: cannot read theory file " << cfg.theory_path << "\n";
    return false;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  theory = parse_theory_text(buf.str());
  return true;
}

inline std::optional<Query> parse_query_text(const std::string& text) {
  std::vector<Token> toks;
  try {
    toks = tokenize(text);
  } catch (const TheoryError&) {
    return std::nullopt;
  }
  // Node : < a1 a2 ... > End
  size_t i = 0;
  if (toks[i].kind != TokenKind::NodeName) return std::nullopt;
  Query q;
  q.node = toks[i++].text;
  if (toks[i].kind != TokenKind::Colon) return std::nullopt;
  ++i;
  if (toks[i].kind != TokenKind::PathOpen) return std::nullopt;
  ++i;
  while (toks[i].kind == TokenKind::AtomText) q.path.push_back(toks[i++].text);
  if (toks[i].kind != TokenKind::PathClose) return std::nullopt;
  ++i;
  if (toks[i].kind != TokenKind::End) return std::nullopt;
  return q;
}

inline int cmd_check(const RunConfig& cfg, bool dump_rules, std::ostream& out,
                     std::ostream& err) {
  Theory theory;
  if (!load_theory(cfg, theory, err)) return kExitTheoryError;
  std::vector<Diagnostic> diags = validate_theory(theory);
  RuleSet rules = compile(theory);
  const auto nodes = theory.node_names();
  if (cfg.format == "json") {
    json j{{"nodes", nodes.size()},
           {"sentences", theory.sentences().size()},
           {"rules", rules.rules.size()}};
    json paths = json::object();
    for (const auto& n : nodes) {
      json list = json::array();
      for (const auto& p : theory.paths_at(n)) list.push_back(path_json(p));
      paths[n] = list;
    }
    j["paths"] = paths;
    json warnings = json::array();
    for (const auto& d : diags) warnings.push_back(d.kind + ": " + d.message);
    j["warnings"] = warnings;
    if (dump_rules) {
      json rs = json::array();
      for (const auto& r : rules.rules) rs.push_back(rule_json(r));
      j["productions"] = rs;
    }
    out << j.dump(2) << "\n";
  } else {
    out << nodes.size() << " nodes, " << theory.sentences().size()
        << " sentences, " << rules.rules.size() << " rules\n";
    for (const auto& n : nodes) {
      out << n << ":";
      for (const auto& p : theory.paths_at(n)) out << ' ' << path_to_string(p);
      out << "\n";
    }
    for (const auto& d : diags) err << "warning: " << d.message << "\n";
    if (dump_rules)
      for (const auto& r : rules.rules) out << rule_to_string(r) << "\n";
  }
  return kExitOk;
}

inline int cmd_query(const RunConfig& cfg, const std::string& query_text,
                     std::ostream& out, std::ostream& err) {
  auto q = parse_query_text(query_text);
  if (!q) {
    err << "error: malformed query '" << query_text
        << "' (expected Node:<a1 a2 ...>)\n";
    return kExitUsage;
  }
  Theory theory;
  if (!load_theory(cfg, theory, err)) return kExitTheoryError;
  std::vector<std::string> trace_lines;
  EvalResult r = eval_query(theory, *q, cfg.limits(),
                            cfg.trace == "forward" ? &trace_lines : nullptr);
  for (const auto& line : trace_lines) err << line << "\n";
  if (cfg.format == "json") {
    json j{{"query", query_to_string(*q)}};
    if (r.status == EvalStatus::Value)
      j["value"] = r.value;
    else
      j["status"] =
          r.status == EvalStatus::Undefined ? "UNDEFINED" : "LIMIT";
    out << j.dump() << "\n";
  } else {
    if (r.status == EvalStatus::Value)
      out << r.value_text() << "\n";
    else
      out << (r.status == EvalStatus::Undefined ? "UNDEFINED" : "LIMIT") << "\n";
  }
  return kExitOk;
}

inline int cmd_rquery(const RunConfig& cfg, const std::vector<std::string>& atoms,
                      std::ostream& out, std::ostream& err) {
  Theory theory;
  if (!load_theory(cfg, theory, err)) return kExitTheoryError;
  RuleSet rules = compile(theory);
  ChartTraceSink sink = nullptr;
  if (cfg.trace == "chart")
    sink = [&err](const ChartTraceEvent& ev) {
      json j{{"proc", ev.proc},     {"span", {ev.v1, ev.v2}},
             {"rule", ev.rule_id},  {"item", ev.item_id},
             {"suffix", ev.suffix}, {"constraint", ev.constraint}};
      err << j.dump() << "\n";
    };
  ReverseResult rr = reverse_query(rules, atoms, cfg.limits(), sink);
  if (cfg.format == "json") {
    json j{{"value", atoms}};
    json answers = json::array();
    for (const auto& a : rr.answers) answers.push_back(answer_json(a));
    j["answers"] = answers;
    j["suppressed"] = rr.chart.suppressed;
    j["warnings"] = rr.diagnostics;
    out << j.dump(2) << "\n";
  } else {
    for (const auto& d : rr.diagnostics) err << "warning: " << d << "\n";
    for (const auto& a : rr.answers) out << answer_to_string(a) << "\n";
  }
  return kExitOk;
}

inline int cmd_crosscheck(const RunConfig& cfg, int max_len, std::ostream& out,
                          std::ostream& err) {
  Theory theory;
  if (!load_theory(cfg, theory, err)) return kExitTheoryError;
  RuleSet rules = compile(theory);
  CrossCheckReport report = cross_check(rules, max_len, cfg.limits());
  if (cfg.format == "json") {
    json j{{"enumerated", report.enumerated},
           {"defined", report.defined},
           {"excluded", report.excluded},
           {"values", report.values},
           {"violations", report.violations},
           {"misses", report.misses},
           {"suppressed", report.suppressed_items}};
    out << j.dump(2) << "\n";
  } else {
    out << report.enumerated << " queries enumerated, " << report.defined
        << " defined, " << report.excluded << " excluded (limits), "
        << report.values << " distinct values\n";
    out << report.violations.size() << " soundness violation(s), "
        << report.misses.size() << " completeness miss(es), "
        << report.suppressed_items << " suppressed item(s)\n";
    for (const auto& v : report.violations) out << "violation: " << v << "\n";
    for (const auto& m : report.misses) out << "miss: " << m << "\n";
  }
  return report.ok() ? kExitOk : kExitCrossCheck;
}

}  // namespace cli_detail

// Command-line front end; returns the process exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"DATR lexical-representation engine: forward and reverse queries"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("DATR_MAX_PATH_LEN")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) cfg.max_path_len = static_cast<int>(v);
  }
  app.add_option("--theory", cfg.theory_path, "DATR theory file")->required();
  app.add_option("--max-path-len", cfg.max_path_len, "path length bound")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-depth", cfg.max_depth, "forward recursion bound")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--trace", cfg.trace, "trace stream")
      ->check(CLI::IsMember({"chart", "forward"}));

  app.fallthrough();
  bool dump_rules = false;
  auto* check = app.add_subcommand("check", "parse, validate and compile");
  check->fallthrough();
  check->add_flag("--dump-rules", dump_rules, "print the backbone productions");

  std::string query_text;
  auto* query = app.add_subcommand("query", "evaluate a standard query");
  query->fallthrough();
  query->add_option("query", query_text, "query Node:<a1 a2 ...>")->required();

  std::vector<std::string> value_atoms;
  bool empty_value = false;
  auto* rquery = app.add_subcommand("rquery", "evaluate a reverse query");
  rquery->fallthrough();
  rquery->add_option("atoms", value_atoms, "value atoms");
  rquery->add_flag("--empty", empty_value, "query the empty value");

  int max_len = 4;
  auto* crosscheck =
      app.add_subcommand("crosscheck", "forward/reverse consistency oracle");
  crosscheck->fallthrough();
  crosscheck->add_option("--max-len", max_len, "query path length bound")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (check->parsed()) return cli_detail::cmd_check(cfg, dump_rules, out, err);
    if (query->parsed()) return cli_detail::cmd_query(cfg, query_text, out, err);
    if (rquery->parsed()) {
      if (value_atoms.empty() && !empty_value) {
        err << "error: no value atoms given (use --empty for the empty value)\n";
        return kExitUsage;
      }
      return cli_detail::cmd_rquery(cfg, value_atoms, out, err);
    }
    if (crosscheck->parsed())
      return cli_detail::cmd_crosscheck(cfg, max_len, out, err);
  } catch (const TheoryError& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return kExitTheoryError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitTheoryError;
  }
  return kExitUsage;
}

}  // namespace datr
