#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "datr/core.hpp"

namespace datr {

// Raw suffix-set: every s with prefix^s in `set`, including the empty
// suffix when prefix itself is a member.
inline std::set<AttrPath> suffix_set(const AttrPath& prefix,
                                     const std::set<AttrPath>& set) {
  std::set<AttrPath> out;
  for (const auto& p : set)
    if (is_prefix(prefix, p)) out.insert(strip_prefix(prefix, p));
  return out;
}

class UnknownNodeError : public std::runtime_error {
 public:
  explicit UnknownNodeError(const std::string& node)
      : std::runtime_error("unknown node " + node) {}
};

// C(P, N, theta): the suffix-set of P over the paths defined at N, with
// the empty suffix removed (an extension is diverted only by a strictly
// longer defined path).
inline ConstraintSet path_constraint(const AttrPath& path,
                                     const std::string& node,
                                     const Theory& theory) {
  if (!theory.defines_node(node)) throw UnknownNodeError(node);
  std::set<AttrPath> raw = suffix_set(path, theory.paths_at(node));
  raw.erase(AttrPath{});
  return raw;
}

// A fully concrete extension satisfies C iff no element of C is a prefix
// of it.
inline bool satisfies(const AttrPath& extension, const ConstraintSet& c) {
  for (const auto& e : c)
    if (is_prefix(e, extension)) return false;
  return true;
}

struct SatisfyOutcome {
  bool ok = false;
  ConstraintSet residual;  // deferred obligations for an open tail
};

// Satisfaction check for an extension that is only concretely known up to
// `concrete` with an open continuation: fails outright when an element of
// C prefixes the concrete part, otherwise defers sigma(concrete, C) onto
// the continuation.
inline SatisfyOutcome satisfies_open(const AttrPath& concrete,
                                     const ConstraintSet& c) {
  SatisfyOutcome out;
  for (const auto& e : c) {
    if (is_prefix(e, concrete)) return out;  // ok = false
    if (is_prefix(concrete, e)) out.residual.insert(strip_prefix(concrete, e));
  }
  out.ok = true;
  return out;
}

// --- context-free backbone over nonterminal quintuples ---

// A node slot is a concrete node name or a variable.
struct NodeSlot {
  std::string name;
  int var = -1;

  bool is_var() const { return var >= 0; }
  static NodeSlot concrete(std::string n) { return {std::move(n), -1}; }
  static NodeSlot variable(int id) { return {{}, id}; }
  bool operator==(const NodeSlot& o) const {
    return var == o.var && name == o.name;
  }
};

// A path term is a concrete atom sequence optionally continued by an open
// tail variable. A wholly unknown path is the empty sequence plus a tail.
struct PathTerm {
  AttrPath atoms;
  int tail = -1;

  bool open() const { return tail >= 0; }
  static PathTerm closed(AttrPath p) { return {std::move(p), -1}; }
  static PathTerm variable(int id) { return {{}, id}; }
  static PathTerm with_tail(AttrPath p, int id) { return {std::move(p), id}; }
  bool operator==(const PathTerm& o) const {
    return tail == o.tail && atoms == o.atoms;
  }
};

// The ordered set [N, P, C, N', P']: local node and path, the path
// extension constraint, and the global environment. `quoted_node` marks
// the image of a quoted node descriptor, whose local and global slot are
// one shared term standing for globalPath^extension; matching such an
// image decides how the item path splits between the two.
struct NonTerminal {
  NodeSlot local_node;
  PathTerm local_path;
  ConstraintSet constraint;
  NodeSlot global_node;
  PathTerm global_path;
  bool quoted_node = false;

  bool operator==(const NonTerminal& o) const {
    return local_node == o.local_node && local_path == o.local_path &&
           constraint == o.constraint && global_node == o.global_node &&
           global_path == o.global_path && quoted_node == o.quoted_node;
  }
};

struct RuleSym {
  bool is_atom = false;
  Atom atom;
  NonTerminal nt;

  static RuleSym terminal(Atom a) {
    RuleSym s;
    s.is_atom = true;
    s.atom = std::move(a);
    return s;
  }
  static RuleSym nonterminal(NonTerminal n) {
    RuleSym s;
    s.nt = std::move(n);
    return s;
  }
};

// Variable ids local to one rule. Node variables and tail variables are
// numbered separately; tail variables double as path variables.
struct Rule {
  NonTerminal lhs;
  std::vector<RuleSym> rhs;
  int sentence_index = -1;
  int node_vars = 0;
  int tail_vars = 0;
};

// Per-rule variable layout used by the mapping rules below.
constexpr int kGlobalNodeVar = 0;  // node variable N'
constexpr int kGlobalPathVar = 0;  // tail variable P'
constexpr int kExtensionVar = 1;   // shared extension suffix of the rule body

struct RuleSet {
  Theory theory;
  std::vector<Rule> rules;
  std::map<Atom, std::vector<int>> by_terminal;
  std::map<std::string, std::vector<int>> by_local_node;
  std::vector<int> var_headed;
  std::vector<int> epsilon_rules;
};

namespace detail {

// Image of one rhs descriptor under the mapping rules. The shared
// extension tail threads the sentence's query suffix through every
// descriptor; quoted descriptors write the same term into both the local
// and the global slot, so an extension found while matching the local
// path carries over to the rebound global environment.
inline RuleSym descriptor_image(const Sentence& s, const Descriptor& d,
                                const ConstraintSet& c0) {
  const NodeSlot gn = NodeSlot::variable(kGlobalNodeVar);
  const PathTerm gp = PathTerm::variable(kGlobalPathVar);
  auto ext = [](const AttrPath& p) {
    return PathTerm::with_tail(p, kExtensionVar);
  };
  switch (d.kind) {
    case DescriptorKind::AtomValue:
      return RuleSym::terminal(d.atom);
    case DescriptorKind::LocalNodePath:
      return RuleSym::nonterminal(
          {NodeSlot::concrete(d.node), ext(d.path), c0, gn, gp});
    case DescriptorKind::LocalNode:
      return RuleSym::nonterminal(
          {NodeSlot::concrete(d.node), ext(s.lhs_path), c0, gn, gp});
    case DescriptorKind::LocalPath:
      return RuleSym::nonterminal(
          {NodeSlot::concrete(s.node), ext(d.path), c0, gn, gp});
    case DescriptorKind::GlobalNodePath:
      return RuleSym::nonterminal({NodeSlot::concrete(d.node), ext(d.path), c0,
                                   NodeSlot::concrete(d.node), ext(d.path)});
    case DescriptorKind::GlobalNode:
      return RuleSym::nonterminal({NodeSlot::concrete(d.node), gp, c0,
                                   NodeSlot::concrete(d.node), gp, true});
    case DescriptorKind::GlobalPath:
      // The printed rule keeps the local node, but the worked expansion
      // (and standard semantics) hand the slot to the global node.
      return RuleSym::nonterminal({gn, ext(d.path), c0, gn, ext(d.path)});
    case DescriptorKind::EmptyValue:
      break;
  }
  return RuleSym::terminal("");  // unreachable; EmptyValue handled by caller
}

}  // namespace detail

// Apply the mapping rules to every sentence, producing one backbone
// production per sentence with its LHS constraint precomputed.
inline RuleSet compile(const Theory& theory) {
  RuleSet out;
  out.theory = theory;
  for (size_t i = 0; i < theory.sentences().size(); ++i) {
    const Sentence& s = theory.sentences()[i];
    const ConstraintSet c0 = path_constraint(s.lhs_path, s.node, theory);
    Rule rule;
    rule.sentence_index = static_cast<int>(i);
    rule.node_vars = 1;
    rule.tail_vars = 2;
    rule.lhs = {NodeSlot::concrete(s.node), PathTerm::closed(s.lhs_path), c0,
                NodeSlot::variable(kGlobalNodeVar),
                PathTerm::variable(kGlobalPathVar)};
    for (const auto& d : s.rhs) {
      if (d.kind == DescriptorKind::EmptyValue) continue;
      rule.rhs.push_back(detail::descriptor_image(s, d, c0));
    }
    const int id = static_cast<int>(out.rules.size());
    if (rule.rhs.empty()) {
      out.epsilon_rules.push_back(id);
    } else if (rule.rhs.front().is_atom) {
      out.by_terminal[rule.rhs.front().atom].push_back(id);
    } else if (rule.rhs.front().nt.local_node.is_var()) {
      out.var_headed.push_back(id);
    } else {
      out.by_local_node[rule.rhs.front().nt.local_node.name].push_back(id);
    }
    out.rules.push_back(std::move(rule));
  }
  return out;
}

// --- rendering ---

namespace detail {

class VarNames {
 public:
  std::string node(int id) { return mark(node_order_, id, "N"); }
  std::string path(int id) { return mark(path_order_, id, "P"); }

 private:
  static std::string mark(std::vector<int>& order, int id, const char* base) {
    size_t pos = 0;
    for (; pos < order.size(); ++pos)
      if (order[pos] == id) break;
    if (pos == order.size()) order.push_back(id);
    std::string out = base;
    for (size_t i = 0; i <= pos; ++i) out += '\'';
    return out;
  }
  std::vector<int> node_order_;
  std::vector<int> path_order_;
};

inline std::string node_slot_str(const NodeSlot& n, VarNames& names) {
  return n.is_var() ? names.node(n.var) : n.name;
}

// Rule style hides the shared extension tail (the paper's notation leaves
// it implicit) and prints the global-path variable by name.
inline std::string path_term_str(const PathTerm& p, VarNames& names,
                                 bool rule_style) {
  if (rule_style && p.atoms.empty() && p.tail == kGlobalPathVar)
    return names.path(p.tail);
  if (rule_style && p.tail == kExtensionVar) return path_to_string(p.atoms);
  std::string out = path_to_string(p.atoms);
  if (p.open()) out.insert(out.size() - 1, p.atoms.empty() ? "..." : " ...");
  return out;
}

inline std::string nonterminal_str(const NonTerminal& nt, VarNames& names,
                                   bool rule_style) {
  return "[" + node_slot_str(nt.local_node, names) + ", " +
         path_term_str(nt.local_path, names, rule_style) + ", " +
         constraint_to_string(nt.constraint) + ", " +
         node_slot_str(nt.global_node, names) + ", " +
         path_term_str(nt.global_path, names, rule_style) + "]";
}

}  // namespace detail

// One production in the paper's bracket notation, e.g.
// [House, <>, {<root>}, N', P'] -> [Noun, <>, {<root>}, N', P']
inline std::string rule_to_string(const Rule& rule) {
  detail::VarNames names;
  std::string out = detail::nonterminal_str(rule.lhs, names, true) + " ->";
  if (rule.rhs.empty()) {
    out += " epsilon";
    return out;
  }
  for (const auto& sym : rule.rhs) {
    out += ' ';
    out += sym.is_atom ? sym.atom : detail::nonterminal_str(sym.nt, names, true);
  }
  return out;
}

// Canonical alpha-renamed form; equal strings mean equal rules up to
// variable naming.
inline std::string rule_canonical_key(const Rule& rule) {
  return rule_to_string(rule);
}

}  // namespace datr
