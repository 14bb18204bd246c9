#pragma once

#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "datr/forward.hpp"
#include "datr/match.hpp"

namespace datr {

// A chart entry. Inactive items carry a completed analysis in `lhs` (the
// suffix already appended to the path); active items additionally carry
// the categories still to be proven and the suffix accumulated so far.
// Variables are canonically numbered per item; `obligations` holds the
// residual constraint set of each open tail.
struct ChartItem {
  int start = 0;
  int end = 0;
  bool active = false;
  NonTerminal lhs;
  std::vector<RuleSym> pending;
  PathTerm suffix;
  int node_vars = 0;
  int tail_vars = 0;
  std::map<int, ConstraintSet> obligations;
  int rule_id = -1;
  std::string key;
};

struct ChartTraceEvent {
  std::string proc;
  int v1 = 0;
  int v2 = 0;
  int rule_id = -1;
  int item_id = -1;
  std::string suffix;
  std::string constraint;
};

using ChartTraceSink = std::function<void(const ChartTraceEvent&)>;

struct Chart {
  std::vector<ChartItem> items;
  std::set<std::string> keys;
  std::map<int, std::vector<int>> inactive_by_start;
  std::map<int, std::vector<int>> active_by_end;
  long suppressed = 0;
};

// A start-symbol analysis of the whole input: a query whose forward value
// is the input, in canonical minimal form. An open extension stands for
// every continuation satisfying the forbidden set.
struct ReverseAnswer {
  std::string node;
  AttrPath path;
  bool open_extension = false;
  ConstraintSet forbidden;

  bool operator<(const ReverseAnswer& o) const {
    if (node != o.node) return node < o.node;
    if (path != o.path) return path < o.path;
    if (open_extension != o.open_extension) return open_extension < o.open_extension;
    return forbidden < o.forbidden;
  }
  bool operator==(const ReverseAnswer& o) const {
    return node == o.node && path == o.path &&
           open_extension == o.open_extension && forbidden == o.forbidden;
  }
};

inline std::string answer_to_string(const ReverseAnswer& a) {
  std::string out = a.node + ":" + path_to_string(a.path);
  if (a.open_extension) out += " +...";
  if (!a.forbidden.empty()) out += " !" + constraint_to_string(a.forbidden);
  return out;
}

namespace detail {

// Resolves slots through a bindings context and renumbers the surviving
// variables in traversal order, so alpha-equivalent items come out
// identical.
class ItemCanonicalizer {
 public:
  explicit ItemCanonicalizer(const Bindings& ctx) : ctx_(ctx) {}

  NodeSlot canon(const NodeSlot& s) {
    NodeSlot r = ctx_.resolve(s);
    if (!r.is_var()) return r;
    auto [it, fresh] = node_map_.try_emplace(r.var, next_node_);
    if (fresh) ++next_node_;
    return NodeSlot::variable(it->second);
  }

  PathTerm canon(const PathTerm& p) {
    PathTerm r = ctx_.resolve(p);
    if (!r.open()) return r;
    auto [it, fresh] = tail_map_.try_emplace(r.tail, next_tail_);
    if (fresh) {
      const ConstraintSet& o = ctx_.tail_obligations(r.tail);
      if (!o.empty()) obligations_[next_tail_] = o;
      ++next_tail_;
    }
    r.tail = it->second;
    return r;
  }

  NonTerminal canon(const NonTerminal& nt) {
    NonTerminal out;
    out.local_node = canon(nt.local_node);
    out.local_path = canon(nt.local_path);
    out.constraint = nt.constraint;
    out.global_node = canon(nt.global_node);
    out.global_path = canon(nt.global_path);
    out.quoted_node = nt.quoted_node;
    return out;
  }

  int node_vars() const { return next_node_; }
  int tail_vars() const { return next_tail_; }
  std::map<int, ConstraintSet> take_obligations() { return std::move(obligations_); }

 private:
  const Bindings& ctx_;
  std::map<int, int> node_map_;
  std::map<int, int> tail_map_;
  int next_node_ = 0;
  int next_tail_ = 0;
  std::map<int, ConstraintSet> obligations_;
};

inline void key_node(std::string& out, const NodeSlot& s) {
  if (s.is_var())
    out += "?" + std::to_string(s.var);
  else
    out += s.name;
}

inline void key_path(std::string& out, const PathTerm& p) {
  out += '<';
  for (const auto& a : p.atoms) {
    out += a;
    out += ' ';
  }
  if (p.open()) out += "~" + std::to_string(p.tail);
  out += '>';
}

inline void key_nt(std::string& out, const NonTerminal& nt) {
  out += nt.quoted_node ? "q[" : "[";
  key_node(out, nt.local_node);
  out += ',';
  key_path(out, nt.local_path);
  out += ',';
  out += constraint_to_string(nt.constraint);
  out += ',';
  key_node(out, nt.global_node);
  out += ',';
  key_path(out, nt.global_path);
  out += ']';
}

inline std::string item_key(const ChartItem& it) {
  std::string out = it.active ? "A" : "I";
  out += std::to_string(it.start) + ":" + std::to_string(it.end) + "|";
  key_nt(out, it.lhs);
  for (const auto& sym : it.pending) {
    out += '|';
    if (sym.is_atom)
      out += sym.atom;
    else
      key_nt(out, sym.nt);
  }
  out += "|S=";
  key_path(out, it.suffix);
  for (const auto& [tail, obls] : it.obligations) {
    out += "|O" + std::to_string(tail) + "=";
    out += constraint_to_string(obls);
  }
  return out;
}

}  // namespace detail

// Human-readable form, e.g. (0, 1, [House, <orth sing>, {<gen>}, House, P']).
inline std::string item_to_string(const ChartItem& it) {
  detail::VarNames names;
  auto path_str = [&](const PathTerm& p) {
    if (p.atoms.empty() && p.open()) return names.path(p.tail);
    std::string out = path_to_string(p.atoms);
    if (p.open()) out.insert(out.size() - 1, " ...");
    return out;
  };
  auto nt_str = [&](const NonTerminal& nt) {
    return "[" + detail::node_slot_str(nt.local_node, names) + ", " +
           path_str(nt.local_path) + ", " + constraint_to_string(nt.constraint) +
           ", " + detail::node_slot_str(nt.global_node, names) + ", " +
           path_str(nt.global_path) + "]";
  };
  std::string out = "(" + std::to_string(it.start) + ", " +
                    std::to_string(it.end) + ", " + nt_str(it.lhs);
  for (const auto& sym : it.pending)
    out += ", " + (sym.is_atom ? sym.atom : nt_str(sym.nt));
  if (it.active) out += ", " + path_str(it.suffix);
  out += ")";
  return out;
}

namespace detail {

class ReverseEngine {
 public:
  ReverseEngine(const RuleSet& rules, std::vector<Atom> input,
                const EvalLimits& limits, const ChartTraceSink& trace)
      : rules_(rules), input_(std::move(input)), limits_(limits), trace_(trace) {}

  Chart run() {
    seed();
    size_t cursor = 0;
    while (cursor < chart_.items.size()) {
      const int id = static_cast<int>(cursor);
      ++cursor;
      if (chart_.items[static_cast<size_t>(id)].active) {
        process_active(id);
      } else {
        process_inactive(id);
      }
    }
    return std::move(chart_);
  }

 private:
  void emit(const char* proc, int v1, int v2, int rule_id, int item_id,
            const PathTerm& suffix, const ConstraintSet& constraint) {
    if (!trace_) return;
    std::string s;
    key_path(s, suffix);
    trace_({proc, v1, v2, rule_id, item_id, s, constraint_to_string(constraint)});
  }

  // Epsilon productions yield zero-width inactive items at every vertex;
  // their extension stays open (extending an empty-value sentence still
  // evaluates to the empty value). Terminal rules seed directly from the
  // input atoms.
  void seed() {
    const int n = static_cast<int>(input_.size());
    for (int v = 0; v <= n; ++v) {
      for (int rid : rules_.epsilon_rules) seed_rule(rid, v, v);
      if (v < n) {
        auto it = rules_.by_terminal.find(input_[static_cast<size_t>(v)]);
        if (it != rules_.by_terminal.end())
          for (int rid : it->second) seed_rule(rid, v, v + 1);
      }
    }
  }

  void seed_rule(int rule_id, int v1, int v2) {
    const Rule& rule = rules_.rules[static_cast<size_t>(rule_id)];
    Bindings ctx;
    VarMap vm = import_vars(ctx, rule.node_vars, rule.tail_vars);
    ctx.add_tail_obligations(vm.tails[kExtensionVar], rule.lhs.constraint);
    PathTerm suffix = PathTerm::variable(vm.tails[kExtensionVar]);
    std::vector<RuleSym> pending;
    for (size_t i = rule.rhs.empty() ? 0 : 1; i < rule.rhs.size(); ++i)
      pending.push_back(apply_vm(rule.rhs[i], vm));
    emit(rule.rhs.empty() ? "add-epsilon" : "reduce", v1, v2, rule_id, -1,
         suffix, rule.lhs.constraint);
    add_item(v1, v2, vm.apply(rule.lhs), std::move(pending), suffix, ctx, rule_id);
  }

  static RuleSym apply_vm(const RuleSym& sym, const VarMap& vm) {
    if (sym.is_atom) return sym;
    return RuleSym::nonterminal(vm.apply(sym.nt));
  }

  void process_inactive(int item_id) {
    reduce_item(item_id);
    const ChartItem& it = chart_.items[static_cast<size_t>(item_id)];
    auto ait = chart_.active_by_end.find(it.start);
    if (ait == chart_.active_by_end.end()) return;
    // Pair only with earlier-stored items; later ones will pair back.
    std::vector<int> actives = ait->second;
    for (int aid : actives)
      if (aid < item_id) complete_pair(aid, item_id);
  }

  void process_active(int item_id) {
    const ChartItem it = chart_.items[static_cast<size_t>(item_id)];
    if (it.pending.front().is_atom) {
      const int v = it.end;
      if (v < static_cast<int>(input_.size()) &&
          input_[static_cast<size_t>(v)] == it.pending.front().atom)
        complete_terminal(item_id);
      return;
    }
    auto iit = chart_.inactive_by_start.find(it.end);
    if (iit == chart_.inactive_by_start.end()) return;
    std::vector<int> inactives = iit->second;
    for (int iid : inactives)
      if (iid < item_id) complete_pair(item_id, iid);
  }

  // Searches the rules for a body that starts with this item's category.
  void reduce_item(int item_id) {
    const ChartItem it = chart_.items[static_cast<size_t>(item_id)];
    std::vector<int> candidates;
    auto nit = chart_local_node_rules(it.lhs.local_node.name);
    candidates.insert(candidates.end(), nit.begin(), nit.end());
    candidates.insert(candidates.end(), rules_.var_headed.begin(),
                      rules_.var_headed.end());
    for (int rid : candidates) {
      const Rule& rule = rules_.rules[static_cast<size_t>(rid)];
      Bindings ctx;
      VarMap vm_item = import_vars(ctx, it.node_vars, it.tail_vars, it.obligations);
      VarMap vm_rule = import_vars(ctx, rule.node_vars, rule.tail_vars);
      NonTerminal cat = vm_item.apply(it.lhs);
      NonTerminal head = vm_rule.apply(rule.rhs.front().nt);
      for (auto& br : match_nonterminal(head, cat, ctx)) {
        // A quoted-node head does not carry the rule's extension tail, so
        // sibling categories pick up the suffix through an explicit bind.
        if (head.quoted_node &&
            !br.bindings.unify_paths(
                PathTerm::variable(vm_rule.tails[kExtensionVar]),
                br.result.suffix))
          continue;
        PathTerm suffix = br.bindings.resolve(br.result.suffix);
        ConstraintSet field =
            residual_constraint(suffix.atoms, rule.lhs.constraint);
        field.insert(br.result.constraint.begin(), br.result.constraint.end());
        NonTerminal lhs = vm_rule.apply(rule.lhs);
        lhs.constraint = field;
        std::vector<RuleSym> pending;
        for (size_t i = 1; i < rule.rhs.size(); ++i)
          pending.push_back(apply_vm(rule.rhs[i], vm_rule));
        emit("reduce", it.start, it.end, rid, item_id, suffix, field);
        add_item(it.start, it.end, lhs, std::move(pending), suffix, br.bindings,
                 rid);
      }
    }
  }

  const std::vector<int>& chart_local_node_rules(const std::string& node) const {
    static const std::vector<int> kEmpty;
    auto it = rules_.by_local_node.find(node);
    return it == rules_.by_local_node.end() ? kEmpty : it->second;
  }

  // Combines an active item with an inactive item at its end vertex. The
  // pending category carries the stored suffix's tail, so matching the
  // child extends the stored suffix in the same step; a closed stored
  // suffix admits only children that add nothing.
  void complete_pair(int active_id, int inactive_id) {
    const ChartItem act = chart_.items[static_cast<size_t>(active_id)];
    const ChartItem inact = chart_.items[static_cast<size_t>(inactive_id)];
    if (act.pending.front().is_atom) return;
    if (act.end != inact.start) return;
    Bindings ctx;
    VarMap vm_a = import_vars(ctx, act.node_vars, act.tail_vars, act.obligations);
    VarMap vm_i =
        import_vars(ctx, inact.node_vars, inact.tail_vars, inact.obligations);
    NonTerminal head = vm_a.apply(act.pending.front().nt);
    NonTerminal cat = vm_i.apply(inact.lhs);
    PathTerm stored = vm_a.apply(act.suffix);
    for (auto& br : match_nonterminal(head, cat, ctx)) {
      if (head.quoted_node) {
        // The pending category does not share the stored suffix's tail;
        // unify the two suffixes explicitly.
        if (!br.bindings.unify_paths(stored, br.result.suffix)) continue;
      } else if (!act.suffix.open() && !br.result.suffix.atoms.empty()) {
        continue;
      }
      PathTerm unified = br.bindings.resolve(stored);
      if (!is_prefix(act.suffix.atoms, unified.atoms)) continue;
      AttrPath delta = strip_prefix(act.suffix.atoms, unified.atoms);
      ConstraintSet field = residual_constraint(delta, act.lhs.constraint);
      field.insert(br.result.constraint.begin(), br.result.constraint.end());
      NonTerminal lhs = vm_a.apply(act.lhs);
      lhs.constraint = field;
      std::vector<RuleSym> pending(act.pending.begin() + 1, act.pending.end());
      std::vector<RuleSym> renamed;
      for (const auto& sym : pending) renamed.push_back(apply_vm(sym, vm_a));
      emit("complete", act.start, inact.end, act.rule_id, inactive_id, unified,
           field);
      add_item(act.start, inact.end, lhs, std::move(renamed), unified,
               br.bindings, act.rule_id);
    }
  }

  // A pending terminal is consumed by the matching input atom; terminals
  // match with an arbitrary suffix, so the stored suffix is untouched.
  void complete_terminal(int active_id) {
    const ChartItem act = chart_.items[static_cast<size_t>(active_id)];
    Bindings ctx;
    VarMap vm = import_vars(ctx, act.node_vars, act.tail_vars, act.obligations);
    std::vector<RuleSym> pending;
    for (size_t i = 1; i < act.pending.size(); ++i)
      pending.push_back(apply_vm(act.pending[i], vm));
    emit("complete", act.start, act.end + 1, act.rule_id, -1,
         vm.apply(act.suffix), act.lhs.constraint);
    add_item(act.start, act.end + 1, vm.apply(act.lhs), std::move(pending),
             vm.apply(act.suffix), ctx, act.rule_id);
  }

  // The chart-modifying operation: canonicalize, dedup, store. An item
  // with no pending categories becomes inactive with the suffix appended
  // to its path; the path-length bound is applied here.
  void add_item(int v1, int v2, NonTerminal lhs, std::vector<RuleSym> pending,
                PathTerm suffix, const Bindings& ctx, int rule_id) {
    ChartItem item;
    item.start = v1;
    item.end = v2;
    item.rule_id = rule_id;
    detail::ItemCanonicalizer canon(ctx);
    if (pending.empty()) {
      item.active = false;
      PathTerm s = ctx.resolve(suffix);
      PathTerm full{concat(ctx.resolve(lhs.local_path).atoms, s.atoms), s.tail};
      if (static_cast<int>(full.atoms.size()) > limits_.max_path_len) {
        ++chart_.suppressed;
        return;
      }
      NonTerminal final_lhs = lhs;
      final_lhs.local_path = full;
      item.lhs = canon.canon(final_lhs);
      item.suffix = PathTerm::closed({});
    } else {
      item.active = true;
      PathTerm s = ctx.resolve(suffix);
      if (static_cast<int>(s.atoms.size()) > limits_.max_path_len) {
        ++chart_.suppressed;
        return;
      }
      item.lhs = canon.canon(lhs);
      for (const auto& sym : pending) {
        if (sym.is_atom) {
          item.pending.push_back(sym);
        } else {
          item.pending.push_back(RuleSym::nonterminal(canon.canon(sym.nt)));
        }
      }
      item.suffix = canon.canon(suffix);
    }
    item.node_vars = canon.node_vars();
    item.tail_vars = canon.tail_vars();
    item.obligations = canon.take_obligations();
    item.key = detail::item_key(item);
    if (!chart_.keys.insert(item.key).second) return;
    const int id = static_cast<int>(chart_.items.size());
    if (item.active) {
      chart_.active_by_end[item.end].push_back(id);
    } else {
      chart_.inactive_by_start[item.start].push_back(id);
    }
    emit("add-item", v1, v2, rule_id, id, item.suffix, item.lhs.constraint);
    chart_.items.push_back(std::move(item));
  }

  const RuleSet& rules_;
  std::vector<Atom> input_;
  EvalLimits limits_;
  ChartTraceSink trace_;
  Chart chart_;
};

}  // namespace detail

// Saturates the chart for `value`; pure given (rules, value, limits).
inline Chart parse_value(const RuleSet& rules, const std::vector<Atom>& value,
                         const EvalLimits& limits = {},
                         const ChartTraceSink& trace = nullptr) {
  return detail::ReverseEngine(rules, value, limits, trace).run();
}

// Start-symbol answers: inactive items spanning the whole input whose
// global environment unifies with the local one. Closed answers already
// covered by an open answer are dropped.
inline std::vector<ReverseAnswer> extract_answers(const Chart& chart,
                                                  int input_len) {
  std::set<ReverseAnswer> out;
  auto it = chart.inactive_by_start.find(0);
  if (it == chart.inactive_by_start.end()) return {};
  for (int id : it->second) {
    const ChartItem& item = chart.items[static_cast<size_t>(id)];
    if (item.end != input_len) continue;
    Bindings ctx;
    VarMap vm = import_vars(ctx, item.node_vars, item.tail_vars, item.obligations);
    NonTerminal nt = vm.apply(item.lhs);
    if (!ctx.unify_nodes(nt.global_node, nt.local_node)) continue;
    if (!ctx.unify_paths(nt.global_path, nt.local_path)) continue;
    NodeSlot node = ctx.resolve(nt.local_node);
    if (node.is_var()) continue;
    PathTerm path = ctx.resolve(nt.local_path);
    ReverseAnswer ans;
    ans.node = node.name;
    ans.path = path.atoms;
    ans.open_extension = path.open();
    if (path.open()) ans.forbidden = ctx.tail_obligations(path.tail);
    out.insert(std::move(ans));
  }
  std::vector<ReverseAnswer> result;
  for (const ReverseAnswer& a : out) {
    bool covered = false;
    if (!a.open_extension) {
      for (const ReverseAnswer& b : out) {
        if (!b.open_extension || b.node != a.node) continue;
        if (!is_prefix(b.path, a.path)) continue;
        if (satisfies(strip_prefix(b.path, a.path), b.forbidden)) covered = true;
      }
    }
    if (!covered) result.push_back(a);
  }
  return result;
}

struct ReverseResult {
  std::vector<ReverseAnswer> answers;
  Chart chart;
  std::vector<std::string> diagnostics;

  long suppressed() const { return chart.suppressed; }
};

// Runs the whole reverse query: bottom-up chart saturation over the value
// followed by start-symbol extraction. Atoms that are not terminals of
// the theory yield an empty result plus a diagnostic.
inline ReverseResult reverse_query(const RuleSet& rules,
                                   const std::vector<Atom>& value,
                                   const EvalLimits& limits = {},
                                   const ChartTraceSink& trace = nullptr) {
  ReverseResult out;
  const std::set<Atom> terminals = rules.theory.terminal_atoms();
  for (const auto& a : value)
    if (!terminals.count(a)) {
      out.diagnostics.push_back("unknown atom '" + a + "'");
      return out;
    }
  out.chart = parse_value(rules, value, limits, trace);
  out.answers = extract_answers(out.chart, static_cast<int>(value.size()));
  if (trace)
    for (size_t i = 0; i < out.chart.items.size(); ++i)
      trace({"chart-dump", out.chart.items[i].start, out.chart.items[i].end,
             out.chart.items[i].rule_id, static_cast<int>(i),
             item_to_string(out.chart.items[i]), ""});
  if (out.chart.suppressed > 0)
    out.diagnostics.push_back(std::to_string(out.chart.suppressed) +
                              " item(s) suppressed by the path-length bound");
  return out;
}

// All concrete queries an answer stands for, over `alphabet` up to
// `max_len` total path length.
inline std::set<Query> expand_answer(const ReverseAnswer& ans,
                                     const std::vector<Atom>& alphabet,
                                     int max_len) {
  std::set<Query> out;
  if (static_cast<int>(ans.path.size()) > max_len) return out;
  if (!ans.open_extension) {
    out.insert({ans.node, ans.path});
    return out;
  }
  const int room = max_len - static_cast<int>(ans.path.size());
  for (const auto& ext : enumerate_paths(alphabet, room))
    if (satisfies(ext, ans.forbidden)) out.insert({ans.node, concat(ans.path, ext)});
  return out;
}

}  // namespace datr
