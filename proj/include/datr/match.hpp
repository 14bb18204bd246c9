#pragma once

#include <cassert>
#include <optional>
#include <utility>
#include <vector>

#include "datr/backbone.hpp"

namespace datr {

// sigma over a constraint set; the empty suffix never survives because a
// successful satisfies check has already ruled the prefix itself out.
inline ConstraintSet residual_constraint(const AttrPath& prefix,
                                         const ConstraintSet& c) {
  ConstraintSet out = suffix_set(prefix, c);
  out.erase(AttrPath{});
  return out;
}

// Variable store for one match context. Node variables bind to node names
// or alias each other; tail variables bind to path terms and carry
// residual obligations (constraint sets deferred onto the unexplored part
// of a path). Contexts are small and copied on speculative branches.
class Bindings {
 public:
  int fresh_node() {
    nodes_.push_back({});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int fresh_tail(ConstraintSet obligations = {}) {
    tails_.push_back({});
    tails_.back().obligations = std::move(obligations);
    return static_cast<int>(tails_.size()) - 1;
  }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int tail_count() const { return static_cast<int>(tails_.size()); }

  NodeSlot resolve(NodeSlot s) const {
    while (s.is_var()) {
      const NodeEntry& e = nodes_[static_cast<size_t>(s.var)];
      if (e.alias >= 0) {
        s = NodeSlot::variable(e.alias);
      } else if (e.bound) {
        return NodeSlot::concrete(e.name);
      } else {
        return s;
      }
    }
    return s;
  }

  // Flattens bound tails; the result's tail is either closed or a final
  // unbound variable.
  PathTerm resolve(PathTerm p) const {
    while (p.open()) {
      const TailEntry& e = tails_[static_cast<size_t>(p.tail)];
      if (!e.bound) return p;
      p.atoms.insert(p.atoms.end(), e.value.atoms.begin(), e.value.atoms.end());
      p.tail = e.value.tail;
    }
    return p;
  }

  NonTerminal resolve(NonTerminal nt) const {
    nt.local_node = resolve(nt.local_node);
    nt.local_path = resolve(nt.local_path);
    nt.global_node = resolve(nt.global_node);
    nt.global_path = resolve(nt.global_path);
    return nt;
  }

  const ConstraintSet& tail_obligations(int id) const {
    PathTerm rep = resolve(PathTerm::variable(id));
    static const ConstraintSet kEmpty;
    if (!rep.open()) return kEmpty;
    return tails_[static_cast<size_t>(rep.tail)].obligations;
  }

  // Adds obligations to a tail; a tail already bound re-checks its value.
  bool add_tail_obligations(int id, const ConstraintSet& c) {
    if (c.empty()) return true;
    PathTerm rep = resolve(PathTerm::variable(id));
    SatisfyOutcome so = satisfies_open(rep.atoms, c);
    if (!so.ok) return false;
    if (rep.open()) {
      auto& target = tails_[static_cast<size_t>(rep.tail)].obligations;
      target.insert(so.residual.begin(), so.residual.end());
    }
    return true;
  }

  // Binds an unbound tail, checking its obligations against the value's
  // concrete part and deferring the remainder onto the value's own tail.
  bool bind_tail(int id, PathTerm value) {
    PathTerm self = resolve(PathTerm::variable(id));
    assert(self.open() && self.atoms.empty());
    id = self.tail;
    value = resolve(value);
    if (value.open() && value.tail == id) return value.atoms.empty();
    TailEntry& e = tails_[static_cast<size_t>(id)];
    SatisfyOutcome so = satisfies_open(value.atoms, e.obligations);
    if (!so.ok) return false;
    if (value.open() && !so.residual.empty())
      if (!add_tail_obligations(value.tail, so.residual)) return false;
    e.bound = true;
    e.value = std::move(value);
    e.obligations.clear();
    return true;
  }

  bool unify_nodes(const NodeSlot& a0, const NodeSlot& b0) {
    NodeSlot a = resolve(a0), b = resolve(b0);
    if (!a.is_var() && !b.is_var()) return a.name == b.name;
    if (a.is_var() && b.is_var()) {
      if (a.var != b.var) nodes_[static_cast<size_t>(a.var)].alias = b.var;
      return true;
    }
    if (a.is_var()) {
      nodes_[static_cast<size_t>(a.var)].bound = true;
      nodes_[static_cast<size_t>(a.var)].name = b.name;
    } else {
      nodes_[static_cast<size_t>(b.var)].bound = true;
      nodes_[static_cast<size_t>(b.var)].name = a.name;
    }
    return true;
  }

  bool unify_paths(const PathTerm& a0, const PathTerm& b0) {
    PathTerm a = resolve(a0), b = resolve(b0);
    if (a.atoms.size() > b.atoms.size()) std::swap(a, b);
    if (!is_prefix(a.atoms, b.atoms)) return false;
    AttrPath rest = strip_prefix(a.atoms, b.atoms);
    if (a.open()) {
      if (b.open() && a.tail == b.tail) return rest.empty();
      return bind_tail(a.tail, PathTerm{std::move(rest), b.tail});
    }
    if (!rest.empty()) return false;
    if (b.open()) return bind_tail(b.tail, PathTerm::closed({}));
    return true;
  }

 private:
  struct NodeEntry {
    int alias = -1;
    bool bound = false;
    std::string name;
  };
  struct TailEntry {
    bool bound = false;
    PathTerm value;
    ConstraintSet obligations;
  };
  std::vector<NodeEntry> nodes_;
  std::vector<TailEntry> tails_;
};

// Offsets for importing the variables of a stored rule or item into a
// match context.
struct VarMap {
  std::vector<int> nodes;
  std::vector<int> tails;

  NodeSlot apply(NodeSlot s) const {
    if (s.is_var()) s.var = nodes[static_cast<size_t>(s.var)];
    return s;
  }
  PathTerm apply(PathTerm p) const {
    if (p.open()) p.tail = tails[static_cast<size_t>(p.tail)];
    return p;
  }
  NonTerminal apply(NonTerminal nt) const {
    nt.local_node = apply(nt.local_node);
    nt.local_path = apply(nt.local_path);
    nt.global_node = apply(nt.global_node);
    nt.global_path = apply(nt.global_path);
    return nt;
  }
};

inline VarMap import_vars(Bindings& b, int node_vars, int tail_vars,
                          const std::map<int, ConstraintSet>& obligations = {}) {
  VarMap vm;
  for (int i = 0; i < node_vars; ++i) vm.nodes.push_back(b.fresh_node());
  for (int i = 0; i < tail_vars; ++i) {
    auto it = obligations.find(i);
    vm.tails.push_back(
        b.fresh_tail(it == obligations.end() ? ConstraintSet{} : it->second));
  }
  return vm;
}

// Suffix and constraint resulting from one successful match. The suffix's
// obligations live in the bindings context that produced it.
struct MatchResult {
  PathTerm suffix;
  ConstraintSet constraint;
};

struct MatchBranch {
  Bindings bindings;
  MatchResult result;
};

// Terminals match by text equality, with an arbitrary suffix and an empty
// constraint.
inline std::optional<MatchResult> match_terminal(const Atom& t1, const Atom& t2,
                                                 Bindings& b) {
  if (t1 != t2) return std::nullopt;
  return MatchResult{PathTerm::variable(b.fresh_tail()), {}};
}

// Matches a rule-side nonterminal against an item-side nonterminal.
//
// Node slots and global environments unify; the local paths relate by
// extension in one of two directions: the item extends the rule path
// (suffix = the leftover, constraint = the item's), or the rule path
// extends the item path (suffix empty, constraint = the residual
// sigma(leftover, item constraint)). Open tails absorb leftover atoms and
// inherit residual obligations.
//
// A rule-side local path that is the bare global-path variable (the image
// of a quoted node descriptor) splits the item path between the global
// path and the suffix; every representable split is returned as its own
// branch.
inline std::vector<MatchBranch> match_nonterminal(const NonTerminal& rule_side,
                                                  const NonTerminal& item_side,
                                                  const Bindings& base) {
  std::vector<MatchBranch> out;
  Bindings ctx = base;
  if (!ctx.unify_nodes(rule_side.local_node, item_side.local_node)) return out;
  if (!ctx.unify_nodes(rule_side.global_node, item_side.global_node)) return out;

  PathTerm rule_path = ctx.resolve(rule_side.local_path);
  const ConstraintSet& c1 = rule_side.constraint;
  const ConstraintSet& c2 = item_side.constraint;

  // Quoted-node image: the shared term stands for globalPath^extension,
  // so the item's local and global paths must coincide, and what remains
  // after the committed global-path prefix splits between the rest of the
  // global path and the suffix. Every representable split becomes its own
  // branch.
  if (rule_side.quoted_node) {
    if (!ctx.unify_paths(item_side.local_path, item_side.global_path)) return out;
    // Commit the already-known part of the global path against the item.
    const int probe = ctx.fresh_tail();
    if (!ctx.unify_paths(PathTerm{rule_path.atoms, probe},
                         item_side.local_path))
      return out;
    PathTerm leftover = ctx.resolve(PathTerm::variable(probe));
    auto push_branch = [&](Bindings branch, PathTerm suffix) {
      SatisfyOutcome so = satisfies_open(suffix.atoms, c1);
      if (!so.ok) return;
      if (suffix.open() && !so.residual.empty())
        if (!branch.add_tail_obligations(suffix.tail, so.residual)) return;
      MatchResult mr{branch.resolve(suffix), c2};
      out.push_back({std::move(branch), std::move(mr)});
    };
    if (!rule_path.open()) {
      // Global path fully known: the whole leftover is the suffix.
      push_branch(ctx, leftover);
      return out;
    }
    const size_t n = leftover.atoms.size();
    for (size_t k = 0; k <= n; ++k) {
      Bindings branch = ctx;
      AttrPath head(leftover.atoms.begin(),
                    leftover.atoms.begin() + static_cast<long>(k));
      if (!branch.bind_tail(rule_path.tail, PathTerm::closed(std::move(head))))
        continue;
      push_branch(std::move(branch),
                  PathTerm{AttrPath(leftover.atoms.begin() + static_cast<long>(k),
                                    leftover.atoms.end()),
                           leftover.tail});
    }
    if (leftover.open()) {
      // Global path absorbs the whole item path, extension pinned empty.
      Bindings branch = ctx;
      if (branch.bind_tail(rule_path.tail, leftover))
        push_branch(std::move(branch), PathTerm::closed({}));
      // Global path and extension grow together: sound whenever the item
      // family is unconstrained, since any doubled extension stays inside
      // it.
      if (ctx.tail_obligations(leftover.tail).empty() && c2.empty()) {
        Bindings branch2 = ctx;
        int shared = branch2.fresh_tail();
        if (branch2.bind_tail(rule_path.tail, PathTerm{leftover.atoms, shared}))
          push_branch(std::move(branch2), PathTerm::variable(shared));
      }
    }
    return out;
  }

  PathTerm item_path = ctx.resolve(item_side.local_path);
  PathTerm suffix;
  ConstraintSet result_constraint;
  if (item_path.atoms.size() >= rule_path.atoms.size() &&
      is_prefix(rule_path.atoms, item_path.atoms)) {
    // Item extends (or equals) the rule path.
    AttrPath rest = strip_prefix(rule_path.atoms, item_path.atoms);
    suffix = PathTerm{rest, item_path.tail};
    if (rule_path.open()) {
      if (item_path.open() && item_path.tail == rule_path.tail) {
        if (!rest.empty()) return out;
      } else if (!ctx.bind_tail(rule_path.tail, suffix)) {
        return out;
      }
    }
    SatisfyOutcome so = satisfies_open(rest, c1);
    if (!so.ok) return out;
    if (suffix.open() && !so.residual.empty())
      if (!ctx.add_tail_obligations(suffix.tail, so.residual)) return out;
    result_constraint = c2;
  } else if (is_prefix(item_path.atoms, rule_path.atoms)) {
    // Rule path extends the item path by `d`.
    AttrPath d = strip_prefix(item_path.atoms, rule_path.atoms);
    SatisfyOutcome so = satisfies_open(d, c2);
    if (!so.ok) return out;
    result_constraint = so.residual;
    if (item_path.open()) {
      if (!ctx.bind_tail(item_path.tail, PathTerm{d, rule_path.tail})) return out;
      suffix = PathTerm{{}, rule_path.tail};
      if (suffix.open())
        if (!ctx.add_tail_obligations(suffix.tail, c1)) return out;
    } else {
      // Closed item: extension pinned to the empty suffix.
      if (rule_path.open())
        if (!ctx.bind_tail(rule_path.tail, PathTerm::closed({}))) return out;
      suffix = PathTerm::closed({});
    }
  } else {
    return out;
  }

  if (!ctx.unify_paths(rule_side.global_path, item_side.global_path)) return out;
  MatchResult mr{ctx.resolve(suffix), std::move(result_constraint)};
  out.push_back({std::move(ctx), std::move(mr)});
  return out;
}

// Explicit form of the shared-suffix requirement of sequence matching.
inline std::optional<PathTerm> unify_suffix(const PathTerm& s1, const PathTerm& s2,
                                            Bindings& b) {
  if (!b.unify_paths(s1, s2)) return std::nullopt;
  return b.resolve(s1);
}

struct SequenceSym {
  bool is_atom = false;
  Atom atom;
  NonTerminal nt;
};

// Element-wise matching of two equal-length sequences with one shared
// suffix; the result constraint is the union of the element constraints.
inline std::vector<MatchBranch> match_sequence(
    const std::vector<SequenceSym>& rule_seq,
    const std::vector<SequenceSym>& item_seq, const Bindings& base) {
  std::vector<MatchBranch> out;
  if (rule_seq.size() != item_seq.size()) return out;

  struct State {
    Bindings bindings;
    PathTerm suffix;
    ConstraintSet constraint;
    bool has_suffix = false;
  };
  std::vector<State> frontier{{base, {}, {}, false}};
  for (size_t i = 0; i < rule_seq.size(); ++i) {
    std::vector<State> next;
    for (auto& st : frontier) {
      const auto& rs = rule_seq[i];
      const auto& is = item_seq[i];
      if (rs.is_atom != is.is_atom) continue;
      if (rs.is_atom) {
        Bindings b2 = st.bindings;
        auto mr = match_terminal(rs.atom, is.atom, b2);
        if (!mr) continue;
        State st2{std::move(b2), st.suffix, st.constraint, st.has_suffix};
        if (!st2.has_suffix) {
          st2.suffix = mr->suffix;
          st2.has_suffix = true;
          next.push_back(std::move(st2));
        } else if (auto s = unify_suffix(st2.suffix, mr->suffix, st2.bindings)) {
          st2.suffix = *s;
          next.push_back(std::move(st2));
        }
        continue;
      }
      for (auto& br : match_nonterminal(rs.nt, is.nt, st.bindings)) {
        State st2{std::move(br.bindings), st.suffix, st.constraint, st.has_suffix};
        st2.constraint.insert(br.result.constraint.begin(),
                              br.result.constraint.end());
        if (!st2.has_suffix) {
          st2.suffix = br.result.suffix;
          st2.has_suffix = true;
          next.push_back(std::move(st2));
        } else if (auto s =
                       unify_suffix(st2.suffix, br.result.suffix, st2.bindings)) {
          st2.suffix = *s;
          next.push_back(std::move(st2));
        }
      }
    }
    frontier = std::move(next);
  }
  for (auto& st : frontier) {
    PathTerm s = st.has_suffix ? st.bindings.resolve(st.suffix)
                               : PathTerm::closed({});
    out.push_back({std::move(st.bindings), {s, st.constraint}});
  }
  return out;
}

}  // namespace datr
