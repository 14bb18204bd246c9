#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace datr;
using support::cs;
using support::p;

namespace {

// A nonterminal with fresh global-environment variables in `b`.
NonTerminal fresh_nt(Bindings& b, NodeSlot ln, PathTerm lp, ConstraintSet c) {
  return {std::move(ln), std::move(lp), std::move(c),
          NodeSlot::variable(b.fresh_node()), PathTerm::variable(b.fresh_tail())};
}

}  // namespace

TEST_CASE("terminals match by text equality with an arbitrary suffix") {
  Bindings b;
  auto ok = match_terminal("sheep", "sheep", b);
  REQUIRE(ok.has_value());
  CHECK(ok->suffix.open());
  CHECK(ok->suffix.atoms.empty());
  CHECK(ok->constraint.empty());
  CHECK(b.tail_obligations(ok->suffix.tail).empty());
  CHECK_FALSE(match_terminal("sheep", "feet", b).has_value());
  CHECK(match_terminal("s", "s", b).has_value());
}

TEST_CASE("nonterminal matching, item extends rule") {
  Bindings b;
  NonTerminal rule =
      fresh_nt(b, NodeSlot::concrete("Node"), PathTerm::closed(p({"a", "b"})),
               cs({p({"c", "d", "e"})}));
  NonTerminal item = fresh_nt(b, NodeSlot::concrete("Node"),
                              PathTerm::closed(p({"a", "b", "c", "d"})), {});
  auto branches = match_nonterminal(rule, item, b);
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].result.suffix == PathTerm::closed(p({"c", "d"})));
  CHECK(branches[0].result.constraint.empty());
}

TEST_CASE("nonterminal matching fails when the extension hits the constraint") {
  Bindings b;
  NonTerminal rule = fresh_nt(b, NodeSlot::concrete("Node"),
                              PathTerm::closed(p({"a"})), cs({p({"b"})}));
  NonTerminal item = fresh_nt(b, NodeSlot::concrete("Node"),
                              PathTerm::closed(p({"a", "b", "x"})), {});
  CHECK(match_nonterminal(rule, item, b).empty());
}

TEST_CASE("identity match yields the empty closed suffix") {
  Bindings b;
  NonTerminal rule = fresh_nt(b, NodeSlot::concrete("Sheep"),
                              PathTerm::closed(p({"root"})), {});
  NonTerminal item = fresh_nt(b, NodeSlot::concrete("Sheep"),
                              PathTerm::closed(p({"root"})), {});
  auto branches = match_nonterminal(rule, item, b);
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].result.suffix == PathTerm::closed({}));
  CHECK_FALSE(branches[0].result.suffix.open());
  CHECK(branches[0].result.constraint.empty());
}

TEST_CASE("inheritance-style match passes the item constraint through") {
  Bindings b;
  NonTerminal rule =
      fresh_nt(b, NodeSlot::concrete("Noun"), PathTerm::closed({}),
               cs({p({"root"}), p({"affix", "plur"})}));
  NonTerminal item = fresh_nt(b, NodeSlot::concrete("Noun"),
                              PathTerm::closed(p({"affix", "sing"})),
                              cs({p({"gen"})}));
  auto branches = match_nonterminal(rule, item, b);
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].result.suffix == PathTerm::closed(p({"affix", "sing"})));
  CHECK(branches[0].result.constraint == cs({p({"gen"})}));
}

TEST_CASE("nonterminal matching, rule extends item") {
  Bindings b;
  NonTerminal rule = fresh_nt(b, NodeSlot::concrete("N"),
                              PathTerm::closed(p({"a", "b"})), {});
  NonTerminal item = fresh_nt(b, NodeSlot::concrete("N"),
                              PathTerm::closed(p({"a"})), cs({p({"b", "c"})}));
  auto branches = match_nonterminal(rule, item, b);
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].result.suffix == PathTerm::closed({}));
  CHECK(branches[0].result.constraint == cs({p({"c"})}));

  // Excluded outright when the leftover is forbidden.
  Bindings b2;
  NonTerminal rule2 = fresh_nt(b2, NodeSlot::concrete("N"),
                               PathTerm::closed(p({"a", "b"})), {});
  NonTerminal item2 = fresh_nt(b2, NodeSlot::concrete("N"),
                               PathTerm::closed(p({"a"})), cs({p({"b"})}));
  CHECK(match_nonterminal(rule2, item2, b2).empty());
}

TEST_CASE("local node mismatch and global clashes fail") {
  Bindings b;
  NonTerminal rule = fresh_nt(b, NodeSlot::concrete("Foot"),
                              PathTerm::closed(p({"a"})), {});
  NonTerminal item = fresh_nt(b, NodeSlot::concrete("House"),
                              PathTerm::closed(p({"a"})), {});
  CHECK(match_nonterminal(rule, item, b).empty());

  Bindings b2;
  NonTerminal rule2{NodeSlot::concrete("N"), PathTerm::closed(p({"a"})), {},
                    NodeSlot::concrete("House"),
                    PathTerm::variable(b2.fresh_tail())};
  NonTerminal item2{NodeSlot::concrete("N"), PathTerm::closed(p({"a"})), {},
                    NodeSlot::concrete("Sheep"),
                    PathTerm::variable(b2.fresh_tail())};
  CHECK(match_nonterminal(rule2, item2, b2).empty());
}

TEST_CASE("global environments alias and bind through matching") {
  Bindings b;
  int gn = b.fresh_node();
  int gp = b.fresh_tail();
  NonTerminal rule{NodeSlot::variable(gn), PathTerm::closed(p({"a"})), {},
                   NodeSlot::variable(gn), PathTerm::closed(p({"q"}))};
  NonTerminal item = fresh_nt(b, NodeSlot::concrete("House"),
                              PathTerm::closed(p({"a", "b"})), {});
  auto branches = match_nonterminal(rule, item, b);
  REQUIRE(branches.size() == 1);
  Bindings& ctx = branches[0].bindings;
  CHECK(ctx.resolve(NodeSlot::variable(gn)).name == "House");
  CHECK(ctx.resolve(item.global_path) == PathTerm::closed(p({"q"})));
}

TEST_CASE("open item tails absorb leftover atoms and keep obligations") {
  Bindings b;
  int x = b.fresh_tail(cs({p({"plur"})}));
  NonTerminal rule = fresh_nt(b, NodeSlot::concrete("Foot"),
                              PathTerm::closed(p({"root", "sing"})), {});
  NonTerminal item{NodeSlot::concrete("Foot"),
                   PathTerm::with_tail(p({"root"}), x),
                   cs({p({"plur"})}),
                   NodeSlot::variable(b.fresh_node()),
                   PathTerm::variable(b.fresh_tail())};
  auto branches = match_nonterminal(rule, item, b);
  REQUIRE(branches.size() == 1);
  // <plur> does not prefix <sing>, so the tail absorbed the leftover.
  CHECK(branches[0].result.suffix.atoms.empty());

  // Binding the tail to a forbidden continuation fails instead.
  Bindings b2;
  int x2 = b2.fresh_tail(cs({p({"plur"})}));
  NonTerminal rule2 = fresh_nt(b2, NodeSlot::concrete("Foot"),
                               PathTerm::closed(p({"root", "plur"})), {});
  NonTerminal item2{NodeSlot::concrete("Foot"),
                    PathTerm::with_tail(p({"root"}), x2),
                    cs({p({"plur"})}),
                    NodeSlot::variable(b2.fresh_node()),
                    PathTerm::variable(b2.fresh_tail())};
  CHECK(match_nonterminal(rule2, item2, b2).empty());
}

TEST_CASE("deferred obligations are conservative") {
  const std::vector<Atom> alphabet{"a", "b", "c"};
  ConstraintSet c1 = cs({p({"a", "b"}), p({"c"})});
  Bindings base;
  int x = base.fresh_tail();
  NonTerminal rule = {NodeSlot::concrete("N"), PathTerm::closed(p({"q"})), c1,
                      NodeSlot::variable(base.fresh_node()),
                      PathTerm::variable(base.fresh_tail())};
  NonTerminal item = {NodeSlot::concrete("N"), PathTerm::with_tail(p({"q"}), x),
                      {}, NodeSlot::variable(base.fresh_node()),
                      PathTerm::variable(base.fresh_tail())};
  auto branches = match_nonterminal(rule, item, base);
  REQUIRE(branches.size() == 1);
  const PathTerm& suffix = branches[0].result.suffix;
  REQUIRE(suffix.open());
  for (const AttrPath& ext : enumerate_paths(alphabet, 3)) {
    Bindings trial = branches[0].bindings;
    bool bound = trial.unify_paths(suffix, PathTerm::closed(ext));
    CHECK(bound == satisfies(ext, c1));
  }
}

TEST_CASE("sequences match with one shared suffix and a union constraint") {
  Bindings b;
  std::vector<SequenceSym> rule_seq(2), item_seq(2);
  rule_seq[0].nt = fresh_nt(b, NodeSlot::concrete("N1"),
                            PathTerm::closed(p({"a"})), {});
  rule_seq[1].nt = fresh_nt(b, NodeSlot::concrete("N2"),
                            PathTerm::closed(p({"x"})), {});
  item_seq[0].nt = fresh_nt(b, NodeSlot::concrete("N1"),
                            PathTerm::closed(p({"a", "b"})),
                            cs({p({"c"}), p({"d"})}));
  item_seq[1].nt = fresh_nt(b, NodeSlot::concrete("N2"),
                            PathTerm::closed(p({"x", "b"})), cs({p({"e"})}));
  auto branches = match_sequence(rule_seq, item_seq, b);
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].result.suffix.atoms == p({"b"}));
  CHECK(branches[0].result.constraint == cs({p({"c"}), p({"d"}), p({"e"})}));

  // Same inputs in the opposite order succeed identically.
  std::vector<SequenceSym> rrev{rule_seq[1], rule_seq[0]};
  std::vector<SequenceSym> irev{item_seq[1], item_seq[0]};
  Bindings b2 = b;
  auto rev = match_sequence(rrev, irev, b2);
  REQUIRE(rev.size() == 1);
  CHECK(rev[0].result.suffix.atoms == branches[0].result.suffix.atoms);
  CHECK(rev[0].result.constraint == branches[0].result.constraint);
}

TEST_CASE("the empty sequence matches the empty sequence") {
  Bindings b;
  auto branches = match_sequence({}, {}, b);
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].result.suffix == PathTerm::closed({}));
  CHECK(branches[0].result.constraint.empty());
}

TEST_CASE("divergent element suffixes make sequence matching fail") {
  Bindings b;
  std::vector<SequenceSym> rule_seq(2), item_seq(2);
  rule_seq[0].nt = fresh_nt(b, NodeSlot::concrete("N1"),
                            PathTerm::closed(p({"a"})), {});
  rule_seq[1].nt = fresh_nt(b, NodeSlot::concrete("N2"),
                            PathTerm::closed(p({"x"})), {});
  item_seq[0].nt = fresh_nt(b, NodeSlot::concrete("N1"),
                            PathTerm::closed(p({"a", "b"})), {});
  item_seq[1].nt = fresh_nt(b, NodeSlot::concrete("N2"),
                            PathTerm::closed(p({"x", "c"})), {});
  CHECK(match_sequence(rule_seq, item_seq, b).empty());

  std::vector<SequenceSym> shorter(1);
  shorter[0] = rule_seq[0];
  CHECK(match_sequence(shorter, item_seq, b).empty());
}

TEST_CASE("unify_suffix binds open tails against closed suffixes") {
  Bindings b;
  int t = b.fresh_tail();
  auto r = unify_suffix(PathTerm::closed(p({"sing"})), PathTerm::variable(t), b);
  REQUIRE(r.has_value());
  CHECK(*r == PathTerm::closed(p({"sing"})));
  CHECK(b.resolve(PathTerm::variable(t)) == PathTerm::closed(p({"sing"})));

  Bindings b2;
  int t2 = b2.fresh_tail(cs({p({"plur"})}));
  CHECK_FALSE(
      unify_suffix(PathTerm::closed(p({"plur"})), PathTerm::variable(t2), b2)
          .has_value());

  Bindings b3;
  auto r3 = unify_suffix(PathTerm::closed({}), PathTerm::closed({}), b3);
  REQUIRE(r3.has_value());
  CHECK(*r3 == PathTerm::closed({}));
}

TEST_CASE("open/open suffix unification merges obligations") {
  Bindings b;
  int t1 = b.fresh_tail(cs({p({"a"})}));
  int t2 = b.fresh_tail(cs({p({"b"})}));
  auto r = unify_suffix(PathTerm::variable(t1), PathTerm::variable(t2), b);
  REQUIRE(r.has_value());
  REQUIRE(r->open());
  CHECK(b.tail_obligations(r->tail) == cs({p({"a"}), p({"b"})}));
  // Both forbidden continuations now fail.
  Bindings trial1 = b;
  CHECK_FALSE(trial1.unify_paths(*r, PathTerm::closed(p({"a", "x"}))));
  Bindings trial2 = b;
  CHECK_FALSE(trial2.unify_paths(*r, PathTerm::closed(p({"b"}))));
  Bindings trial3 = b;
  CHECK(trial3.unify_paths(*r, PathTerm::closed(p({"c"}))));
}
