#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace datr;
using support::p;

TEST_CASE("lookup_sentence picks the longest defined prefix") {
  Theory t = support::noun_theory();
  auto m = lookup_sentence(t, "Sheep", p({"orth", "plur"}));
  REQUIRE(m.has_value());
  CHECK(m->sentence->lhs_path == p({}));
  CHECK(m->extension == p({"orth", "plur"}));

  m = lookup_sentence(t, "Foot", p({"root", "plur", "sing"}));
  REQUIRE(m.has_value());
  CHECK(m->sentence->lhs_path == p({"root", "plur"}));
  CHECK(m->extension == p({"sing"}));

  CHECK_FALSE(lookup_sentence(t, "Noun", p({"affix"})).has_value());
}

TEST_CASE("forward queries on the example theory") {
  Theory t = support::noun_theory();
  EvalResult r = eval_query(t, {"Sheep", p({"orth", "plur"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "sheep");

  r = eval_query(t, {"Foot", p({"root", "plur"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "feet");

  r = eval_query(t, {"House", p({"orth", "plur"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "house s");

  CHECK(eval_query(t, {"Sheep", p({"orth"})}).status == EvalStatus::Undefined);

  r = eval_query(t, {"House", p({"orth", "sing", "gen"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "house s");

  r = eval_query(t, {"Foot", p({"orth", "plur"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "feet");

  CHECK(eval_query(t, {"Nowhere", p({})}).status == EvalStatus::Undefined);
}

TEST_CASE("extensions are discarded at atom and empty-value leaves") {
  Theory t = support::noun_theory();
  for (const AttrPath& ext :
       {p({}), p({"x"}), p({"plur"}), p({"sing", "gen"})}) {
    EvalResult r = eval_query(t, {"Sheep", concat(p({"root"}), ext)});
    REQUIRE(r.status == EvalStatus::Value);
    CHECK(r.value_text() == "sheep");
    EvalResult e = eval_query(t, {"Sheep", concat(p({"affix", "plur"}), ext)});
    REQUIRE(e.status == EvalStatus::Value);
    CHECK(e.value_text() == "");
  }
}

TEST_CASE("quoted descriptors rebind the global environment") {
  // <orth> inherits through Noun but reads root/affix from the original
  // query node via the quoted paths.
  Theory t = support::noun_theory();
  EvalResult r = eval_query(t, {"Foot", p({"orth", "sing"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "foot");
}

TEST_CASE("quoted node descriptors append the extension to the global path") {
  Theory t = parse_theory_text(
      "G:\n  <p> == \"H\".\n"
      "H:\n  <p q> == x.\n  <p q q> == y.\n");
  EvalResult r = eval_query(t, {"G", p({"p", "q"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "y");  // global <p q> plus extension <q>
}

TEST_CASE("quoted node-path descriptors rebind both slots") {
  Theory t = parse_theory_text(
      "A:\n  <a> == \"B:<b>\".\n"
      "B:\n  <b> == \"<c>\".\n  <c> == v.\n  <c x> == w.\n");
  EvalResult r = eval_query(t, {"A", p({"a"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "v");
  // The extension flows into the rebound global path.
  r = eval_query(t, {"A", p({"a", "x"})});
  REQUIRE(r.status == EvalStatus::Value);
  CHECK(r.value_text() == "w");
}

TEST_CASE("limits are reported distinctly from undefined") {
  Theory simple = parse_theory_text("N:<a> == <a>.\n");
  CHECK(eval_query(simple, {"N", p({"a"})}).status == EvalStatus::LimitExceeded);

  Theory lengthen = parse_theory_text("N:<a> == <a a>.\n");
  CHECK(eval_query(lengthen, {"N", p({"a"})}).status ==
        EvalStatus::LimitExceeded);

  Theory shorten = parse_theory_text("N:<a a> == <a>.\n");
  CHECK(eval_query(shorten, {"N", p({"a", "a"})}).status ==
        EvalStatus::Undefined);
  CHECK(eval_query(shorten, {"N", p({"a", "a", "a"})}).status ==
        EvalStatus::Undefined);

  // A query path beyond the bound is itself a limit case.
  Theory t = support::noun_theory();
  AttrPath long_path(15, "plur");
  long_path.insert(long_path.begin(), "root");
  CHECK(eval_query(t, {"Sheep", long_path}, {10, 50}).status ==
        EvalStatus::LimitExceeded);
}

TEST_CASE("evaluation is a pure function") {
  Theory t = support::noun_theory();
  Query q{"House", p({"orth", "plur"})};
  EvalResult a = eval_query(t, q);
  EvalResult b = eval_query(t, q);
  CHECK(a.status == b.status);
  CHECK(a.value == b.value);
}

TEST_CASE("enumerate_queries covers the attribute alphabet") {
  Theory t = support::noun_theory();
  CHECK(t.attribute_atoms() ==
        std::set<Atom>{"orth", "root", "affix", "sing", "gen", "plur"});
  CHECK(enumerate_queries(t, 0).size() == 4);
  CHECK(enumerate_queries(t, 1).size() == 28);  // 4 nodes x (1 + 6)
  for (const Query& q : enumerate_queries(t, 2))
    for (const Atom& a : q.path) CHECK(t.attribute_atoms().count(a) == 1);
}

TEST_CASE("forward trace records the visited contexts") {
  Theory t = support::noun_theory();
  std::vector<std::string> trace;
  eval_query(t, {"Sheep", p({"orth", "plur"})}, {}, &trace);
  REQUIRE_FALSE(trace.empty());
  CHECK(trace.front().find("Sheep:<orth plur>") != std::string::npos);
}
