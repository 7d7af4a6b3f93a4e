#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "pasm/errors.hpp"
#include "pasm/state.hpp"
#include "pasm/value.hpp"

using namespace pasm;

namespace {

Value atom(const std::string& label) { return Value::named_atom(label); }

VocabularyPtr graph_vocab() {
  auto v = std::make_shared<Vocabulary>();
  v->declare({"V", 1, SymbolKind::Bridge, false, true});
  v->declare({"E", 2, SymbolKind::Bridge, true, true});
  v->declare({"colour", 1, SymbolKind::Primary, true, false});
  v->declare({"weight", 1, SymbolKind::Secondary, true, false});
  v->declare({"tag", 0, SymbolKind::Bridge, true, false});
  return v;
}

State triangle() {
  State s(graph_vocab());
  for (const char* l : {"a", "b", "c"}) s.add_carrier(atom(l));
  for (const char* l : {"a", "b", "c"}) s.set_fun("V", {atom(l)}, Value::boolean(true));
  s.set_fun("E", {atom("a"), atom("b")}, Value::boolean(true));
  s.set_fun("E", {atom("b"), atom("a")}, Value::boolean(true));
  return s;
}

}  // namespace

TEST_CASE("vocabulary rejects bad declarations") {
  Vocabulary v;
  CHECK_THROWS_AS(v.declare({"reserve", 1, SymbolKind::Bridge, true, true}), VocabularyError);
  CHECK_THROWS_AS(v.declare({"f", 1, SymbolKind::Background, false, false}), VocabularyError);
  v.declare({"f", 1, SymbolKind::Bridge, true, false});
  v.declare({"f", 1, SymbolKind::Bridge, true, false});
  CHECK_THROWS_AS(v.declare({"f", 2, SymbolKind::Bridge, true, false}), VocabularyError);
  CHECK(v.find("f") != nullptr);
  CHECK(v.find("reserve") == nullptr);
  CHECK(Vocabulary::builtin("reserve") != nullptr);
  CHECK(v.resolve("reserve")->kind == SymbolKind::Background);
}

TEST_CASE("boolean background operations reject non-boolean arguments") {
  State s;
  auto t = Value::boolean(true), f = Value::boolean(false);
  CHECK(s.lookup("and", {t, t}) == t);
  CHECK(s.lookup("and", {t, f}) == f);
  CHECK(s.lookup("and", {t, Value::integer(1)}) == f);
  CHECK(s.lookup("or", {t, Value::integer(1)}) == f);
  CHECK(s.lookup("or", {f, t}) == t);
  CHECK(s.lookup("implies", {f, Value::integer(1)}) == f);
  CHECK(s.lookup("implies", {f, f}) == t);
  CHECK(s.lookup("iff", {f, f}) == t);
  CHECK(s.lookup("not", {f}) == t);
  CHECK(s.lookup("not", {t}) == f);
  CHECK(s.lookup("not", {Value::undef()}) == f);
  CHECK(s.lookup("boole", {t}) == t);
  CHECK(s.lookup("boole", {Value::undef()}) == f);
}

TEST_CASE("pair and multiset background operations are total via undef") {
  State s;
  Value a = atom("a"), b = atom("b");
  Value p = s.lookup("pair", {a, b});
  CHECK(p == Value::pair(a, b));
  CHECK(s.lookup("first", {p}) == a);
  CHECK(s.lookup("second", {p}) == b);
  CHECK(s.lookup("first", {a}).is_undef());
  CHECK(s.lookup("singleton", {a}) == Value::singleton(a));
  CHECK(s.lookup("munion", {Value::singleton(a), Value::singleton(a)}) ==
        Value::multiset({{a, 2}}));
  CHECK(s.lookup("munion", {a, Value::singleton(a)}).is_undef());
  CHECK(s.lookup("asSet", {Value::multiset({{a, 3}})}) == Value::singleton(a));
  CHECK(s.lookup("bigunion", {Value::multiset({{Value::singleton(a), 2}})}) ==
        Value::multiset({{a, 2}}));
  CHECK(s.lookup("in", {a, Value::singleton(a)}).is_true());
  CHECK(s.lookup("in", {b, Value::singleton(a)}).is_false());
  CHECK(s.lookup("in", {a, a}).is_false());
  CHECK(s.lookup("mult", {a, Value::multiset({{a, 4}})}) == Value::integer(4));
  CHECK(s.lookup("mult", {a, b}).is_undef());
}

TEST_CASE("arithmetic background operations") {
  State s;
  CHECK(s.lookup("succ", {Value::integer(4)}) == Value::integer(5));
  CHECK(s.lookup("succ", {atom("a")}).is_undef());
  CHECK(s.lookup("add", {Value::integer(2), Value::integer(3)}) == Value::integer(5));
  CHECK(s.lookup("sub", {Value::integer(2), Value::integer(3)}) == Value::integer(-1));
  CHECK(s.lookup("mul", {Value::integer(2), Value::integer(3)}) == Value::integer(6));
  CHECK(s.lookup("add", {Value::integer(2), atom("a")}).is_undef());
  CHECK(s.lookup("lt", {Value::integer(2), Value::integer(3)}).is_true());
  CHECK(s.lookup("lt", {Value::integer(3), Value::integer(3)}).is_false());
  CHECK(s.lookup("lt", {atom("a"), Value::integer(3)}).is_false());
}

TEST_CASE("equality is identity across kinds") {
  State s;
  CHECK(s.lookup("eq", {atom("a"), atom("a")}).is_true());
  CHECK(s.lookup("eq", {atom("a"), atom("b")}).is_false());
  CHECK(s.lookup("eq", {Value::undef(), Value::undef()}).is_true());
  CHECK(s.lookup("eq", {Value::empty_multiset(), Value::empty_multiset()}).is_true());
  CHECK(s.lookup("eq", {Value::integer(0), Value::boolean(false)}).is_false());
}

TEST_CASE("atomic tracks the carrier and the declared base") {
  State s = triangle();
  CHECK(s.atomic(Value::undef()));
  CHECK(s.atomic(Value::boolean(true)));
  CHECK(s.atomic(Value::integer(9)));
  CHECK(s.atomic(atom("a")));
  CHECK_FALSE(s.atomic(atom("zz")));
  CHECK_FALSE(s.atomic(Value::pair(atom("a"), atom("b"))));
  CHECK_FALSE(s.atomic(Value::singleton(atom("a"))));

  BaseDecls base;
  base.pairs = true;
  base.multisets = true;
  s.set_base(base);
  CHECK(s.atomic(Value::pair(atom("a"), atom("b"))));
  CHECK_FALSE(s.atomic(Value::pair(atom("a"), atom("zz"))));
  CHECK(s.atomic(Value::singleton(Value::pair(atom("a"), Value::integer(1)))));
  CHECK_FALSE(s.atomic(Value::singleton(atom("zz"))));
}

TEST_CASE("reserve holds exactly off-carrier atoms") {
  State s = triangle();
  CHECK(s.lookup("reserve", {atom("zz")}).is_true());
  CHECK(s.lookup("reserve", {atom("a")}).is_false());
  CHECK(s.lookup("reserve", {Value::integer(1)}).is_false());
}

TEST_CASE("user lookup defaults by relationality") {
  State s = triangle();
  CHECK(s.lookup("E", {atom("a"), atom("b")}).is_true());
  CHECK(s.lookup("E", {atom("a"), atom("c")}).is_false());
  CHECK(s.lookup("colour", {atom("a")}).is_undef());
  CHECK_THROWS_AS(s.lookup("E", {atom("a")}), EvalError);
  CHECK_THROWS_AS(s.lookup("nosuch", {}), EvalError);
}

TEST_CASE("set_fun normalizes default values away") {
  State s = triangle();
  s.set_fun("colour", {atom("a")}, atom("b"));
  CHECK(s.lookup("colour", {atom("a")}) == atom("b"));
  s.set_fun("colour", {atom("a")}, Value::undef());
  bool erased = s.tables().find("colour") == s.tables().end() ||
                s.tables().at("colour").count({atom("a")}) == 0;
  CHECK(erased);
  s.set_fun("E", {atom("a"), atom("b")}, Value::boolean(false));
  CHECK(s.lookup("E", {atom("a"), atom("b")}).is_false());
  State fresh = triangle();
  fresh.set_fun("E", {atom("a"), atom("b")}, Value::boolean(false));
  CHECK_FALSE(fresh.equivalent(triangle()));
}

TEST_CASE("fire applies consistent updates and rejects clashes") {
  State s = triangle();
  UpdateSet u;
  u.add({Location{"E", {atom("a"), atom("c")}}, Value::boolean(true)});
  u.add({Location{"colour", {atom("b")}}, atom("a")});
  State next = s.fire(u);
  CHECK(next.lookup("E", {atom("a"), atom("c")}).is_true());
  CHECK(next.lookup("colour", {atom("b")}) == atom("a"));
  CHECK(s.lookup("E", {atom("a"), atom("c")}).is_false());

  UpdateSet clash;
  clash.add({Location{"tag", {}}, Value::integer(1)});
  clash.add({Location{"tag", {}}, Value::integer(2)});
  CHECK_FALSE(clash.consistent());
  CHECK(clash.clashes().size() == 1);
  CHECK_THROWS_AS(s.fire(clash), ClashError);

  UpdateSet dup;
  dup.add({Location{"tag", {}}, Value::integer(1)});
  dup.add({Location{"tag", {}}, Value::integer(1)});
  CHECK(dup.size() == 1);
  CHECK(dup.consistent());

  UpdateSet toStatic;
  toStatic.add({Location{"V", {atom("a")}}, Value::boolean(false)});
  CHECK_THROWS_AS(s.fire(toStatic), RuleError);
}

TEST_CASE("fire extends the carrier for imports") {
  State s = triangle();
  Value fresh = Value::atom(AtomTable::instance().fresh());
  UpdateSet u;
  u.add_import(fresh);
  u.add({Location{"reserve", {fresh}}, Value::boolean(false)});
  u.add({Location{"colour", {fresh}}, atom("a")});
  State next = s.fire(u);
  CHECK(next.in_carrier(fresh));
  CHECK(next.lookup("colour", {fresh}) == atom("a"));
  CHECK(next.lookup("reserve", {fresh}).is_false());
  CHECK(s.lookup("reserve", {fresh}).is_true());
  CHECK_THROWS_AS(next.fire(u), RuleError);
}

TEST_CASE("diff reproduces the normalized update set after fire") {
  State s = triangle();
  UpdateSet u;
  Value fresh = Value::atom(AtomTable::instance().fresh());
  u.add_import(fresh);
  u.add({Location{"reserve", {fresh}}, Value::boolean(false)});
  u.add({Location{"E", {atom("a"), atom("b")}, }, Value::boolean(true)});  // trivial
  u.add({Location{"E", {atom("c"), atom("a")}}, Value::boolean(true)});
  u.add({Location{"colour", {atom("a")}}, Value::undef()});  // trivial
  u.add({Location{"weight", {atom("a")}}, Value::integer(3)});
  State next = s.fire(u);
  CHECK(State::diff(next, s) == u.normalized_against(s));
  CHECK(State::diff(s, s).empty());

  UpdateSet none;
  CHECK(none.trivial_on(s));
  UpdateSet trivial;
  trivial.add({Location{"E", {atom("a"), atom("b")}}, Value::boolean(true)});
  CHECK(trivial.trivial_on(s));
  UpdateSet real;
  real.add({Location{"E", {atom("a"), atom("b")}}, Value::boolean(false)});
  CHECK_FALSE(real.trivial_on(s));
}

TEST_CASE("diff refuses static drift and carrier shrinkage") {
  State s = triangle();
  State other = triangle();
  other.set_fun("V", {atom("a")}, Value::boolean(false));
  CHECK_THROWS_AS(State::diff(other, s), VocabularyError);

  State bigger = triangle();
  bigger.add_carrier(atom("d"));
  CHECK_THROWS_AS(State::diff(s, bigger), VocabularyError);
  UpdateSet growth = State::diff(bigger, s);
  CHECK(growth.imports().size() == 1);
  CHECK(growth.updates().size() == 1);
  CHECK(growth.updates()[0].loc.fn == "reserve");
}

TEST_CASE("renaming produces an isomorphic state") {
  State s = triangle();
  std::map<AtomId, AtomId> perm = {
      {atom("a").atom_id(), atom("b").atom_id()},
      {atom("b").atom_id(), atom("c").atom_id()},
      {atom("c").atom_id(), atom("a").atom_id()},
  };
  State r = s.renamed(perm);
  CHECK(r.carrier().size() == 3);
  CHECK(r.lookup("E", {atom("b"), atom("c")}).is_true());
  CHECK(r.lookup("E", {atom("a"), atom("b")}).is_false());
  CHECK_FALSE(r.equivalent(s));
  std::map<AtomId, AtomId> inverse = {
      {atom("b").atom_id(), atom("a").atom_id()},
      {atom("c").atom_id(), atom("b").atom_id()},
      {atom("a").atom_id(), atom("c").atom_id()},
  };
  CHECK(r.renamed(inverse).equivalent(s));

  std::map<AtomId, AtomId> squash = {
      {atom("a").atom_id(), atom("b").atom_id()},
  };
  CHECK_THROWS_AS(s.renamed(squash), IsomorphismError);
}

TEST_CASE("rename_value descends into pairs and multisets") {
  std::map<AtomId, AtomId> perm = {{atom("a").atom_id(), atom("b").atom_id()}};
  Value v = Value::multiset({{Value::pair(atom("a"), Value::integer(1)), 2}});
  Value r = State::rename_value(v, perm);
  CHECK(r == Value::multiset({{Value::pair(atom("b"), Value::integer(1)), 2}}));
}
