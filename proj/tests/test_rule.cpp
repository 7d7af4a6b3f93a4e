#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "pasm/errors.hpp"
#include "pasm/machine.hpp"
#include "pasm/rule.hpp"

using namespace pasm;

namespace {

Value atom(const std::string& label) { return Value::named_atom(label); }

VocabularyPtr graph_vocab() {
  auto v = std::make_shared<Vocabulary>();
  v->declare({"V", 1, SymbolKind::Bridge, false, true});
  v->declare({"E", 2, SymbolKind::Bridge, true, true});
  v->declare({"out", 1, SymbolKind::Bridge, true, false});
  v->declare({"mark", 1, SymbolKind::Primary, true, false});
  v->declare({"done", 0, SymbolKind::Bridge, true, true});
  return v;
}

State complete_graph(int n) {
  State s(graph_vocab());
  std::vector<Value> atoms;
  for (int i = 0; i < n; ++i) atoms.push_back(atom(std::string(1, static_cast<char>('a' + i))));
  for (const Value& a : atoms) {
    s.add_carrier(a);
    s.set_fun("V", {a}, Value::boolean(true));
  }
  for (const Value& a : atoms) {
    for (const Value& b : atoms) {
      if (a != b) s.set_fun("E", {a, b}, Value::boolean(true));
    }
  }
  return s;
}

Term x() { return Term::var("x"); }
Term y() { return Term::var("y"); }

// forall x, y with V(x) and V(y) do if not(x = y) then E(x, y) := not(E(x, y)) endif enddo
Rule complement_rule() {
  Term guard = Term::conj(Term::app("V", {x()}), Term::app("V", {y()}));
  Rule flip = Rule::assign("E", {x(), y()}, Term::neg(Term::app("E", {x(), y()})));
  Rule inner = Rule::cond(Term::neg(Term::eq(x(), y())), flip);
  return Rule::forall({"x", "y"}, guard, inner);
}

Machine complement_machine() {
  return make_machine("complement", graph_vocab(), BaseDecls{}, complement_rule());
}

}  // namespace

TEST_CASE("make_machine validates closedness and well-formedness") {
  CHECK_THROWS_AS(make_machine("open", graph_vocab(), BaseDecls{},
                               Rule::assign("out", {x()}, Term::tru())),
                  RuleError);
  CHECK_THROWS_AS(make_machine("static", graph_vocab(), BaseDecls{},
                               Rule::assign("V", {Term::lit(atom("a"))}, Term::tru())),
                  RuleError);
  CHECK_THROWS_AS(make_machine("background", graph_vocab(), BaseDecls{},
                               Rule::assign("reserve", {Term::lit(atom("a"))}, Term::fls())),
                  RuleError);
  Machine m = complement_machine();
  CHECK(m.rule == complement_rule());
}

TEST_CASE("complement of a complete graph drops every edge") {
  Machine m = complement_machine();
  State k3 = complete_graph(3);
  UpdateSet u = machine_update_set(m, k3);
  CHECK(u.size() == 6);
  State next = machine_step(m, k3);
  for (const Value& a : k3.carrier()) {
    for (const Value& b : k3.carrier()) {
      CHECK(next.lookup("E", {a, b}).is_false());
    }
  }
  State again = machine_step(m, next);
  CHECK(again.equivalent(k3));
}

TEST_CASE("update sets come from the pre-state only") {
  // Simultaneous swap through a two-cycle: both flips read the old values.
  auto vocab = graph_vocab();
  State s(vocab);
  s.add_carrier(atom("a"));
  s.add_carrier(atom("b"));
  s.set_fun("out", {atom("a")}, Value::integer(1));
  s.set_fun("out", {atom("b")}, Value::integer(2));
  Rule swap = Rule::par({
      Rule::assign("out", {Term::lit(atom("a"))}, Term::app("out", {Term::lit(atom("b"))})),
      Rule::assign("out", {Term::lit(atom("b"))}, Term::app("out", {Term::lit(atom("a"))})),
  });
  Machine m = make_machine("swap", vocab, BaseDecls{}, swap);
  State next = machine_step(m, s);
  CHECK(next.lookup("out", {atom("a")}) == Value::integer(2));
  CHECK(next.lookup("out", {atom("b")}) == Value::integer(1));
}

TEST_CASE("clashing parallel assignments are rejected at fire time") {
  auto vocab = graph_vocab();
  Rule clash = Rule::par({
      Rule::assign("done", {}, Term::tru()),
      Rule::assign("done", {}, Term::fls()),
  });
  Machine m = make_machine("clash", vocab, BaseDecls{}, clash);
  State s(vocab);
  UpdateSet u = machine_update_set(m, s);
  CHECK_FALSE(u.consistent());
  CHECK_THROWS_AS(machine_step(m, s), ClashError);
}

TEST_CASE("range conditions guard assignments") {
  auto vocab = graph_vocab();
  State s(vocab);
  s.add_carrier(atom("a"));

  // Primary values must stay in the carrier (or undef).
  Rule bad_value = Rule::assign("mark", {Term::lit(atom("a"))}, Term::lit(Value::integer(3)));
  Machine m1 = make_machine("m1", vocab, BaseDecls{}, bad_value);
  CHECK_THROWS_AS(machine_update_set(m1, s), RangeError);

  Rule undef_value = Rule::assign("mark", {Term::lit(atom("a"))}, Term::undef());
  CHECK(machine_update_set(make_machine("m2", vocab, BaseDecls{}, undef_value), s).size() == 1);

  // Arguments outside the carrier are rejected.
  Rule bad_arg = Rule::assign("mark", {Term::lit(atom("zzz"))}, Term::lit(atom("a")));
  CHECK_THROWS_AS(machine_update_set(make_machine("m3", vocab, BaseDecls{}, bad_arg), s),
                  RangeError);

  // Relational symbols take boolean values only.
  Rule bad_rel = Rule::assign("done", {}, Term::lit(Value::integer(1)));
  CHECK_THROWS_AS(machine_update_set(make_machine("m4", vocab, BaseDecls{}, bad_rel), s),
                  RangeError);

  // Bridge values must be atomic in the state: without base declarations a
  // pair is not atomic.
  Rule pair_out = Rule::assign("out", {Term::lit(atom("a"))},
                               Term::app("pair", {Term::lit(atom("a")), Term::lit(atom("a"))}));
  Machine m5 = make_machine("m5", vocab, BaseDecls{}, pair_out);
  CHECK_THROWS_AS(machine_update_set(m5, s), RangeError);
  auto vocab2 = graph_vocab();
  BaseDecls with_pairs;
  with_pairs.pairs = true;
  State s2(vocab2);
  s2.set_base(with_pairs);
  s2.add_carrier(atom("a"));
  Machine m6 = make_machine("m6", vocab2, with_pairs, pair_out);
  CHECK(machine_update_set(m6, s2).size() == 1);
}

TEST_CASE("runs halt on change-free update sets") {
  auto vocab = graph_vocab();
  Rule once = Rule::cond(Term::neg(Term::app("done", {})), Rule::assign("done", {}, Term::tru()));
  Machine m = make_machine("once", vocab, BaseDecls{}, once);
  State s(vocab);
  RunResult r = run_machine(m, s, 10, true);
  CHECK(r.steps == 1);
  CHECK(r.reached_fixpoint);
  CHECK(r.trace.size() == 1);
  CHECK(r.final_state.lookup("done", {}).is_true());

  // The complement machine keeps toggling and never reaches a fixpoint.
  RunResult r2 = run_machine(complement_machine(), complete_graph(2), 5);
  CHECK(r2.steps == 5);
  CHECK_FALSE(r2.reached_fixpoint);
}

TEST_CASE("import allocates fresh atoms deterministically") {
  auto vocab = graph_vocab();
  Rule body = Rule::assign("mark", {Term::var("n")}, Term::var("n"));
  Rule imp = Rule::import_rule("n", body);
  Machine m = make_machine("imp", vocab, BaseDecls{}, imp);
  State s(vocab);
  s.add_carrier(atom("a"));

  std::vector<ImportRecord> prov;
  UpdateSet u1 = machine_update_set(m, s, &prov);
  REQUIRE(prov.size() == 1);
  CHECK(prov[0].site == 0);
  CHECK(prov[0].context.is_undef());
  Value fresh = prov[0].atom;
  CHECK_FALSE(s.in_carrier(fresh));

  // Same state, same allocation.
  UpdateSet u2 = machine_update_set(m, s);
  CHECK(u1 == u2);

  State next = s.fire(u1);
  CHECK(next.in_carrier(fresh));
  CHECK(next.lookup("mark", {fresh}) == fresh);
  CHECK(next.lookup("reserve", {fresh}).is_false());

  // Stepping again re-imports at the same site: the atom must be fresh again.
  std::vector<ImportRecord> prov2;
  UpdateSet u3 = machine_update_set(m, next, &prov2);
  REQUIRE(prov2.size() == 1);
  CHECK(prov2[0].atom != fresh);
  CHECK_FALSE(next.in_carrier(prov2[0].atom));

  // Two parallel import occurrences allocate two distinct atoms.
  Rule both = Rule::par({imp, Rule::import_rule("k", Rule::assign("mark", {Term::var("k")},
                                                                  Term::var("k")))});
  Machine m2 = make_machine("imp2", vocab, BaseDecls{}, both);
  UpdateSet u4 = machine_update_set(m2, s);
  CHECK(u4.imports().size() == 2);
}

TEST_CASE("import context keys follow the binding environment") {
  auto vocab = graph_vocab();
  // Per carrier atom x one import whose body mentions x.
  Rule body = Rule::assign("E", {Term::var("x"), Term::var("n")}, Term::tru());
  Rule imp = Rule::forall({"x"}, Term::app("V", {Term::var("x")}), Rule::import_rule("n", body));
  Machine m = make_machine("spawn", vocab, BaseDecls{}, imp);
  State s = complete_graph(2);
  std::vector<ImportRecord> prov;
  UpdateSet u = machine_update_set(m, s, &prov);
  REQUIRE(prov.size() == 2);
  CHECK(prov[0].context != prov[1].context);
  CHECK(prov[0].atom != prov[1].atom);
  CHECK(u.imports().size() == 2);
}

TEST_CASE("behavioural equivalence compares normalized steps") {
  Machine m1 = complement_machine();
  // A variant with the two guard conjuncts swapped behaves identically.
  Term guard = Term::conj(Term::app("V", {y()}), Term::app("V", {x()}));
  Rule flip = Rule::assign("E", {x(), y()}, Term::neg(Term::app("E", {x(), y()})));
  Machine m2 = make_machine("complement2", graph_vocab(), BaseDecls{},
                            Rule::forall({"x", "y"}, guard,
                                         Rule::cond(Term::neg(Term::eq(x(), y())), flip)));
  std::vector<State> states = {complete_graph(2), complete_graph(3)};
  CHECK(check_behavioural_equivalence(m1, m2, states).equivalent);

  Machine noop = make_machine("noop", graph_vocab(), BaseDecls{}, Rule::skip());
  auto rep = check_behavioural_equivalence(m1, noop, states);
  CHECK_FALSE(rep.equivalent);
  CHECK(rep.counterexample == 0);
}

TEST_CASE("update sets commute with carrier renamings") {
  Machine m = complement_machine();
  State s = complete_graph(3);
  s.set_fun("E", {atom("a"), atom("b")}, Value::boolean(false));
  std::map<AtomId, AtomId> perm = {
      {atom("a").atom_id(), atom("b").atom_id()},
      {atom("b").atom_id(), atom("c").atom_id()},
      {atom("c").atom_id(), atom("a").atom_id()},
  };
  CHECK(check_isomorphism_preservation(m, s, perm).preserved);

  // Import machines: fresh atoms are matched via their allocation context.
  auto vocab = graph_vocab();
  Rule body = Rule::assign("E", {Term::var("x"), Term::var("n")}, Term::tru());
  Rule imp = Rule::forall({"x"}, Term::app("V", {Term::var("x")}), Rule::import_rule("n", body));
  Machine spawn = make_machine("spawn", vocab, BaseDecls{}, imp);
  State g = complete_graph(2);
  std::map<AtomId, AtomId> swap = {
      {atom("a").atom_id(), atom("b").atom_id()},
      {atom("b").atom_id(), atom("a").atom_id()},
  };
  CHECK(check_isomorphism_preservation(spawn, g, swap).preserved);
}

TEST_CASE("rules print and compare structurally") {
  Rule r = complement_rule();
  std::string text = r.to_string();
  CHECK(text.find("forall x, y with V(x) and V(y) do") != std::string::npos);
  CHECK(text.find("E(x, y) := not(E(x, y))") != std::string::npos);
  CHECK(text.find("enddo") != std::string::npos);
  CHECK(rule_free_vars(r).empty());
  CHECK(rule_free_vars(Rule::assign("out", {x()}, y())) == std::set<std::string>{"x", "y"});

  int next = 0;
  Rule numbered = number_import_sites(Rule::import_rule("n", Rule::skip()), next);
  CHECK(numbered.import_site() == 0);
  CHECK(next == 1);
}
