#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <climits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pasm/errors.hpp"
#include "pasm/gallery.hpp"
#include "pasm/rule.hpp"
#include "pasm/state.hpp"
#include "pasm/synthesis.hpp"
#include "pasm/witness.hpp"

using namespace pasm;

namespace {

// ---- hand-built structures over integer domains ----

CriticalStructure mk_struct(int n, std::vector<int> arities,
                            std::vector<std::vector<std::vector<int>>> rels) {
  CriticalStructure a;
  for (int i = 0; i < n; ++i) a.domain.push_back(CElem::value(Value::integer(i)));
  a.arities = std::move(arities);
  for (auto& r : rels) std::sort(r.begin(), r.end());
  a.relations = std::move(rels);
  return a;
}

// Path 0 -> 1 -> ... -> n-1 over a single binary relation.
CriticalStructure path_struct(int n) {
  std::vector<std::vector<int>> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return mk_struct(n, {2}, {e});
}

// ---- reference refinement by dense iteration over all correspondences ----
// Every correspondence of an n-element structure is a subset of the n*n index
// pairs, so for n <= 3 the whole refinement sequence fits in a table. This
// re-derives type equality and levels with none of the search machinery.
struct DenseTypes {
  int n;
  std::vector<char> valid;
  std::vector<std::vector<char>> stages;  // stages[m][mask]
  std::vector<char> fixpoint;

  explicit DenseTypes(const CriticalStructure& a) : n(static_cast<int>(a.size())) {
    int total = 1 << (n * n);
    valid.assign(total, 0);
    for (int mask = 0; mask < total; ++mask) valid[mask] = check_valid(a, mask) ? 1 : 0;
    stages.push_back(valid);
    while (true) {
      const std::vector<char>& cur = stages.back();
      std::vector<char> next(total, 0);
      for (int mask = 0; mask < total; ++mask) {
        next[mask] = (valid[mask] && survives(mask, cur)) ? 1 : 0;
      }
      if (next == cur) {
        fixpoint = next;
        break;
      }
      stages.push_back(std::move(next));
    }
  }

  bool check_valid(const CriticalStructure& a, int mask) const {
    std::vector<std::pair<int, int>> pairs;
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (mask & (1 << (x * n + y))) pairs.emplace_back(x, y);
      }
    }
    if (pairs.empty()) return true;
    for (std::size_t r = 0; r < a.relations.size(); ++r) {
      int k = a.arities[r];
      std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
      bool done = false;
      while (!done) {
        std::vector<int> left, right;
        for (int i = 0; i < k; ++i) {
          left.push_back(pairs[idx[static_cast<std::size_t>(i)]].first);
          right.push_back(pairs[idx[static_cast<std::size_t>(i)]].second);
        }
        if (a.has_tuple(static_cast<int>(r), left) != a.has_tuple(static_cast<int>(r), right)) {
          return false;
        }
        done = true;
        for (int pos = k; pos-- > 0;) {
          if (++idx[static_cast<std::size_t>(pos)] < pairs.size()) {
            done = false;
            break;
          }
          idx[static_cast<std::size_t>(pos)] = 0;
        }
      }
    }
    return true;
  }

  bool survives(int mask, const std::vector<char>& cur) const {
    for (int e = 0; e < n; ++e) {
      bool forth = false, back = false;
      for (int d = 0; d < n && !forth; ++d) forth = cur[mask | (1 << (e * n + d))] != 0;
      for (int d = 0; d < n && !back; ++d) back = cur[mask | (1 << (d * n + e))] != 0;
      if (!forth || !back) return false;
    }
    return true;
  }

  int seed_mask(const std::vector<int>& t1, const std::vector<int>& t2) const {
    int mask = 0;
    for (std::size_t i = 0; i < t1.size(); ++i) mask |= 1 << (t1[i] * n + t2[i]);
    return mask;
  }

  bool equal(const std::vector<int>& t1, const std::vector<int>& t2) const {
    return fixpoint[seed_mask(t1, t2)] != 0;
  }

  int level(const std::vector<int>& t1, const std::vector<int>& t2) const {
    int mask = seed_mask(t1, t2);
    if (!valid[mask]) return -1;
    if (fixpoint[mask]) return INT_MAX;
    int last = 0;
    for (std::size_t m = 1; m < stages.size(); ++m) {
      if (!stages[m][mask]) break;
      last = static_cast<int>(m);
    }
    return last;
  }
};

void each_tuple(int base, int len, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(static_cast<std::size_t>(len), 0);
  if (base == 0) return;
  bool done = false;
  while (!done) {
    fn(t);
    done = true;
    for (int pos = len; pos-- > 0;) {
      if (++t[static_cast<std::size_t>(pos)] < base) {
        done = false;
        break;
      }
      t[static_cast<std::size_t>(pos)] = 0;
    }
  }
}

// ---- complement fixtures ----

std::vector<std::pair<int, int>> sym(std::vector<std::pair<int, int>> edges) {
  std::vector<std::pair<int, int>> out;
  for (auto [a, b] : edges) {
    out.emplace_back(a, b);
    out.emplace_back(b, a);
  }
  return out;
}

State k3_state() { return complement_state(3, sym({{0, 1}, {0, 2}, {1, 2}})); }

// One complement step, computed from the independently checked edge oracle
// rather than from any rule evaluation.
StepOracle complement_step() {
  return [](const State& s) {
    std::vector<Value> vs = s.carrier();
    int n = static_cast<int>(vs.size());
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a != b && s.lookup("E", {vs[a], vs[b]}).is_true()) edges.emplace_back(a, b);
      }
    }
    std::set<std::pair<int, int>> comp = complement_oracle(n, edges);
    State out = s;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        out.set_fun("E", {vs[a], vs[b]}, Value::boolean(comp.count({a, b}) > 0));
      }
    }
    return out;
  };
}

int vidx(const CriticalStructure& cs, const Value& v) { return cs.index_of(CElem::value(v)); }

std::vector<int> rel_sizes(const CriticalStructure& cs) {
  std::vector<int> out;
  for (const auto& r : cs.relations) out.push_back(static_cast<int>(r.size()));
  std::sort(out.begin(), out.end());
  return out;
}

// Tuple counts per head value must equal the multiset multiplicities the
// witness evaluation reports.
int fidelity_mismatches(const State& s, const WitnessSet& w, const CriticalStructure& cs) {
  std::vector<Value> vals = eval_witness(w, s);
  int bad = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    int heads = cs.arities[i] - 1;
    std::int64_t total = 0;
    for (const auto& [val, mult] : vals[i].mset_entries()) {
      total += mult;
      std::vector<Value> comps =
          heads == 1 ? std::vector<Value>{val} : val.tuple_components(heads);
      std::int64_t count = 0;
      for (const std::vector<int>& tup : cs.relations[i]) {
        bool match = true;
        for (int j = 0; j < heads && match; ++j) {
          match = cs.domain[static_cast<std::size_t>(tup[static_cast<std::size_t>(j)])] ==
                  CElem::value(comps[static_cast<std::size_t>(j)]);
        }
        if (match) ++count;
      }
      if (count != mult) ++bad;
    }
    if (total != static_cast<std::int64_t>(cs.relations[i].size())) ++bad;
  }
  return bad;
}

// ---- random equality-free formulas over a critical vocabulary ----

EqFreeFormula random_formula(std::mt19937& rng, const CriticalStructure& cs, int depth,
                             std::vector<int>& scope, int& next_var) {
  auto pick = [&](int bound) { return static_cast<int>(rng() % static_cast<unsigned>(bound)); };
  int choice = depth == 0 ? 0 : pick(8);
  if (choice <= 2) {
    int rel = pick(static_cast<int>(cs.arities.size()));
    std::vector<int> args;
    for (int i = 0; i < cs.arities[static_cast<std::size_t>(rel)]; ++i) {
      args.push_back(scope[static_cast<std::size_t>(pick(static_cast<int>(scope.size())))]);
    }
    return EqFreeFormula::atom(rel, std::move(args));
  }
  if (choice == 3) return EqFreeFormula::neg(random_formula(rng, cs, depth - 1, scope, next_var));
  if (choice == 4 || choice == 5) {
    EqFreeFormula a = random_formula(rng, cs, depth - 1, scope, next_var);
    EqFreeFormula b = random_formula(rng, cs, depth - 1, scope, next_var);
    return choice == 4 ? EqFreeFormula::conj({std::move(a), std::move(b)})
                       : EqFreeFormula::disj({std::move(a), std::move(b)});
  }
  int var = next_var++;
  scope.push_back(var);
  EqFreeFormula body = random_formula(rng, cs, depth - 1, scope, next_var);
  scope.pop_back();
  return choice == 6 ? EqFreeFormula::exists(var, std::move(body))
                     : EqFreeFormula::forall(var, std::move(body));
}

}  // namespace

TEST_CASE("critical values and structure of the triangle") {
  Machine m = complement_machine();
  WitnessSet w = extract_witness(m);
  REQUIRE(w.size() == 6);
  State s = k3_state();

  std::vector<Value> crit = critical_values(s, witness_comps(w));
  std::vector<Value> expected = {Value::boolean(true), Value::boolean(false),
                                 Value::named_atom("v0"), Value::named_atom("v1"),
                                 Value::named_atom("v2")};
  std::sort(expected.begin(), expected.end(),
            [](const Value& a, const Value& b) { return Value::compare(a, b) < 0; });
  CHECK(crit == expected);

  CriticalStructure cs = critical_structure(s, w);
  // 5 values, 6 bindings of the guarded head term, 9 each for the two
  // unguarded ones, nothing from the three complement-guard terms.
  CHECK(cs.size() == 29);
  CHECK(rel_sizes(cs) == std::vector<int>{0, 0, 0, 6, 9, 9});
  int values = 0;
  for (const CElem& e : cs.domain) values += e.is_tag() ? 0 : 1;
  CHECK(values == 5);
  CHECK(fidelity_mismatches(s, w, cs) == 0);

  State sparse = complement_state(2, {{0, 1}});
  CriticalStructure cs2 = critical_structure(sparse, w);
  CHECK(rel_sizes(cs2) == std::vector<int>{0, 0, 0, 2, 4, 4});
  CHECK(vidx(cs2, Value::boolean(true)) >= 0);
  CHECK(vidx(cs2, Value::boolean(false)) >= 0);
  CHECK(vidx(cs2, Value::named_atom("v0")) >= 0);
  CHECK(fidelity_mismatches(sparse, w, cs2) == 0);
}

TEST_CASE("formula evaluation and validation") {
  CriticalStructure a = mk_struct(3, {1, 2}, {{{0}, {1}}, {{0, 1}, {1, 2}}});
  EqFreeFormula in_r = EqFreeFormula::atom(0, {0});
  CHECK(eqfree_holds(in_r, a, std::vector<int>{0}));
  CHECK(eqfree_holds(in_r, a, std::vector<int>{1}));
  CHECK_FALSE(eqfree_holds(in_r, a, std::vector<int>{2}));

  // Some successor of x lies in R.
  EqFreeFormula f = EqFreeFormula::exists(
      1, EqFreeFormula::conj({EqFreeFormula::atom(1, {0, 1}), EqFreeFormula::atom(0, {1})}));
  CHECK(eqfree_holds(f, a, std::vector<int>{0}));
  CHECK_FALSE(eqfree_holds(f, a, std::vector<int>{1}));

  EqFreeFormula all = EqFreeFormula::forall(0, EqFreeFormula::atom(0, {0}));
  std::map<int, int> env;
  CHECK_FALSE(eqfree_holds(all, a, env));

  eqfree_validate(f, a);
  CHECK_THROWS_AS(eqfree_validate(EqFreeFormula::atom(5, {0}), a), RuleError);
  CHECK_THROWS_AS(eqfree_validate(EqFreeFormula::atom(0, {0, 1}), a), RuleError);
  CHECK_THROWS_AS(eqfree_validate(EqFreeFormula::atom(0, {-1}), a), RuleError);
  CHECK_THROWS_AS(eqfree_holds(EqFreeFormula::atom(0, {3}), a, env), RuleError);

  CHECK(correspondence_valid(a, {{0, 1}}));
  CHECK_FALSE(correspondence_valid(a, {{0, 2}}));
  CHECK_THROWS_AS(correspondence_valid(a, {{0, 7}}), RuleError);
}

TEST_CASE("type partition merges and splits") {
  // Two elements sharing every membership context collapse into one block.
  CriticalStructure merged = mk_struct(3, {1}, {{{0}, {1}}});
  TypePartition p1 = fo_woeq_partition(merged, 1);
  CHECK(p1.blocks == 2);
  CHECK(p1.block_of({0}) == p1.block_of({1}));
  CHECK(p1.block_of({0}) != p1.block_of({2}));
  CHECK(p1.stabilization_level == 0);

  TypePartition p2 = fo_woeq_partition(merged, 2);
  CHECK(p2.blocks == 4);
  CHECK(p2.block_of({0, 1}) == p2.block_of({1, 0}));
  CHECK(p2.block_of({0, 1}) == p2.block_of({0, 0}));
  CHECK(p2.block_of({0, 2}) != p2.block_of({2, 0}));

  // On the path every vertex has its own type, separated at distinct depths.
  CriticalStructure path = path_struct(4);
  TypePartition p3 = fo_woeq_partition(path, 1);
  CHECK(p3.blocks == 4);
  CHECK(p3.stabilization_level == 2);
  TypeOracle oracle(path);
  CHECK(oracle.level({0}, {1}) == 0);
  CHECK(oracle.level({1}, {2}) == 1);
  CHECK(oracle.level({0}, {0}) == INT_MAX);
  CHECK(oracle.equal({1}, {1}));
  CHECK_FALSE(oracle.equal({1}, {2}));

  CHECK_THROWS_AS(fo_woeq_partition(path, 0), RuleError);
  CHECK_THROWS_AS(fo_woeq_partition(path, 12), ScaleError);
  CHECK_THROWS_AS(p3.block_of({7}), RuleError);
}

TEST_CASE("type oracle agrees with dense refinement on all small structures") {
  long long cases = 0;
  int mismatches = 0;
  std::string first;
  for (int n = 1; n <= 3 && mismatches == 0; ++n) {
    for (int rmask = 0; rmask < (1 << n) && mismatches == 0; ++rmask) {
      for (int emask = 0; emask < (1 << (n * n)) && mismatches == 0; ++emask) {
        std::vector<std::vector<int>> r, e;
        for (int i = 0; i < n; ++i) {
          if (rmask & (1 << i)) r.push_back({i});
        }
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (emask & (1 << (i * n + j))) e.push_back({i, j});
          }
        }
        CriticalStructure a = mk_struct(n, {1, 2}, {r, e});
        DenseTypes dense(a);
        TypeOracle oracle(a);
        for (int len = 1; len <= 2; ++len) {
          std::vector<std::vector<int>> tuples;
          each_tuple(n, len, [&](const std::vector<int>& t) { tuples.push_back(t); });
          for (const auto& t1 : tuples) {
            for (const auto& t2 : tuples) {
              ++cases;
              bool oe = oracle.equal(t1, t2);
              bool de = dense.equal(t1, t2);
              int ol = oracle.level(t1, t2);
              int dl = dense.level(t1, t2);
              if (oe != de || ol != dl) {
                ++mismatches;
                first = "n=" + std::to_string(n) + " r=" + std::to_string(rmask) +
                        " e=" + std::to_string(emask) + " len=" + std::to_string(len);
                break;
              }
            }
            if (mismatches) break;
          }
          if (mismatches) break;
        }
      }
    }
  }
  INFO("first mismatch at " << first);
  CHECK(mismatches == 0);
  CHECK(cases > 300000);
}

TEST_CASE("triangle structure type queries") {
  Machine m = complement_machine();
  WitnessSet w = extract_witness(m);
  State s = k3_state();
  CriticalStructure cs = critical_structure(s, w);
  TypeOracle oracle(cs);

  int t = vidx(cs, Value::boolean(true));
  int f = vidx(cs, Value::boolean(false));
  int a0 = vidx(cs, Value::named_atom("v0"));
  int a1 = vidx(cs, Value::named_atom("v1"));
  int a2 = vidx(cs, Value::named_atom("v2"));

  CHECK(oracle.equal({a0}, {a1}));
  CHECK(oracle.equal({a1}, {a2}));
  CHECK_FALSE(oracle.equal({t}, {f}));
  // The constant-true witness relation has only true heads, so a single
  // existential already splits true from false: the pair dies at depth one.
  CHECK(oracle.level({t}, {f}) == 0);
  CHECK_FALSE(oracle.equal({t}, {a0}));

  // All six oriented distinct pairs share one type; a degenerate pair does not.
  CHECK(oracle.equal({f, a0, a1}, {f, a2, a1}));
  CHECK(oracle.equal({f, a0, a1}, {f, a1, a0}));
  CHECK_FALSE(oracle.equal({f, a0, a1}, {f, a0, a0}));
  CHECK_FALSE(oracle.equal({f, a0, a1}, {t, a0, a1}));

  TypePartition p = fo_woeq_partition(cs, 1);
  // true, false, the atoms, and one block per tag family: the guarded head
  // term keeps one family, the two unguarded terms split by head value.
  CHECK(p.blocks == 7);
  CHECK(p.stabilization_level >= 1);
}

TEST_CASE("isolating formulas carve exactly one type class") {
  std::vector<CriticalStructure> structs;
  structs.push_back(path_struct(4));
  structs.push_back(mk_struct(3, {1}, {{{0}, {1}}}));
  structs.push_back(mk_struct(3, {1, 2}, {{{2}}, {{0, 1}, {1, 0}, {1, 2}}}));
  for (const CriticalStructure& a : structs) {
    TypeOracle oracle(a);
    for (int len = 1; len <= 2; ++len) {
      std::vector<std::vector<int>> tuples;
      each_tuple(static_cast<int>(a.size()), len,
                 [&](const std::vector<int>& t) { tuples.push_back(t); });
      for (const auto& target : tuples) {
        EqFreeFormula chi = isolating_formula(a, target);
        eqfree_validate(chi, a);
        for (const auto& probe : tuples) {
          CHECK(eqfree_holds(chi, a, probe) == oracle.equal(target, probe));
        }
      }
    }
  }

  Machine m = complement_machine();
  WitnessSet w = extract_witness(m);
  CriticalStructure cs = critical_structure(k3_state(), w);
  TypeOracle oracle(cs);
  int f = vidx(cs, Value::boolean(false));
  int a0 = vidx(cs, Value::named_atom("v0"));
  int a1 = vidx(cs, Value::named_atom("v1"));
  EqFreeFormula chi = isolating_formula(cs, {f, a0, a1});
  eqfree_validate(chi, cs);

  // Probing all 29^3 index tuples would dwarf the suite, so cover every tuple
  // over the plain values plus a deterministic sample of tag-bearing ones.
  std::vector<int> values;
  for (std::size_t i = 0; i < cs.domain.size(); ++i) {
    if (!cs.domain[i].is_tag()) values.push_back(static_cast<int>(i));
  }
  int hits = 0;
  each_tuple(static_cast<int>(values.size()), 3, [&](const std::vector<int>& t) {
    std::vector<int> probe = {values[t[0]], values[t[1]], values[t[2]]};
    if (eqfree_holds(chi, cs, probe) != oracle.equal({f, a0, a1}, probe)) ++hits;
  });
  std::mt19937 gen(20240817);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(cs.size()) - 1);
  for (int i = 0; i < 400; ++i) {
    std::vector<int> probe = {pick(gen), pick(gen), pick(gen)};
    if (eqfree_holds(chi, cs, probe) != oracle.equal({f, a0, a1}, probe)) ++hits;
  }
  CHECK(hits == 0);
}

TEST_CASE("isolating terms mirror formula satisfaction over critical values") {
  Machine m = complement_machine();
  WitnessSet w = extract_witness(m);
  std::vector<State> states;
  states.push_back(k3_state());
  states.push_back(complement_state(3, {}));
  states.push_back(complement_state(3, {{0, 1}, {1, 2}}));
  states.push_back(complement_state(2, {{0, 1}}));

  // Handcrafted adversarial shapes first: one bound tag variable shared by
  // two atoms, a variable used at both a value and the tag position, and a
  // plain existential over the one-head relation.
  std::vector<std::pair<EqFreeFormula, int>> fixed;
  CriticalStructure k3cs = critical_structure(states[0], w);
  int quad = -1, duo = -1;
  for (std::size_t r = 0; r < k3cs.arities.size(); ++r) {
    if (k3cs.arities[r] == 4 && !k3cs.relations[r].empty() && quad < 0) {
      quad = static_cast<int>(r);
    }
    if (k3cs.arities[r] == 2 && !k3cs.relations[r].empty() && duo < 0) {
      duo = static_cast<int>(r);
    }
  }
  REQUIRE(quad >= 0);
  REQUIRE(duo >= 0);
  fixed.emplace_back(
      EqFreeFormula::exists(3, EqFreeFormula::conj({EqFreeFormula::atom(quad, {0, 1, 2, 3}),
                                                    EqFreeFormula::atom(quad, {0, 2, 1, 3})})),
      3);
  fixed.emplace_back(EqFreeFormula::exists(1, EqFreeFormula::atom(duo, {1, 1})), 1);
  fixed.emplace_back(EqFreeFormula::exists(1, EqFreeFormula::atom(duo, {0, 1})), 1);
  fixed.emplace_back(
      EqFreeFormula::forall(1, EqFreeFormula::neg(EqFreeFormula::atom(duo, {0, 1}))), 1);

  int bad = 0;
  std::string note;
  auto check_formula = [&](const EqFreeFormula& f, int frees) {
    Term t = isolating_term(f, frees, w);
    for (const State& s : states) {
      CriticalStructure cs = critical_structure(s, w);
      std::vector<Value> crit = critical_values(s, witness_comps(w));
      each_tuple(static_cast<int>(crit.size()), frees, [&](const std::vector<int>& pick) {
        Env env;
        std::vector<int> idx;
        for (int i = 0; i < frees; ++i) {
          env.push("x" + std::to_string(i), crit[static_cast<std::size_t>(pick[i])]);
          idx.push_back(vidx(cs, crit[static_cast<std::size_t>(pick[i])]));
        }
        bool term_val = eval(t, s, env).is_true();
        bool formula_val = eqfree_holds(f, cs, idx);
        if (term_val != formula_val) {
          ++bad;
          if (note.empty()) note = f.to_string();
        }
      });
    }
  };

  for (const auto& [f, frees] : fixed) check_formula(f, frees);

  std::mt19937 rng(20260822);
  for (int frees = 1; frees <= 2; ++frees) {
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<int> scope;
      for (int i = 0; i < frees; ++i) scope.push_back(i);
      int next_var = frees;
      EqFreeFormula f = random_formula(rng, k3cs, 3, scope, next_var);
      check_formula(f, frees);
    }
  }
  INFO("first failing formula: " << note);
  CHECK(bad == 0);
}

TEST_CASE("rule synthesis reproduces the complement step") {
  Machine m = complement_machine();
  WitnessSet w = extract_witness(m);
  StepOracle oracle = complement_step();

  State s = k3_state();
  Rule r = synthesize_rule(oracle, s, w);
  UpdateSet expected = State::diff(oracle(s), s);
  CHECK(expected.updates().size() == 6);
  CHECK(update_set(r, s).normalized_against(s) == expected);

  // The same rule carries over to any state the witness terms cannot
  // distinguish from the sample, here a relabeled triangle.
  State renamed(m.vocab);
  renamed.set_base(m.base);
  for (const char* l : {"a", "b", "c"}) {
    Value v = Value::named_atom(l);
    renamed.add_carrier(v);
    renamed.set_fun("V", {v}, Value::boolean(true));
  }
  for (const char* x : {"a", "b", "c"}) {
    for (const char* y : {"a", "b", "c"}) {
      if (std::string(x) != y) {
        renamed.set_fun("E", {Value::named_atom(x), Value::named_atom(y)}, Value::boolean(true));
      }
    }
  }
  REQUIRE(w_similar(s, renamed, w));
  UpdateSet transferred = State::diff(oracle(renamed), renamed);
  CHECK(transferred.updates().size() == 6);
  CHECK(update_set(r, renamed).normalized_against(renamed) == transferred);

  // A lopsided sample whose update tuples split into several type classes
  // still synthesizes to an exact rule for that sample.
  State lop = complement_state(3, {{0, 1}});
  Rule rl = synthesize_rule(oracle, lop, w);
  UpdateSet lop_delta = State::diff(oracle(lop), lop);
  CHECK(lop_delta.updates().size() == 6);
  CHECK(update_set(rl, lop).normalized_against(lop) == lop_delta);

  // A step changing nothing synthesizes to the empty rule.
  StepOracle id = [](const State& st) { return st; };
  Rule nothing = synthesize_rule(id, s, w);
  CHECK(update_set(nothing, s).updates().empty());

  // Updates outside the critical values, and carrier growth, are rejected.
  StepOracle wild = [](const State& st) {
    State out = st;
    out.set_fun("E", {st.carrier()[0], st.carrier()[1]}, Value::integer(42));
    return out;
  };
  CHECK_THROWS_AS(synthesize_rule(wild, s, w), CriticalityViolation);
  StepOracle growing = [](const State& st) {
    State out = st;
    out.add_carrier(Value::named_atom("fresh"));
    return out;
  };
  CHECK_THROWS_AS(synthesize_rule(growing, s, w), CriticalityViolation);
}

TEST_CASE("machine synthesis covers sampled similarity classes") {
  Machine m = complement_machine();
  WitnessSet w = extract_witness(m);
  StepOracle oracle = complement_step();

  std::vector<State> samples;
  for (int mask = 0; mask < 4; ++mask) {
    std::vector<std::pair<int, int>> edges;
    if (mask & 1) edges.emplace_back(0, 1);
    if (mask & 2) edges.emplace_back(1, 0);
    samples.push_back(complement_state(2, edges));
  }
  samples.push_back(complement_state(3, {}));
  samples.push_back(k3_state());
  samples.push_back(complement_state(3, {{0, 1}}));
  samples.push_back(complement_state(3, sym({{0, 1}, {1, 2}})));

  // Similarity compares the equality pattern among witness values. Every
  // nonempty graph induces the same pattern: the comprehension values with
  // satisfiable guards are pairwise distinct, the vacuous ones coincide. So
  // all samples fall into one class and every guard accepts every sample.
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Term guard = similarity_formula(samples[i], w);
    for (std::size_t j = 0; j < samples.size(); ++j) {
      CHECK(w_similar(samples[i], samples[j], w));
      CHECK(eval_closed(guard, samples[j]).is_true());
    }
  }

  Machine synth = synthesize_machine(oracle, samples, w, "complement_again");
  CHECK(synth.name == "complement_again");
  SynthCheck report = verify_synthesized(synth, oracle, samples, w, samples);
  CHECK(report.ok());
  CHECK(report.states == static_cast<int>(samples.size()));
  CHECK(report.summary().find("0 coverage gaps") != std::string::npos);

  // Same-class samples collapse to one branch: the machine from all samples
  // behaves exactly like the machine from the first sample alone.
  Machine lone = synthesize_machine(oracle, {samples[0]}, w, "complement_lone");
  for (const State& s : samples) {
    CHECK(machine_update_set(synth, s) == machine_update_set(lone, s));
  }

  // A class never sampled is reported as a gap, not silently mishandled. On
  // the vertexless graph every witness value collapses to the empty multiset,
  // which changes the equality pattern.
  SynthCheck gapped =
      verify_synthesized(synth, oracle, {complement_state(0, {})}, w, samples);
  CHECK_FALSE(gapped.ok());
  CHECK(gapped.gaps.size() == 1);
  CHECK(gapped.mismatches.empty());

  CHECK_THROWS_AS(synthesize_machine(oracle, {}, w), CoverageGap);
}

TEST_CASE("synthesized machine handles every small graph of its sampled class") {
  Machine m = complement_machine();
  WitnessSet w = extract_witness(m);
  StepOracle oracle = complement_step();

  // All loop-free directed graphs on 1..3 labeled vertices.
  std::vector<State> all;
  for (int n = 1; n <= 3; ++n) {
    std::vector<std::pair<int, int>> slots;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a != b) slots.emplace_back(a, b);
      }
    }
    for (int mask = 0; mask < (1 << slots.size()); ++mask) {
      std::vector<std::pair<int, int>> edges;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (mask & (1 << i)) edges.push_back(slots[i]);
      }
      all.push_back(complement_state(n, edges));
    }
  }
  CHECK(all.size() == 69);

  // Every multi-vertex graph shares the triangle's similarity class; only the
  // single-vertex graph stands apart, because its edge comprehension goes
  // vacuous and collapses the equality pattern.
  State k3 = k3_state();
  int similar = 0;
  for (const State& s : all) similar += w_similar(k3, s, w) ? 1 : 0;
  CHECK(similar == 68);
  CHECK_FALSE(w_similar(k3, all[0], w));

  // Two samples, one per class, must reproduce the oracle on all 69 graphs,
  // including the graphs smaller than the sampled triangle.
  Machine from_k3 = synthesize_machine(oracle, {k3, all[0]}, w);
  SynthCheck report = verify_synthesized(from_k3, oracle, all, w, {k3, all[0]});
  CHECK(report.ok());
  CHECK(report.states == 69);
  CHECK(report.gaps.empty());
  CHECK(report.mismatches.empty());

  // A two-vertex sample generalizes to the three-vertex graphs just as well.
  State pair = complement_state(2, {});
  Machine from_pair = synthesize_machine(oracle, {pair, all[0]}, w);
  SynthCheck again = verify_synthesized(from_pair, oracle, all, w, {pair, all[0]});
  CHECK(again.ok());

  // A disagreeing oracle is pinned as a mismatch, not a gap.
  StepOracle frozen = [](const State& st) { return st; };
  SynthCheck bad = verify_synthesized(from_k3, frozen, {k3}, w, {k3});
  CHECK_FALSE(bad.ok());
  CHECK(bad.gaps.empty());
  CHECK(bad.mismatches.size() == 1);
}

TEST_CASE("type update transfer check") {
  Machine m = complement_machine();
  WitnessSet w = extract_witness(m);
  State s = k3_state();

  TransferReport good = check_type_update_transfer(complement_step(), s, w);
  CHECK(good.ok());
  CHECK(good.updates == 6);
  CHECK(good.checked_tuples == 36);

  // Flipping a single edge treats one member of a six-tuple type class
  // differently from the other five.
  StepOracle lopsided = [](const State& st) {
    State out = st;
    Value a = Value::named_atom("v0");
    Value b = Value::named_atom("v1");
    out.set_fun("E", {a, b}, Value::boolean(!st.lookup("E", {a, b}).is_true()));
    return out;
  };
  TransferReport bad = check_type_update_transfer(lopsided, s, w);
  CHECK_FALSE(bad.ok());
  CHECK(bad.updates == 1);
  CHECK(bad.violations.size() == 5);

  StepOracle noncritical = [](const State& st) {
    State out = st;
    out.set_fun("E", {Value::named_atom("v0"), Value::named_atom("v1")}, Value::integer(9));
    return out;
  };
  TransferReport off = check_type_update_transfer(noncritical, s, w);
  CHECK_FALSE(off.ok());
  REQUIRE(off.violations.size() == 1);
  CHECK(off.violations[0].find("non-critical") != std::string::npos);

  StepOracle growing = [](const State& st) {
    State out = st;
    out.add_carrier(Value::named_atom("fresh2"));
    return out;
  };
  TransferReport grew = check_type_update_transfer(growing, s, w);
  CHECK_FALSE(grew.ok());
}

TEST_CASE("element accessors guard their kind") {
  CElem v = CElem::value(Value::integer(3));
  CHECK_FALSE(v.is_tag());
  CHECK(v.val() == Value::integer(3));
  CHECK_THROWS_AS(v.tag_ref(), RuleError);
  MultTag t{1, {Value::boolean(true)}, {Value::integer(0)}};
  CElem e = CElem::tag(t);
  CHECK(e.is_tag());
  CHECK(e.tag_ref() == t);
  CHECK_THROWS_AS(e.val(), RuleError);
  CHECK(v < e);
  CHECK(v.to_string() == "3");
}
