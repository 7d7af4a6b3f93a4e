#include "pasm/gallery.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>
#include <sstream>

#include "pasm/errors.hpp"
#include "pasm/surface.hpp"

namespace pasm {

namespace gallery_src {

const char* complement = R"(
machine complement
vocab
  V/1 bridge relational
  E/2 bridge dynamic relational
rule
forall x, y with V(x) and V(y) do
  if not(x = y) then
    E(x, y) := not(E(x, y))
  endif
enddo
)";

const char* circuit = R"(
machine circuit
vocab
  fV/1 primary relational
  fE/2 primary relational
  fLam/1 primary
  val/1 bridge dynamic
rule
forall x with fV(x) and forall y (fE(y, x) -> not(val(y) = undef)) and val(x) = undef do
  par
    if fLam(x) = @not then
      val(x) := {{ y | fE(y, x) and val(y) = true }} = {{}}
    endif
    if fLam(x) = @or then
      val(x) := not({{ y | fE(y, x) and val(y) = true }} = {{}})
    endif
    if fLam(x) = @and then
      val(x) := {{ y | fE(y, x) and val(y) = false }} = {{}}
    endif
  endpar
enddo
)";

const char* pram = R"(
machine pram
vocab
  P/1 bridge relational
  progBefore/2 primary relational
  lineSucc/1 primary
  accReg/1 bridge
  Inst/2 primary
  OpType/2 primary
  OpVal/2 bridge
  I/1 secondary
  R/1 secondary dynamic
  kappa/1 primary dynamic
  W/1 bridge dynamic
  mode/0 bridge dynamic
base pairs
rule
par
  if mode = 0 then
    par
      forall i with P(i) do
        if not(kappa(i) = @L0) then
          par
            if Inst(i, kappa(i)) = @READ then
              par
                kappa(i) := lineSucc(kappa(i))
                if OpType(i, kappa(i)) = @direct then
                  W(i) := (accReg(i), I(OpVal(i, kappa(i))))
                endif
                if OpType(i, kappa(i)) = @indirect then
                  W(i) := (accReg(i), I(R(OpVal(i, kappa(i)))))
                endif
              endpar
            endif
            if Inst(i, kappa(i)) = @STORE then
              par
                kappa(i) := lineSucc(kappa(i))
                if OpType(i, kappa(i)) = @direct then
                  W(i) := (OpVal(i, kappa(i)), R(accReg(i)))
                endif
                if OpType(i, kappa(i)) = @indirect then
                  W(i) := (R(OpVal(i, kappa(i))), R(accReg(i)))
                endif
              endpar
            endif
            if Inst(i, kappa(i)) = @HALT then
              kappa(i) := @L0
            endif
          endpar
        endif
      enddo
      mode := 1
    endpar
  endif
  if mode = 1 then
    par
      forall i with not(W(i) = undef) do
        par
          if {{ x | first(W(x)) = first(W(i)) and progBefore(x, i) }} = {{}} then
            R(first(W(i))) := second(W(i))
          endif
          W(i) := undef
        endpar
      enddo
      mode := 0
    endpar
  endif
endpar
)";

const char* atm = R"(
machine atm
vocab
  Gamma/1 bridge relational
  QExists/1 bridge relational
  QForall/1 bridge relational
  QAcc/1 bridge relational
  QRej/1 bridge relational
  delta/5 bridge relational
  config/1 bridge dynamic
  active/1 bridge dynamic
  value/1 bridge dynamic
  parent/2 primary dynamic relational
  stateOf/1 secondary
  readOf/1 secondary
  nextConfig/4 secondary
base pairs
rule
forall x with not(config(x) = undef) do
  par
    if active(x) then
      par
        if QAcc(stateOf(config(x))) and value(x) = undef then
          value(x) := true
        endif
        if QRej(stateOf(config(x))) and value(x) = undef then
          value(x) := false
        endif
        if QExists(stateOf(config(x))) or QForall(stateOf(config(x))) then
          par
            forall q, a, m with delta(stateOf(config(x)), readOf(config(x)), q, a, m) do
              import c do
                par
                  active(c) := true
                  config(c) := nextConfig(config(x), q, a, m)
                  value(c) := undef
                  parent(x, c) := true
                endpar
              enddo
            enddo
            active(x) := false
          endpar
        endif
      endpar
    endif
    if not(active(x)) then
      par
        if QExists(stateOf(config(x))) then
          par
            if exists y (parent(x, y) and value(y) = true) then
              value(x) := true
            endif
            if forall y (parent(x, y) -> value(y) = false) then
              value(x) := false
            endif
          endpar
        endif
        if QForall(stateOf(config(x))) then
          par
            if exists y (parent(x, y)) and forall y (parent(x, y) -> value(y) = true) then
              value(x) := true
            endif
            if exists y (parent(x, y) and value(y) = false) then
              value(x) := false
            endif
          endpar
        endif
      endpar
    endif
  endpar
enddo
)";

const char* foeval = R"(
machine foeval
vocab
  subForm/1 primary relational
  superForm/2 primary relational
  Atomic/1 primary relational
  mainConnect/1 primary
  mainQuant/1 primary
  eval/1 bridge relational
  truthVal/1 bridge dynamic
rule
forall x with subForm(x) do
  if truthVal(x) = undef then
    par
      if Atomic(x) then
        truthVal(x) := eval(x)
      endif
      if not(Atomic(x)) then
        if forall y (superForm(x, y) -> not(truthVal(y) = undef)) then
          par
            if mainConnect(x) = @and then
              truthVal(x) := {{ y | superForm(x, y) and truthVal(y) = false }} = {{}}
            endif
            if mainConnect(x) = @or then
              truthVal(x) := not({{ y | superForm(x, y) and truthVal(y) = true }} = {{}})
            endif
            if mainConnect(x) = @not then
              truthVal(x) := {{ y | superForm(x, y) and truthVal(y) = true }} = {{}}
            endif
            if mainQuant(x) = @exists then
              truthVal(x) := not({{ y | superForm(x, y) and truthVal(y) = true }} = {{}})
            endif
            if mainQuant(x) = @forall then
              truthVal(x) := {{ y | superForm(x, y) and not(truthVal(y) = true) }} = {{}}
            endif
          endpar
        endif
      endif
    endpar
  endif
enddo
)";

const char* bfs = R"(
machine bfs
vocab
  fV/1 primary relational
  neighb/1 primary
  listedIn/2 primary relational
  colour/1 primary dynamic
  phase/0 primary dynamic
  mapout/2 bridge dynamic relational
  valuesOf/1 bridge dynamic
  darkest/1 secondary
base multisets
rule
par
  if phase = @map then
    par
      forall x with fV(x) do
        par
          if not(colour(x) = @grey) then
            mapout(x, colour(x)) := true
          endif
          if colour(x) = @grey then
            par
              forall y with listedIn(y, neighb(x)) do
                mapout(y, @grey) := true
              enddo
              mapout(x, @black) := true
            endpar
          endif
        endpar
      enddo
      phase := @shuffle
    endpar
  endif
  if phase = @shuffle then
    par
      forall x with exists y (mapout(x, y)) do
        par
          valuesOf(x) := {{ y | mapout(x, y) }}
          forall y with mapout(x, y) do
            mapout(x, y) := false
          enddo
        endpar
      enddo
      phase := @reduce
    endpar
  endif
  if phase = @reduce then
    par
      forall x with not(valuesOf(x) = {{}}) do
        par
          colour(x) := darkest(valuesOf(x))
          valuesOf(x) := {{}}
        endpar
      enddo
      phase := @map
    endpar
  endif
endpar
)";

}  // namespace gallery_src

namespace {

Value atom(const std::string& label) { return Value::named_atom(label); }

// One fired step, with the normalized update set recorded for later checks.
State step_rec(const Machine& m, const State& s, std::vector<StepRecord>* sink) {
  UpdateSet u = machine_update_set(m, s);
  if (sink != nullptr) sink->push_back({m.name, s, u.normalized_against(s)});
  return s.fire(u);
}

struct RunRec {
  State final_state;
  bool fixpoint = false;
  int steps = 0;
};

RunRec run_rec(const Machine& m, State s, int max_steps, std::vector<StepRecord>* sink) {
  RunRec r;
  for (int i = 0; i < max_steps; ++i) {
    UpdateSet u = machine_update_set(m, s);
    if (u.trivial_on(s)) {
      r.fixpoint = true;
      break;
    }
    if (sink != nullptr) sink->push_back({m.name, s, u.normalized_against(s)});
    s = s.fire(u);
    ++r.steps;
  }
  r.final_state = s;
  return r;
}

struct Checker {
  GallerySection sec;

  explicit Checker(std::string name) { sec.name = std::move(name); }

  void expect(bool ok, const std::string& what) {
    ++sec.checks;
    if (!ok && sec.failures.size() < 20) sec.failures.push_back(what);
    if (!ok && sec.failures.size() == 20) sec.failures.push_back("(more failures suppressed)");
  }
};

}  // namespace

// --- complement ---

Machine complement_machine() { return parse_machine_text(gallery_src::complement, "complement"); }

State complement_state(int n, const std::vector<std::pair<int, int>>& edges) {
  Machine m = complement_machine();
  State s(m.vocab);
  s.set_base(m.base);
  for (int i = 0; i < n; ++i) {
    Value v = atom("v" + std::to_string(i));
    s.add_carrier(v);
    s.set_fun("V", {v}, Value::boolean(true));
  }
  for (const auto& [a, b] : edges) {
    s.set_fun("E", {atom("v" + std::to_string(a)), atom("v" + std::to_string(b))},
              Value::boolean(true));
  }
  return s;
}

std::set<std::pair<int, int>> complement_oracle(int n,
                                                const std::vector<std::pair<int, int>>& edges) {
  std::set<std::pair<int, int>> present(edges.begin(), edges.end());
  std::set<std::pair<int, int>> out;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b && !present.count({a, b})) out.insert({a, b});
    }
  }
  return out;
}

GallerySection verify_complement(std::vector<StepRecord>* steps) {
  Checker ck("complement");
  Machine m = complement_machine();
  std::mt19937_64 rng(401);
  for (int n = 0; n <= 5; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<std::pair<int, int>> edges;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          if (a != b && rng() % 2 == 0) edges.push_back({a, b});
        }
      }
      State s0 = complement_state(n, edges);
      State s1 = step_rec(m, s0, steps);
      std::set<std::pair<int, int>> want = complement_oracle(n, edges);
      bool table_ok = true;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          Value va = atom("v" + std::to_string(a));
          Value vb = atom("v" + std::to_string(b));
          bool got = s1.lookup("E", {va, vb}).is_true();
          if (got != (want.count({a, b}) > 0)) table_ok = false;
        }
      }
      ck.expect(table_ok, "complement table mismatch at n=" + std::to_string(n));
      State s2 = step_rec(m, s1, steps);
      ck.expect(s2.equivalent(s0), "double complement is not the identity at n=" + std::to_string(n));
    }
  }
  return ck.sec;
}

// --- circuit ---

Machine circuit_machine() { return parse_machine_text(gallery_src::circuit, "circuit"); }

namespace {

Value gate_atom(int g) { return atom("c" + std::to_string(g)); }

}  // namespace

State circuit_state(const Circuit& c, const std::vector<bool>& input_values) {
  if (static_cast<int>(input_values.size()) != c.inputs) {
    throw FixtureError("circuit expects " + std::to_string(c.inputs) + " input values");
  }
  Machine m = circuit_machine();
  State s(m.vocab);
  s.set_base(m.base);
  for (const char* lbl : {"not", "or", "and"}) s.add_carrier(atom(lbl));
  for (int g = 0; g < c.size(); ++g) {
    s.add_carrier(gate_atom(g));
    s.set_fun("fV", {gate_atom(g)}, Value::boolean(true));
  }
  for (int i = 0; i < c.inputs; ++i) {
    s.set_fun("val", {gate_atom(i)}, Value::boolean(input_values[i]));
  }
  for (std::size_t k = 0; k < c.gates.size(); ++k) {
    int g = c.inputs + static_cast<int>(k);
    const Circuit::Gate& gate = c.gates[k];
    const char* lbl = gate.op == '!' ? "not" : (gate.op == '|' ? "or" : "and");
    s.set_fun("fLam", {gate_atom(g)}, atom(lbl));
    for (int p : gate.preds) s.set_fun("fE", {gate_atom(p), gate_atom(g)}, Value::boolean(true));
  }
  return s;
}

std::vector<bool> circuit_oracle(const Circuit& c, const std::vector<bool>& input_values) {
  int n = c.size();
  std::vector<bool> value(n, false);
  std::vector<bool> known(n, false);
  for (int i = 0; i < c.inputs; ++i) {
    value[i] = input_values[i];
    known[i] = true;
  }
  // Relax until fixpoint; leftover unknown gates form a cycle.
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
      int g = c.inputs + static_cast<int>(k);
      if (known[g]) continue;
      const Circuit::Gate& gate = c.gates[k];
      bool ready = true;
      for (int p : gate.preds) ready = ready && known[p];
      if (!ready) continue;
      int trues = 0;
      for (int p : gate.preds) trues += value[p] ? 1 : 0;
      int falses = static_cast<int>(gate.preds.size()) - trues;
      if (gate.op == '!') value[g] = trues == 0;
      if (gate.op == '|') value[g] = trues > 0;
      if (gate.op == '&') value[g] = falses == 0;
      known[g] = true;
      progress = true;
    }
  }
  for (int g = 0; g < n; ++g) {
    if (!known[g]) throw FixtureError("circuit has a cycle through gate " + std::to_string(g));
  }
  return value;
}

GallerySection verify_circuit(std::vector<StepRecord>* steps) {
  Checker ck("circuit");
  Machine m = circuit_machine();
  std::vector<Circuit> family;
  // Chain of inverters.
  family.push_back({1, {{'!', {0}}, {'!', {1}}, {'!', {2}}, {'!', {3}}, {'!', {4}}}});
  // Single binary gates.
  family.push_back({2, {{'&', {0, 1}}}});
  family.push_back({2, {{'|', {0, 1}}}});
  // (x0 and x1) or not(x2).
  family.push_back({3, {{'&', {0, 1}}, {'!', {2}}, {'|', {3, 4}}}});
  // Shared subterm: (x0 and x1), (x1 and x2), disjunction of both.
  family.push_back({3, {{'&', {0, 1}}, {'&', {1, 2}}, {'|', {3, 4}}}});
  // Wide gates: 3-ary nor and 3-ary and.
  family.push_back({3, {{'!', {0, 1, 2}}, {'&', {0, 1, 2}}, {'|', {3, 4}}}});
  for (std::size_t ci = 0; ci < family.size(); ++ci) {
    const Circuit& c = family[ci];
    for (int bits = 0; bits < (1 << c.inputs); ++bits) {
      std::vector<bool> in;
      for (int i = 0; i < c.inputs; ++i) in.push_back(((bits >> i) & 1) != 0);
      std::vector<bool> want = circuit_oracle(c, in);
      RunRec run = run_rec(m, circuit_state(c, in), c.size() + 2, steps);
      ck.expect(run.fixpoint, "circuit run did not settle");
      bool vals_ok = true;
      for (int g = 0; g < c.size(); ++g) {
        Value got = run.final_state.lookup("val", {gate_atom(g)});
        if (!got.is_bool() || got.is_true() != want[g]) vals_ok = false;
      }
      ck.expect(vals_ok, "circuit " + std::to_string(ci) + " wrong value at input " +
                             std::to_string(bits));
    }
  }
  return ck.sec;
}

// --- pram ---

Machine pram_machine() { return parse_machine_text(gallery_src::pram, "pram"); }

namespace {

Value prog_atom(int i) { return atom("p" + std::to_string(i)); }
Value line_atom(int l) { return atom("L" + std::to_string(l)); }

// Registers that can ever be named by the fixture: accumulators, direct
// operands, input registers and the input values (possible indirect targets).
std::set<int> register_universe(const std::vector<PramProgram>& programs,
                                const std::map<int, int>& inputs) {
  std::set<int> regs;
  for (std::size_t i = 0; i < programs.size(); ++i) regs.insert(static_cast<int>(i) + 1);
  for (const PramProgram& p : programs) {
    for (const PramInstr& ins : p) {
      if (ins.op != "HALT" && ins.operand > 0) regs.insert(ins.operand);
    }
  }
  for (const auto& [k, v] : inputs) {
    if (k > 0) regs.insert(k);
    if (v > 0) regs.insert(v);
  }
  return regs;
}

}  // namespace

State pram_state(const std::vector<PramProgram>& programs, const std::map<int, int>& inputs) {
  Machine m = pram_machine();
  State s(m.vocab);
  s.set_base(m.base);
  int q = static_cast<int>(programs.size());
  std::size_t max_len = 0;
  for (const PramProgram& p : programs) max_len = std::max(max_len, p.size());
  for (const char* lbl : {"READ", "STORE", "HALT", "direct", "indirect"}) s.add_carrier(atom(lbl));
  for (int l = 0; l <= static_cast<int>(max_len); ++l) s.add_carrier(line_atom(l));
  for (int l = 1; l < static_cast<int>(max_len); ++l) s.set_fun("lineSucc", {line_atom(l)}, line_atom(l + 1));
  if (max_len > 0) s.set_fun("lineSucc", {line_atom(static_cast<int>(max_len))}, line_atom(0));
  for (int i = 1; i <= q; ++i) {
    s.add_carrier(prog_atom(i));
    s.set_fun("P", {prog_atom(i)}, Value::boolean(true));
    s.set_fun("accReg", {prog_atom(i)}, Value::integer(i));
    s.set_fun("kappa", {prog_atom(i)}, line_atom(programs[static_cast<std::size_t>(i - 1)].empty() ? 0 : 1));
    for (int j = 1; j < i; ++j) s.set_fun("progBefore", {prog_atom(j), prog_atom(i)}, Value::boolean(true));
    const PramProgram& p = programs[static_cast<std::size_t>(i - 1)];
    for (std::size_t l = 0; l < p.size(); ++l) {
      Value line = line_atom(static_cast<int>(l) + 1);
      s.set_fun("Inst", {prog_atom(i), line}, atom(p[l].op));
      if (p[l].op != "HALT") {
        s.set_fun("OpType", {prog_atom(i), line}, atom(p[l].mode == 'i' ? "indirect" : "direct"));
        s.set_fun("OpVal", {prog_atom(i), line}, Value::integer(p[l].operand));
      }
    }
  }
  for (const auto& [k, v] : inputs) s.set_fun("I", {Value::integer(k)}, Value::integer(v));
  for (int r : register_universe(programs, inputs)) s.set_fun("R", {Value::integer(r)}, Value::integer(0));
  s.set_fun("mode", {}, Value::integer(0));
  return s;
}

PramResult pram_oracle(const std::vector<PramProgram>& programs, const std::map<int, int>& inputs,
                       int cycles) {
  int q = static_cast<int>(programs.size());
  PramResult res;
  for (int r : register_universe(programs, inputs)) res.registers[r] = 0;
  res.counters.assign(static_cast<std::size_t>(q), 0);
  for (int i = 0; i < q; ++i) {
    res.counters[static_cast<std::size_t>(i)] = programs[static_cast<std::size_t>(i)].empty() ? 0 : 1;
  }
  for (int cycle = 0; cycle < cycles; ++cycle) {
    // Phase one: every live machine issues at most one write request.
    std::map<int, std::pair<int, int>> writes;  // program -> (register, value)
    for (int i = 1; i <= q; ++i) {
      int& k = res.counters[static_cast<std::size_t>(i - 1)];
      if (k == 0) continue;
      const PramProgram& p = programs[static_cast<std::size_t>(i - 1)];
      if (k > static_cast<int>(p.size())) {
        k = 0;
        continue;
      }
      const PramInstr& ins = p[static_cast<std::size_t>(k - 1)];
      if (ins.op == "HALT") {
        k = 0;
        continue;
      }
      int acc = i;
      if (ins.op == "READ") {
        int src = ins.mode == 'i' ? res.registers.at(ins.operand) : ins.operand;
        writes[i] = {acc, inputs.at(src)};
      } else if (ins.op == "STORE") {
        int dst = ins.mode == 'i' ? res.registers.at(ins.operand) : ins.operand;
        writes[i] = {dst, res.registers.at(acc)};
      }
      k = k + 1 > static_cast<int>(p.size()) ? 0 : k + 1;
    }
    // Phase two: apply requests, smallest program index wins per register.
    std::map<int, int> winner;  // register -> program
    for (const auto& [i, rv] : writes) {
      auto it = winner.find(rv.first);
      if (it == winner.end() || i < it->second) winner[rv.first] = i;
    }
    for (const auto& [reg, i] : winner) res.registers[reg] = writes[i].second;
  }
  return res;
}

PramResult pram_read_result(const State& s, const std::vector<PramProgram>& programs,
                            const std::map<int, int>& inputs) {
  PramResult res;
  for (int r : register_universe(programs, inputs)) {
    Value v = s.lookup("R", {Value::integer(r)});
    res.registers[r] = v.is_int() ? static_cast<int>(v.as_int()) : 0;
  }
  std::size_t max_len = 0;
  for (const PramProgram& p : programs) max_len = std::max(max_len, p.size());
  for (int i = 1; i <= static_cast<int>(programs.size()); ++i) {
    Value k = s.lookup("kappa", {prog_atom(i)});
    int line = 0;
    for (int l = 0; l <= static_cast<int>(max_len); ++l) {
      if (k == line_atom(l)) line = l;
    }
    res.counters.push_back(line);
  }
  return res;
}

GallerySection verify_pram(std::vector<StepRecord>* steps) {
  Checker ck("pram");
  Machine m = pram_machine();
  auto run_case = [&](const std::vector<PramProgram>& programs, const std::map<int, int>& inputs,
                      int cycles, const std::string& what) {
    State s = pram_state(programs, inputs);
    for (int i = 0; i < 2 * cycles; ++i) s = step_rec(m, s, steps);
    PramResult got = pram_read_result(s, programs, inputs);
    PramResult want = pram_oracle(programs, inputs, cycles);
    ck.expect(got.registers == want.registers, what + ": registers diverge");
    ck.expect(got.counters == want.counters, what + ": counters diverge");
    return got;
  };

  // Two writers store different accumulator contents into register 7 in the
  // same cycle; the smaller program index must win.
  {
    std::vector<PramProgram> progs = {
        {{"READ", 'd', 11}, {"STORE", 'd', 7}, {"HALT", 'd', 0}},
        {{"READ", 'd', 12}, {"STORE", 'd', 7}, {"HALT", 'd', 0}},
    };
    std::map<int, int> inputs = {{11, 5}, {12, 9}};
    PramResult got = run_case(progs, inputs, 4, "two-writer conflict");
    ck.expect(got.registers.at(7) == 5, "conflict resolution must favour the smaller index");
  }
  // Indirect store: program 1 reads an address from input 11, then stores
  // through it; the address register holds input value 4.
  {
    std::vector<PramProgram> progs = {
        {{"READ", 'd', 11}, {"STORE", 'i', 1}, {"HALT", 'd', 0}},
    };
    std::map<int, int> inputs = {{11, 4}};
    PramResult got = run_case(progs, inputs, 4, "indirect store");
    ck.expect(got.registers.at(4) == 4, "indirect store should land in register 4");
  }
  // Indirect read: register 1 holds 13 after the first READ, so the second
  // READ fetches I(R(1)) = I(13).
  {
    std::vector<PramProgram> progs = {
        {{"READ", 'd', 11}, {"READ", 'i', 1}, {"HALT", 'd', 0}},
    };
    std::map<int, int> inputs = {{11, 13}, {13, 42}};
    PramResult got = run_case(progs, inputs, 4, "indirect read");
    ck.expect(got.registers.at(1) == 42, "indirect read should load I(13)");
  }
  // Seeded direct-only program sets.
  std::mt19937_64 rng(402);
  for (int rep = 0; rep < 10; ++rep) {
    int q = 1 + static_cast<int>(rng() % 3);
    std::map<int, int> inputs;
    for (int k = 0; k < 3; ++k) inputs[11 + k] = static_cast<int>(rng() % 50);
    std::vector<PramProgram> progs;
    for (int i = 0; i < q; ++i) {
      PramProgram p;
      int len = static_cast<int>(rng() % 3);
      for (int l = 0; l < len; ++l) {
        if (rng() % 2 == 0) {
          p.push_back({"READ", 'd', 11 + static_cast<int>(rng() % 3)});
        } else {
          p.push_back({"STORE", 'd', 5 + static_cast<int>(rng() % 4)});
        }
      }
      p.push_back({"HALT", 'd', 0});
      progs.push_back(p);
    }
    run_case(progs, inputs, 5, "seeded case " + std::to_string(rep));
  }
  return ck.sec;
}

// --- alternating machines ---

Machine atm_machine() { return parse_machine_text(gallery_src::atm, "atm"); }

namespace {

struct Conf {
  std::vector<int> left;
  int q = 0;
  std::vector<int> right;  // head on front; empty means the head reads blank

  bool operator<(const Conf& o) const {
    return std::tie(left, q, right) < std::tie(o.left, o.q, o.right);
  }
};

Conf trim(Conf c) {
  std::size_t drop = 0;
  while (drop < c.left.size() && c.left[drop] == 0) ++drop;
  c.left.erase(c.left.begin(), c.left.begin() + static_cast<std::ptrdiff_t>(drop));
  while (!c.right.empty() && c.right.back() == 0) c.right.pop_back();
  return c;
}

int conf_read(const Conf& c) { return c.right.empty() ? 0 : c.right[0]; }

Conf conf_next(const Conf& c, int q, int a, char move) {
  Conf n = c;
  n.q = q;
  if (n.right.empty()) n.right.push_back(a); else n.right[0] = a;
  if (move == 'R') {
    n.left.push_back(n.right[0]);
    n.right.erase(n.right.begin());
  } else {
    int carried = 0;
    if (!n.left.empty()) {
      carried = n.left.back();
      n.left.pop_back();
    }
    n.right.insert(n.right.begin(), carried);
  }
  return trim(n);
}

Value sym_atom(int a) { return atom("s" + std::to_string(a)); }
Value q_atom(int q) { return atom("q" + std::to_string(q)); }

Value enc_tape(const std::vector<int>& tape) {
  std::vector<Value> parts;
  for (int a : tape) parts.push_back(sym_atom(a));
  return Value::tuple(parts);
}

Value enc_conf(const Conf& c) {
  return Value::pair(enc_tape(c.left), Value::pair(q_atom(c.q), enc_tape(c.right)));
}

std::vector<std::tuple<int, int, char>> successors(const AtmSpec& spec, const Conf& c) {
  auto it = spec.delta.find({c.q, conf_read(c)});
  if (it == spec.delta.end()) return {};
  return it->second;
}

}  // namespace

State atm_state(const AtmSpec& spec, const std::vector<int>& input, int depth) {
  Machine m = atm_machine();
  State s(m.vocab);
  s.set_base(m.base);
  s.add_carrier(atom("L"));
  s.add_carrier(atom("R"));
  for (int a = 0; a < spec.tape_symbols; ++a) {
    s.add_carrier(sym_atom(a));
    s.set_fun("Gamma", {sym_atom(a)}, Value::boolean(true));
  }
  for (std::size_t q = 0; q < spec.kinds.size(); ++q) {
    s.add_carrier(q_atom(static_cast<int>(q)));
    const char* cls = nullptr;
    switch (spec.kinds[q]) {
      case AtmSpec::Kind::Exists: cls = "QExists"; break;
      case AtmSpec::Kind::Forall: cls = "QForall"; break;
      case AtmSpec::Kind::Accept: cls = "QAcc"; break;
      case AtmSpec::Kind::Reject: cls = "QRej"; break;
    }
    s.set_fun(cls, {q_atom(static_cast<int>(q))}, Value::boolean(true));
  }
  for (const auto& [qa, outs] : spec.delta) {
    for (const auto& [q2, a2, mv] : outs) {
      s.set_fun("delta",
                {q_atom(qa.first), sym_atom(qa.second), q_atom(q2), sym_atom(a2),
                 atom(mv == 'R' ? "R" : "L")},
                Value::boolean(true));
    }
  }
  // Configuration space to the depth bound, with lookup tables for the
  // encoded strings.
  Conf root = trim({{}, 0, input});
  std::set<Conf> seen = {root};
  std::deque<std::pair<Conf, int>> frontier = {{root, 0}};
  while (!frontier.empty()) {
    auto [c, d] = frontier.front();
    frontier.pop_front();
    Value cv = enc_conf(c);
    s.set_fun("stateOf", {cv}, q_atom(c.q));
    s.set_fun("readOf", {cv}, sym_atom(conf_read(c)));
    if (d >= depth) continue;
    for (const auto& [q2, a2, mv] : successors(spec, c)) {
      Conf n = conf_next(c, q2, a2, mv);
      s.set_fun("nextConfig", {cv, q_atom(q2), sym_atom(a2), atom(mv == 'R' ? "R" : "L")},
                enc_conf(n));
      if (!seen.count(n)) {
        seen.insert(n);
        frontier.push_back({n, d + 1});
      }
    }
  }
  s.add_carrier(atom("n0"));
  s.set_fun("config", {atom("n0")}, enc_conf(root));
  s.set_fun("active", {atom("n0")}, Value::boolean(true));
  return s;
}

namespace {

// Three-valued acceptance with a step budget. A final configuration settles
// one step after its node appears; an inner node settles two steps after the
// last child value it depends on.
Verdict atm_eval(const AtmSpec& spec, const Conf& c, int fuel,
                 std::map<std::pair<Conf, int>, Verdict>& memo) {
  auto key = std::make_pair(c, fuel);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  Verdict out = Verdict::Unknown;
  AtmSpec::Kind kind = spec.kinds[static_cast<std::size_t>(c.q)];
  if (kind == AtmSpec::Kind::Accept) {
    out = fuel >= 1 ? Verdict::Accept : Verdict::Unknown;
  } else if (kind == AtmSpec::Kind::Reject) {
    out = fuel >= 1 ? Verdict::Reject : Verdict::Unknown;
  } else if (fuel >= 2) {
    std::vector<Verdict> kids;
    for (const auto& [q2, a2, mv] : successors(spec, c)) {
      kids.push_back(atm_eval(spec, conf_next(c, q2, a2, mv), fuel - 2, memo));
    }
    bool any_accept = false, any_reject = false, all_accept = true, all_reject = true;
    for (Verdict v : kids) {
      any_accept = any_accept || v == Verdict::Accept;
      any_reject = any_reject || v == Verdict::Reject;
      all_accept = all_accept && v == Verdict::Accept;
      all_reject = all_reject && v == Verdict::Reject;
    }
    if (kind == AtmSpec::Kind::Exists) {
      if (any_accept) out = Verdict::Accept;
      else if (all_reject) out = Verdict::Reject;  // vacuous for a leaf
    } else {
      if (any_reject) out = Verdict::Reject;
      else if (!kids.empty() && all_accept) out = Verdict::Accept;
    }
  }
  memo[key] = out;
  return out;
}

}  // namespace

Verdict atm_oracle(const AtmSpec& spec, const std::vector<int>& input, int depth) {
  std::map<std::pair<Conf, int>, Verdict> memo;
  return atm_eval(spec, trim({{}, 0, input}), depth, memo);
}

Verdict atm_read_root(const State& s) {
  Value v = s.lookup("value", {atom("n0")});
  if (v.is_true()) return Verdict::Accept;
  if (v.is_false()) return Verdict::Reject;
  return Verdict::Unknown;
}

GallerySection verify_atm(std::vector<StepRecord>* steps) {
  Checker ck("atm");
  Machine m = atm_machine();
  const int kRunSteps = 6;
  std::vector<std::pair<AtmSpec, std::vector<std::vector<int>>>> cases;

  auto inputs_upto = [](int symbols, int max_len) {
    std::vector<std::vector<int>> out = {{}};
    std::vector<std::vector<int>> layer = {{}};
    for (int l = 0; l < max_len; ++l) {
      std::vector<std::vector<int>> next;
      for (const auto& w : layer) {
        for (int a = 1; a < symbols; ++a) {
          std::vector<int> w2 = w;
          w2.push_back(a);
          next.push_back(w2);
        }
      }
      out.insert(out.end(), next.begin(), next.end());
      layer = next;
    }
    return out;
  };

  {
    // Walks right over the input; accepts at the first blank. Purely
    // existential and deterministic.
    AtmSpec spec;
    spec.kinds = {AtmSpec::Kind::Exists, AtmSpec::Kind::Accept};
    spec.delta[{0, 1}] = {{0, 1, 'R'}};
    spec.delta[{0, 0}] = {{1, 0, 'R'}};
    cases.push_back({spec, inputs_upto(2, 3)});
  }
  {
    // Left-moving loop: never settles.
    AtmSpec spec;
    spec.kinds = {AtmSpec::Kind::Exists, AtmSpec::Kind::Accept};
    spec.delta[{0, 0}] = {{0, 0, 'L'}};
    spec.delta[{0, 1}] = {{0, 1, 'L'}};
    cases.push_back({spec, inputs_upto(2, 2)});
  }
  {
    // Existential leaf: no transitions at all, so the root rejects.
    AtmSpec spec;
    spec.kinds = {AtmSpec::Kind::Exists, AtmSpec::Kind::Accept};
    cases.push_back({spec, {{}, {1}}});
  }
  {
    // Universal leaf: no children means the value never settles.
    AtmSpec spec;
    spec.kinds = {AtmSpec::Kind::Forall, AtmSpec::Kind::Accept};
    cases.push_back({spec, {{}, {1}}});
  }
  {
    // Root in a final state.
    AtmSpec spec;
    spec.kinds = {AtmSpec::Kind::Accept, AtmSpec::Kind::Reject};
    cases.push_back({spec, {{}, {1}}});
    AtmSpec rej;
    rej.kinds = {AtmSpec::Kind::Reject, AtmSpec::Kind::Accept};
    cases.push_back({rej, {{}}});
  }
  {
    // Universal branch into one accepting and one rejecting path.
    AtmSpec spec;
    spec.kinds = {AtmSpec::Kind::Forall, AtmSpec::Kind::Exists, AtmSpec::Kind::Accept,
                  AtmSpec::Kind::Reject};
    spec.delta[{0, 1}] = {{2, 1, 'R'}, {3, 1, 'R'}};
    spec.delta[{0, 0}] = {{2, 0, 'R'}};
    spec.delta[{1, 0}] = {{2, 0, 'R'}};
    cases.push_back({spec, inputs_upto(2, 2)});
  }
  // Seeded families over two and three tape symbols, mixing existential and
  // universal branching with bounded fan-out.
  std::mt19937_64 rng(403);
  for (int rep = 0; rep < 24; ++rep) {
    AtmSpec spec;
    spec.tape_symbols = rep % 3 == 2 ? 3 : 2;
    int states = 2 + static_cast<int>(rng() % 3);
    for (int q = 0; q < states; ++q) {
      if (q >= states - 2) {
        spec.kinds.push_back(q == states - 1 ? AtmSpec::Kind::Reject : AtmSpec::Kind::Accept);
      } else {
        spec.kinds.push_back(rng() % 2 == 0 ? AtmSpec::Kind::Exists : AtmSpec::Kind::Forall);
      }
    }
    for (int q = 0; q < states - 2; ++q) {
      for (int a = 0; a < spec.tape_symbols; ++a) {
        int fan = static_cast<int>(rng() % 3);
        std::vector<std::tuple<int, int, char>> outs;
        for (int k = 0; k < fan; ++k) {
          outs.push_back({static_cast<int>(rng() % static_cast<std::uint64_t>(states)),
                          static_cast<int>(rng() % static_cast<std::uint64_t>(spec.tape_symbols)),
                          rng() % 2 == 0 ? 'R' : 'L'});
        }
        if (!outs.empty()) spec.delta[{q, a}] = outs;
      }
    }
    int max_len = spec.tape_symbols == 3 ? 2 : 3;
    cases.push_back({spec, inputs_upto(spec.tape_symbols, max_len)});
  }

  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& [spec, inputs] = cases[ci];
    for (const auto& input : inputs) {
      State s = atm_state(spec, input, kRunSteps + 2);
      for (int i = 0; i < kRunSteps; ++i) s = step_rec(m, s, steps);
      Verdict got = atm_read_root(s);
      Verdict want = atm_oracle(spec, input, kRunSteps);
      ck.expect(got == want, "atm case " + std::to_string(ci) + " verdict mismatch");
    }
  }
  return ck.sec;
}

// --- first-order evaluation ---

Machine fo_machine() { return parse_machine_text(gallery_src::foeval, "foeval"); }

FoFormula FoFormula::atom(std::string rel, std::vector<int> args) {
  FoFormula f;
  f.kind = Kind::Atom;
  f.rel = std::move(rel);
  f.arg_vars = std::move(args);
  return f;
}

FoFormula FoFormula::conj(FoFormula a, FoFormula b) {
  FoFormula f;
  f.kind = Kind::And;
  f.children = {std::move(a), std::move(b)};
  return f;
}

FoFormula FoFormula::disj(FoFormula a, FoFormula b) {
  FoFormula f;
  f.kind = Kind::Or;
  f.children = {std::move(a), std::move(b)};
  return f;
}

FoFormula FoFormula::neg(FoFormula a) {
  FoFormula f;
  f.kind = Kind::Not;
  f.children = {std::move(a)};
  return f;
}

FoFormula FoFormula::exists(int var, FoFormula a) {
  FoFormula f;
  f.kind = Kind::Exists;
  f.var = var;
  f.children = {std::move(a)};
  return f;
}

FoFormula FoFormula::forall(int var, FoFormula a) {
  FoFormula f;
  f.kind = Kind::Forall;
  f.var = var;
  f.children = {std::move(a)};
  return f;
}

namespace {

void fo_free_vars(const FoFormula& f, std::set<int>& out) {
  if (f.kind == FoFormula::Kind::Atom) {
    out.insert(f.arg_vars.begin(), f.arg_vars.end());
    return;
  }
  std::set<int> inner;
  for (const FoFormula& c : f.children) fo_free_vars(c, inner);
  if (f.kind == FoFormula::Kind::Exists || f.kind == FoFormula::Kind::Forall) inner.erase(f.var);
  out.insert(inner.begin(), inner.end());
}

bool fo_eval(const FoFormula& f, const FoStructure& st, std::map<int, int>& env) {
  switch (f.kind) {
    case FoFormula::Kind::Atom: {
      std::vector<int> args;
      for (int v : f.arg_vars) args.push_back(env.at(v));
      auto it = st.relations.find(f.rel);
      return it != st.relations.end() && it->second.count(args) > 0;
    }
    case FoFormula::Kind::And:
      return fo_eval(f.children[0], st, env) && fo_eval(f.children[1], st, env);
    case FoFormula::Kind::Or:
      return fo_eval(f.children[0], st, env) || fo_eval(f.children[1], st, env);
    case FoFormula::Kind::Not:
      return !fo_eval(f.children[0], st, env);
    case FoFormula::Kind::Exists:
    case FoFormula::Kind::Forall: {
      bool all = true, any = false;
      for (int d = 0; d < st.domain; ++d) {
        auto saved = env.find(f.var);
        int old = saved == env.end() ? -1 : saved->second;
        bool had = saved != env.end();
        env[f.var] = d;
        bool h = fo_eval(f.children[0], st, env);
        if (had) env[f.var] = old; else env.erase(f.var);
        all = all && h;
        any = any || h;
      }
      return f.kind == FoFormula::Kind::Exists ? any : all;
    }
  }
  return false;
}

void fo_print(const FoFormula& f, std::ostream& os) {
  switch (f.kind) {
    case FoFormula::Kind::Atom:
      os << f.rel << "(";
      for (std::size_t i = 0; i < f.arg_vars.size(); ++i) os << (i ? "," : "") << f.arg_vars[i];
      os << ")";
      return;
    case FoFormula::Kind::And:
    case FoFormula::Kind::Or:
      os << (f.kind == FoFormula::Kind::And ? "(&" : "(|");
      for (const FoFormula& c : f.children) {
        os << " ";
        fo_print(c, os);
      }
      os << ")";
      return;
    case FoFormula::Kind::Not:
      os << "(! ";
      fo_print(f.children[0], os);
      os << ")";
      return;
    case FoFormula::Kind::Exists:
    case FoFormula::Kind::Forall:
      os << (f.kind == FoFormula::Kind::Exists ? "(E" : "(A") << f.var << " ";
      fo_print(f.children[0], os);
      os << ")";
      return;
  }
}

// Instantiation nodes are (subformula, assignment to its free variables);
// formulas compare as syntax trees, so equal subformulas under equal
// restrictions collapse to one node wherever they occur.
struct FoBuilder {
  const FoStructure& st;
  State& s;
  std::map<std::string, Value> nodes;
  int next_id = 0;

  std::string key(const FoFormula* f, const std::map<int, int>& env) {
    std::ostringstream os;
    fo_print(*f, os);
    for (const auto& [v, d] : env) os << "," << v << "=" << d;
    return os.str();
  }

  Value build(const FoFormula& f, const std::map<int, int>& env) {
    std::set<int> free;
    fo_free_vars(f, free);
    std::map<int, int> restricted;
    for (int v : free) restricted[v] = env.at(v);
    std::string k = key(&f, restricted);
    auto it = nodes.find(k);
    if (it != nodes.end()) return it->second;
    Value node = atom("f" + std::to_string(next_id++));
    nodes[k] = node;
    s.add_carrier(node);
    s.set_fun("subForm", {node}, Value::boolean(true));
    switch (f.kind) {
      case FoFormula::Kind::Atom: {
        s.set_fun("Atomic", {node}, Value::boolean(true));
        std::map<int, int> env2 = restricted;
        bool holds_now = fo_eval(f, st, env2);
        s.set_fun("eval", {node}, Value::boolean(holds_now));
        break;
      }
      case FoFormula::Kind::And:
      case FoFormula::Kind::Or:
      case FoFormula::Kind::Not: {
        const char* lbl = f.kind == FoFormula::Kind::And
                              ? "and"
                              : (f.kind == FoFormula::Kind::Or ? "or" : "not");
        s.set_fun("mainConnect", {node}, atom(lbl));
        for (const FoFormula& c : f.children) {
          Value child = build(c, restricted);
          s.set_fun("superForm", {node, child}, Value::boolean(true));
        }
        break;
      }
      case FoFormula::Kind::Exists:
      case FoFormula::Kind::Forall: {
        s.set_fun("mainQuant", {node},
                  atom(f.kind == FoFormula::Kind::Exists ? "exists" : "forall"));
        for (int d = 0; d < st.domain; ++d) {
          std::map<int, int> env2 = restricted;
          env2[f.var] = d;
          Value child = build(f.children[0], env2);
          s.set_fun("superForm", {node, child}, Value::boolean(true));
        }
        break;
      }
    }
    return node;
  }
};

}  // namespace

State fo_state(const FoFormula& sentence, const FoStructure& structure) {
  std::set<int> free;
  fo_free_vars(sentence, free);
  if (!free.empty()) throw FixtureError("instantiated formula must be a sentence");
  if (structure.domain <= 0) throw FixtureError("structure needs a nonempty domain");
  Machine m = fo_machine();
  State s(m.vocab);
  s.set_base(m.base);
  for (const char* lbl : {"and", "or", "not", "exists", "forall"}) s.add_carrier(atom(lbl));
  FoBuilder b{structure, s, {}, 0};
  b.build(sentence, {});
  return s;
}

bool fo_oracle(const FoFormula& sentence, const FoStructure& structure) {
  std::map<int, int> env;
  return fo_eval(sentence, structure, env);
}

bool fo_read_root(const State& s) { return s.lookup("truthVal", {atom("f0")}).is_true(); }

GallerySection verify_fo(std::vector<StepRecord>* steps) {
  Checker ck("foeval");
  Machine m = fo_machine();
  std::mt19937_64 rng(404);

  auto gen_structure = [&]() {
    FoStructure st;
    st.domain = 2 + static_cast<int>(rng() % 3);
    for (int d = 0; d < st.domain; ++d) {
      if (rng() % 2 == 0) st.relations["Pr"].insert({d});
      for (int e = 0; e < st.domain; ++e) {
        if (rng() % 3 == 0) st.relations["Ed"].insert({d, e});
      }
    }
    return st;
  };

  std::function<FoFormula(int, std::vector<int>&)> gen = [&](int depth,
                                                             std::vector<int>& avail) -> FoFormula {
    bool want_atom = depth == 0 || (rng() % 4 == 0);
    if (want_atom && !avail.empty()) {
      if (rng() % 2 == 0) {
        return FoFormula::atom("Pr", {avail[rng() % avail.size()]});
      }
      return FoFormula::atom("Ed", {avail[rng() % avail.size()], avail[rng() % avail.size()]});
    }
    if (avail.empty() || (depth > 0 && rng() % 3 == 0)) {
      int var = static_cast<int>(avail.size()) % 3;
      avail.push_back(var);
      FoFormula body = gen(depth > 0 ? depth - 1 : 0, avail);
      avail.pop_back();
      return rng() % 2 == 0 ? FoFormula::exists(var, std::move(body))
                            : FoFormula::forall(var, std::move(body));
    }
    switch (rng() % 3) {
      case 0:
        return FoFormula::conj(gen(depth - 1, avail), gen(depth - 1, avail));
      case 1:
        return FoFormula::disj(gen(depth - 1, avail), gen(depth - 1, avail));
      default:
        return FoFormula::neg(gen(depth - 1, avail));
    }
  };

  for (int rep = 0; rep < 30; ++rep) {
    FoStructure st = gen_structure();
    std::vector<int> avail;
    FoFormula sentence = gen(3, avail);
    State s0 = fo_state(sentence, st);
    RunRec run = run_rec(m, s0, 10, steps);
    ck.expect(run.fixpoint, "fo run did not settle");
    bool all_resolved = true;
    for (const Value& a : run.final_state.carrier()) {
      if (run.final_state.lookup("subForm", {a}).is_true() &&
          !run.final_state.lookup("truthVal", {a}).is_bool()) {
        all_resolved = false;
      }
    }
    ck.expect(all_resolved, "fo instance left a node unresolved");
    ck.expect(fo_read_root(run.final_state) == fo_oracle(sentence, st),
              "fo sentence " + std::to_string(rep) + " disagrees with the oracle");
  }
  return ck.sec;
}

// --- breadth-first search ---

Machine bfs_machine() { return parse_machine_text(gallery_src::bfs, "bfs"); }

namespace {

Value node_atom(int i) { return atom("u" + std::to_string(i)); }
Value adj_atom(int i) { return atom("adj" + std::to_string(i)); }

}  // namespace

State bfs_state(int n, const std::vector<std::pair<int, int>>& edges, int source) {
  if (n <= 0 || source < 0 || source >= n) throw FixtureError("bfs needs a source inside the graph");
  Machine m = bfs_machine();
  State s(m.vocab);
  s.set_base(m.base);
  for (const char* lbl : {"white", "grey", "black", "map", "shuffle", "reduce"}) s.add_carrier(atom(lbl));
  for (int i = 0; i < n; ++i) {
    s.add_carrier(node_atom(i));
    s.add_carrier(adj_atom(i));
    s.set_fun("fV", {node_atom(i)}, Value::boolean(true));
    s.set_fun("neighb", {node_atom(i)}, adj_atom(i));
    s.set_fun("colour", {node_atom(i)}, atom(i == source ? "grey" : "white"));
  }
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    s.set_fun("listedIn", {node_atom(b), adj_atom(a)}, Value::boolean(true));
    s.set_fun("listedIn", {node_atom(a), adj_atom(b)}, Value::boolean(true));
  }
  for (const Value& e : s.carrier()) s.set_fun("valuesOf", {e}, Value::empty_multiset());
  // Colour bags are sets here: the darkest table only needs the subsets.
  std::vector<Value> colours = {atom("white"), atom("grey"), atom("black")};
  for (int mask = 1; mask < 8; ++mask) {
    Value::MsetEntries entries;
    for (int c = 0; c < 3; ++c) {
      if ((mask >> c) & 1) entries.push_back({colours[static_cast<std::size_t>(c)], 1});
    }
    const char* darkest = (mask & 4) ? "black" : ((mask & 2) ? "grey" : "white");
    s.set_fun("darkest", {Value::multiset(entries)}, atom(darkest));
  }
  s.set_fun("phase", {}, atom("map"));
  return s;
}

std::set<int> bfs_oracle(int n, const std::vector<std::pair<int, int>>& edges, int source) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::set<int> seen = {source};
  std::deque<int> q = {source};
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen.count(w)) {
        seen.insert(w);
        q.push_back(w);
      }
    }
  }
  return seen;
}

GallerySection verify_bfs(std::vector<StepRecord>* steps) {
  Checker ck("bfs");
  Machine m = bfs_machine();
  std::mt19937_64 rng(405);
  for (int rep = 0; rep < 50; ++rep) {
    int n = 1 + static_cast<int>(rng() % 8);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (rng() % 10 < 3) edges.push_back({a, b});
      }
    }
    int source = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    State s = bfs_state(n, edges, source);
    for (int i = 0; i < 3 * (n + 2); ++i) s = step_rec(m, s, steps);
    std::set<int> want = bfs_oracle(n, edges, source);
    bool ok = true;
    for (int v = 0; v < n; ++v) {
      Value colour = s.lookup("colour", {node_atom(v)});
      bool reach = want.count(v) > 0;
      if (colour != atom(reach ? "black" : "white")) ok = false;
    }
    ck.expect(ok, "bfs graph " + std::to_string(rep) + " colours diverge from reachability");
    ck.expect(s.lookup("phase", {}) == atom("map"), "bfs should park in the map phase");
  }
  return ck.sec;
}

// --- aggregation ---

bool GalleryReport::ok() const {
  for (const GallerySection& s : sections) {
    if (!s.ok()) return false;
  }
  return true;
}

int GalleryReport::total_checks() const {
  int n = 0;
  for (const GallerySection& s : sections) n += s.checks;
  return n;
}

std::string GalleryReport::summary() const {
  std::ostringstream os;
  for (const GallerySection& s : sections) {
    os << s.name << ": " << s.checks << " checks, " << s.failures.size() << " failures\n";
    for (const std::string& f : s.failures) os << "  " << f << "\n";
  }
  return os.str();
}

GalleryReport verify_gallery(std::vector<StepRecord>* steps) {
  GalleryReport r;
  r.sections.push_back(verify_complement(steps));
  r.sections.push_back(verify_circuit(steps));
  r.sections.push_back(verify_pram(steps));
  r.sections.push_back(verify_atm(steps));
  r.sections.push_back(verify_fo(steps));
  r.sections.push_back(verify_bfs(steps));
  return r;
}

}  // namespace pasm
