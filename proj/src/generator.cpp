#include "pasm/generator.hpp"

#include <algorithm>
#include <string>

#include "pasm/errors.hpp"

namespace pasm {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

bool chance(std::mt19937_64& rng, int percent) {
  return static_cast<int>(rng() % 100) < percent;
}

// Atomic scalars only; pairs/multisets are layered on per the base declarations.
std::vector<Value> scalar_pool(const std::vector<Value>& carrier) {
  std::vector<Value> pool = {Value::undef(), Value::boolean(true), Value::boolean(false)};
  for (int i = 0; i <= 3; ++i) pool.push_back(Value::integer(i));
  for (const Value& a : carrier) pool.push_back(a);
  return pool;
}

std::vector<Value> value_pool(const std::vector<Value>& carrier, const BaseDecls& base,
                              std::mt19937_64& rng) {
  std::vector<Value> pool = scalar_pool(carrier);
  std::size_t scalars = pool.size();
  if (base.pairs) {
    for (int i = 0; i < 4; ++i) {
      pool.push_back(Value::pair(pool[pick(rng, scalars)], pool[pick(rng, scalars)]));
    }
  }
  if (base.multisets) {
    pool.push_back(Value::empty_multiset());
    for (int i = 0; i < 2; ++i) {
      pool.push_back(Value::multiset({{pool[pick(rng, scalars)], 1 + static_cast<std::int64_t>(
                                                                     rng() % 2)}}));
    }
  }
  return pool;
}

void enumerate_tuples(const std::vector<Value>& domain, int arity,
                      std::vector<std::vector<Value>>& out) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
  if (arity == 0) {
    out.push_back({});
    return;
  }
  if (domain.empty()) return;
  bool done = false;
  while (!done) {
    std::vector<Value> tuple;
    for (std::size_t i : idx) tuple.push_back(domain[i]);
    out.push_back(std::move(tuple));
    done = true;
    for (std::size_t pos = idx.size(); pos-- > 0;) {
      if (++idx[pos] < domain.size()) {
        done = false;
        break;
      }
      idx[pos] = 0;
    }
  }
}

Value range_value(const FunctionSymbol& sym, const std::vector<Value>& carrier,
                  const std::vector<Value>& pool, const State& s, std::mt19937_64& rng) {
  if (sym.relational) return Value::boolean(chance(rng, 50));
  if (sym.kind == SymbolKind::Primary) {
    if (carrier.empty() || chance(rng, 25)) return Value::undef();
    return carrier[pick(rng, carrier.size())];
  }
  for (int tries = 0; tries < 8; ++tries) {
    Value v = pool[pick(rng, pool.size())];
    if (s.atomic(v)) return v;
  }
  return Value::undef();
}

}  // namespace

State random_state(const Machine& m, std::mt19937_64& rng, int max_atoms) {
  State s(m.vocab);
  s.set_base(m.base);
  int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, max_atoms)));
  std::vector<Value> carrier;
  for (int i = 0; i < k; ++i) {
    Value a = Value::named_atom("g" + std::to_string(i));
    s.add_carrier(a);
    carrier.push_back(a);
  }
  std::vector<Value> pool = value_pool(carrier, m.base, rng);
  std::vector<Value> atomics;
  for (const Value& v : pool) {
    if (s.atomic(v)) atomics.push_back(v);
  }
  for (const auto& [name, sym] : m.vocab->symbols()) {
    const std::vector<Value>& arg_domain =
        (sym.kind == SymbolKind::Secondary) ? atomics : carrier;
    if (sym.arity > 3) continue;
    std::vector<std::vector<Value>> tuples;
    enumerate_tuples(arg_domain, sym.arity, tuples);
    // Secondary argument spaces can be large; sample instead of filling.
    bool sparse = sym.kind == SymbolKind::Secondary && sym.arity > 0;
    for (const auto& args : tuples) {
      if (sparse && !chance(rng, 30)) continue;
      if (!sym.relational && !chance(rng, 60)) continue;
      s.set_fun(name, args, range_value(sym, carrier, pool, s, rng));
    }
  }
  return s;
}

State random_runnable_state(const Machine& m, std::mt19937_64& rng, int max_atoms) {
  for (int tries = 0; tries < 64; ++tries) {
    State s = random_state(m, rng, max_atoms);
    try {
      machine_update_set(m, s);
      return s;
    } catch (const Error&) {
      continue;
    }
  }
  throw FixtureError("could not generate a runnable state for machine " + m.name);
}

namespace {

// Flip one table entry; returns false when no dynamic symbol offers a spot.
bool mutate(State& s, const Machine& m, std::mt19937_64& rng) {
  std::vector<std::string> dynamics;
  for (const auto& [name, sym] : m.vocab->symbols()) {
    if (sym.dynamic && sym.arity <= 3) dynamics.push_back(name);
  }
  if (dynamics.empty()) return false;
  const std::string& name = dynamics[pick(rng, dynamics.size())];
  const FunctionSymbol* sym = m.vocab->find(name);
  std::vector<Value> carrier = s.carrier();
  std::vector<Value> pool = value_pool(carrier, s.base(), rng);
  std::vector<std::vector<Value>> tuples;
  enumerate_tuples((sym->kind == SymbolKind::Secondary) ? pool : carrier, sym->arity, tuples);
  if (tuples.empty()) return false;
  const std::vector<Value>& args = tuples[pick(rng, tuples.size())];
  Value before = s.lookup(name, args);
  for (int tries = 0; tries < 8; ++tries) {
    Value v = range_value(*sym, carrier, pool, s, rng);
    if (!(v == before)) {
      try {
        s.set_fun(name, args, v);
      } catch (const Error&) {
        return false;
      }
      return true;
    }
  }
  return false;
}

bool runnable(const Machine& m, const State& s) {
  try {
    machine_update_set(m, s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::vector<std::pair<State, State>> exploration_pairs(const Machine& m, const WitnessSet& w,
                                                       const GeneratorOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::vector<std::pair<State, State>> out;
  out.reserve(opts.count);
  while (out.size() < opts.count) {
    State s = random_runnable_state(m, rng, opts.max_atoms);
    switch (out.size() % 3) {
      case 0:
        out.emplace_back(s, s);
        break;
      case 1: {
        // Hunt for a mutation the witness terms cannot see.
        State t = s;
        bool found = false;
        for (int tries = 0; tries < 12 && !found; ++tries) {
          State u = t;
          if (mutate(u, m, rng) && runnable(m, u) && coincide(s, u, w)) {
            t = u;
            found = true;
          }
        }
        out.emplace_back(s, t);
        break;
      }
      default:
        out.emplace_back(s, random_runnable_state(m, rng, opts.max_atoms));
        break;
    }
  }
  return out;
}

std::vector<std::pair<State, std::map<AtomId, AtomId>>> permutation_cases(
    const Machine& m, const GeneratorOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::vector<std::pair<State, std::map<AtomId, AtomId>>> out;
  out.reserve(opts.count);
  while (out.size() < opts.count) {
    State s = random_runnable_state(m, rng, opts.max_atoms);
    std::vector<Value> carrier = s.carrier();
    std::vector<Value> image = carrier;
    std::shuffle(image.begin(), image.end(), rng);
    std::map<AtomId, AtomId> perm;
    for (std::size_t i = 0; i < carrier.size(); ++i) {
      perm[carrier[i].atom_id()] = image[i].atom_id();
    }
    out.emplace_back(std::move(s), std::move(perm));
  }
  return out;
}

}  // namespace pasm
