#include "pasm/machine.hpp"

#include <sstream>

#include "pasm/errors.hpp"

namespace pasm {

Machine make_machine(const std::string& name, VocabularyPtr vocab, const BaseDecls& base,
                     const Rule& rule) {
  if (!vocab) throw VocabularyError("machine without a vocabulary");
  int next = 0;
  Rule numbered = number_import_sites(rule, next);
  auto free = rule_free_vars(numbered);
  if (!free.empty()) {
    throw RuleError("machine rule is not closed, free variable: " + *free.begin());
  }
  auto diags = rule_well_formed(numbered, *vocab);
  if (!diags.empty()) throw RuleError("ill-formed rule: " + diags[0]);
  return Machine{name, std::move(vocab), base, numbered};
}

namespace {

void check_state_fits(const Machine& m, const State& s) {
  if (s.vocab() != *m.vocab) {
    throw VocabularyError("state vocabulary does not match machine " + m.name);
  }
  if (!(s.base() == m.base)) {
    throw VocabularyError("state base declarations do not match machine " + m.name);
  }
}

}  // namespace

UpdateSet machine_update_set(const Machine& m, const State& s,
                             std::vector<ImportRecord>* provenance) {
  check_state_fits(m, s);
  return update_set(m.rule, s, provenance);
}

State machine_step(const Machine& m, const State& s) {
  return s.fire(machine_update_set(m, s));
}

RunResult run_machine(const Machine& m, const State& s0, int max_steps, bool keep_trace) {
  RunResult out;
  out.final_state = s0;
  for (int i = 0; i < max_steps; ++i) {
    UpdateSet u = machine_update_set(m, out.final_state);
    if (u.trivial_on(out.final_state)) {
      out.reached_fixpoint = true;
      return out;
    }
    out.final_state = out.final_state.fire(u);
    if (keep_trace) out.trace.push_back(u);
    ++out.steps;
  }
  return out;
}

EquivalenceReport check_behavioural_equivalence(const Machine& a, const Machine& b,
                                                const std::vector<State>& states) {
  EquivalenceReport out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    UpdateSet ua = machine_update_set(a, states[i]).normalized_against(states[i]);
    UpdateSet ub = machine_update_set(b, states[i]).normalized_against(states[i]);
    if (ua != ub) {
      out.equivalent = false;
      out.counterexample = static_cast<int>(i);
      std::ostringstream os;
      os << "state " << i << ": " << a.name << " yields " << ua.to_string() << ", " << b.name
         << " yields " << ub.to_string();
      out.detail = os.str();
      return out;
    }
  }
  return out;
}

UpdateSet rename_update_set(const UpdateSet& u, const std::map<AtomId, AtomId>& perm) {
  UpdateSet out;
  for (const Update& up : u.updates()) {
    std::vector<Value> args;
    args.reserve(up.loc.args.size());
    for (const Value& a : up.loc.args) args.push_back(State::rename_value(a, perm));
    out.add(Update{Location{up.loc.fn, std::move(args)}, State::rename_value(up.value, perm)});
  }
  for (const Value& a : u.imports()) out.add_import(State::rename_value(a, perm));
  return out;
}

IsoReport check_isomorphism_preservation(const Machine& m, const State& s,
                                         const std::map<AtomId, AtomId>& perm) {
  IsoReport out;
  std::vector<ImportRecord> prov1, prov2;
  UpdateSet u1 = machine_update_set(m, s, &prov1);
  State s2 = s.renamed(perm);
  UpdateSet u2 = machine_update_set(m, s2, &prov2);

  // Extend the renaming to the fresh atoms by matching allocation contexts.
  std::map<AtomId, AtomId> full = perm;
  for (const ImportRecord& r1 : prov1) {
    Value wanted = State::rename_value(r1.context, perm);
    bool found = false;
    for (const ImportRecord& r2 : prov2) {
      if (r2.site == r1.site && r2.context == wanted) {
        full[r1.atom.atom_id()] = r2.atom.atom_id();
        found = true;
        break;
      }
    }
    if (!found) {
      out.preserved = false;
      out.detail = "no matching import for site " + std::to_string(r1.site) +
                   " with context " + wanted.to_string();
      return out;
    }
  }

  UpdateSet renamed = rename_update_set(u1, full);
  if (renamed != u2) {
    out.preserved = false;
    out.detail = "renamed updates " + renamed.to_string() + " differ from " + u2.to_string();
  }
  return out;
}

}  // namespace pasm
