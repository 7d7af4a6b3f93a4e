#ifndef PASM_MACHINE_HPP
#define PASM_MACHINE_HPP

#include <map>
#include <string>
#include <vector>

#include "pasm/rule.hpp"
#include "pasm/state.hpp"

namespace pasm {

struct Machine {
  std::string name;
  VocabularyPtr vocab;
  BaseDecls base;
  Rule rule = Rule::skip();
};

// Numbers import sites and validates closedness and well-formedness.
Machine make_machine(const std::string& name, VocabularyPtr vocab, const BaseDecls& base,
                     const Rule& rule);

UpdateSet machine_update_set(const Machine& m, const State& s,
                             std::vector<ImportRecord>* provenance = nullptr);
State machine_step(const Machine& m, const State& s);

struct RunResult {
  State final_state;
  int steps = 0;
  bool reached_fixpoint = false;
  std::vector<UpdateSet> trace;  // raw update set of each fired step
};

// Runs until the update set changes nothing or max_steps is reached. The
// no-change detection step is not counted.
RunResult run_machine(const Machine& m, const State& s0, int max_steps, bool keep_trace = false);

struct EquivalenceReport {
  bool equivalent = true;
  int counterexample = -1;
  std::string detail;
};

// Same normalized one-step behaviour on every given state.
EquivalenceReport check_behavioural_equivalence(const Machine& a, const Machine& b,
                                                const std::vector<State>& states);

struct IsoReport {
  bool preserved = true;
  std::string detail;
};

// Update sets commute with carrier renaming. Fresh atoms allocated by import
// are matched across the two runs through their allocation context.
IsoReport check_isomorphism_preservation(const Machine& m, const State& s,
                                         const std::map<AtomId, AtomId>& perm);

UpdateSet rename_update_set(const UpdateSet& u, const std::map<AtomId, AtomId>& perm);

}  // namespace pasm

#endif
