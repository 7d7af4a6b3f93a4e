#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pasm/machine.hpp"

namespace pasm {

// A closed multiset comprehension with a tuple head, kept in decomposed form
// so the guard can be inspected and normalized without re-parsing.
struct WitnessTerm {
  std::vector<Term> heads;
  Term guard = Term::tru();
  std::vector<std::string> binders;  // sorted; exactly the free vars of heads+guard

  Term to_comp() const;
  std::string to_string() const;
  bool operator==(const WitnessTerm& other) const;
};

using WitnessSet = std::vector<WitnessTerm>;

// Structural extraction over the rule forms. The result is deduplicated in
// first-occurrence order; every term is closed because the rule is.
WitnessSet extract_witness(const Rule& r);
WitnessSet extract_witness(const Machine& m);

// Adds, for every subterm t' of a head (comprehensions kept whole), the term
// {{ t' | exists rest. guard }} where rest = free(guard) minus free(t').
WitnessSet close_subterms(const WitnessSet& w);

// Conjunction spine of the guard, flattened, with `true` leaves dropped.
std::vector<std::string> guard_conjuncts(const Term& guard);
// Key invariant under `true and` noise and conjunct re-association; used to
// compare witness sets for equality up to those simplifications.
std::string witness_key(const WitnessTerm& t);

std::vector<Value> eval_witness(const WitnessSet& w, const State& s);
bool coincide(const State& s1, const State& s2, const WitnessSet& w);
bool w_similar(const State& s1, const State& s2, const WitnessSet& w);

// Boolean term holding in s' exactly when s' is w_similar to s.
Term similarity_formula(const State& s, const WitnessSet& w);

struct ExplorationViolation {
  std::size_t pair_index = 0;
  std::string detail;
};

struct ExplorationReport {
  std::size_t pairs = 0;
  std::size_t coinciding = 0;
  std::vector<ExplorationViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// For every pair that coincides on w, both one-step diffs must be equal.
ExplorationReport check_bounded_exploration(const Machine& m, const WitnessSet& w,
                                            const std::vector<std::pair<State, State>>& pairs);

// Greedy redundancy pruning: a term is dropped when, on every validation pair,
// coincidence over the reduced set still implies equal step diffs.
WitnessSet prune_witness(const Machine& m, const WitnessSet& w,
                         const std::vector<std::pair<State, State>>& validation);

}  // namespace pasm
