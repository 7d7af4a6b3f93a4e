#pragma once

#include <climits>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pasm/machine.hpp"
#include "pasm/witness.hpp"

namespace pasm {

// Opaque multiplicity marker: one per (witness term, head values, binding).
// Tags keep separate occurrences of one head value apart without introducing
// an equality relation, so multiset multiplicities survive the encoding.
struct MultTag {
  int term_index = 0;
  std::vector<Value> head;
  std::vector<Value> binding;

  bool operator==(const MultTag& o) const;
  bool operator<(const MultTag& o) const;
  std::string to_string() const;
};

// Domain element of a critical structure: a plain value or a tag.
class CElem {
 public:
  static CElem value(const Value& v);
  static CElem tag(const MultTag& t);

  bool is_tag() const { return is_tag_; }
  const Value& val() const;
  const MultTag& tag_ref() const;

  bool operator==(const CElem& o) const;
  bool operator<(const CElem& o) const;
  std::string to_string() const;

 private:
  bool is_tag_ = false;
  Value v_;
  MultTag t_;
};

// Finite relational structure carrying one relation per witness term. A term
// with n head components yields a relation of arity n+1: the head values
// followed by the tag of the producing binding. The domain lists every element
// occurring in some tuple; relations hold index tuples into the domain.
struct CriticalStructure {
  std::vector<CElem> domain;  // sorted, unique
  std::vector<int> arities;   // relation arity, one per witness term
  std::vector<std::vector<std::vector<int>>> relations;  // sorted index tuples

  std::size_t size() const { return domain.size(); }
  int index_of(const CElem& e) const;  // -1 when absent
  bool has_tuple(int rel, const std::vector<int>& tuple) const;
};

std::vector<Term> witness_comps(const WitnessSet& w);

// Evaluates every witness term over the carrier and records each satisfying
// binding as one tagged tuple, so tuple counts per head equal multiplicities.
CriticalStructure critical_structure(const State& s, const WitnessSet& w);

// First-order formulas without equality over the relations of a critical
// structure. Variables are plain integers; quantifiers bind one variable.
struct EqFreeFormula {
  enum class Kind { Atom, Not, And, Or, Exists, Forall };

  Kind kind = Kind::And;
  int rel = -1;           // Atom
  std::vector<int> args;  // Atom: variable ids per position
  int var = -1;           // Exists, Forall
  std::vector<EqFreeFormula> children;

  static EqFreeFormula atom(int rel, std::vector<int> args);
  static EqFreeFormula neg(EqFreeFormula f);
  static EqFreeFormula conj(std::vector<EqFreeFormula> fs);
  static EqFreeFormula disj(std::vector<EqFreeFormula> fs);
  static EqFreeFormula exists(int var, EqFreeFormula body);
  static EqFreeFormula forall(int var, EqFreeFormula body);

  std::size_t node_count() const;
  std::string to_string() const;
};

// Checks arities and variable binding; a malformed formula raises RuleError.
// The absence of equality atoms is structural, the walk re-asserts it.
void eqfree_validate(const EqFreeFormula& f, const CriticalStructure& a);

bool eqfree_holds(const EqFreeFormula& f, const CriticalStructure& a,
                  std::map<int, int>& env);
// Assigns variable i to domain index tuple[i].
bool eqfree_holds(const EqFreeFormula& f, const CriticalStructure& a,
                  const std::vector<int>& tuple);

// A partial relativeness correspondence: pairs of domain indices whose
// componentwise substitutions agree on every relation membership.
using PartialCorrespondence = std::vector<std::pair<int, int>>;

bool correspondence_valid(const CriticalStructure& a, const PartialCorrespondence& p);

struct TypePartition {
  int tuple_len = 0;
  std::vector<std::vector<int>> tuples;  // all index tuples, lexicographic
  std::vector<int> block;                // block id per tuple, first-use numbering
  int blocks = 0;
  int stabilization_level = 0;  // rounds until the correspondence set is stable

  int block_of(const std::vector<int>& tuple) const;
};

// Partitions all length-len index tuples by equality of their full
// equality-free types, computed as the greatest fixpoint of back-and-forth
// refinement over valid correspondences. ScaleError beyond desk scale.
TypePartition fo_woeq_partition(const CriticalStructure& a, int tuple_len);

// Type equality queries against one structure, sharing the refinement work
// across many tuple pairs.
class TypeOracle {
 public:
  explicit TypeOracle(const CriticalStructure& a);

  bool equal(const std::vector<int>& t1, const std::vector<int>& t2);
  // Greatest refinement depth the pair survives: -1 when the componentwise
  // membership patterns already disagree, INT_MAX when the full types are
  // equal, otherwise the last round the seed correspondence lives through.
  int level(const std::vector<int>& t1, const std::vector<int>& t2);

  ~TypeOracle();
  TypeOracle(TypeOracle&&) noexcept;
  TypeOracle& operator=(TypeOracle&&) noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// A formula true of exactly the tuples sharing the given tuple's type: the
// conjunction of the level-m characteristic formula with its own stability
// implication, where m is the stabilization level of the refinement.
EqFreeFormula isolating_formula(const CriticalStructure& a, const std::vector<int>& tuple);

// Rewrites an equality-free formula over the critical vocabulary into a
// boolean term of the machine vocabulary with free variables x0..x{n-1}.
// Bound variables split per use: a value use becomes one variable ranging
// over the critical values, a tag use becomes the producing term's binding
// variables guarded by its comprehension guard.
Term isolating_term(const EqFreeFormula& f, int free_count, const WitnessSet& w);

// One observed step of a black-box transformation.
using StepOracle = std::function<State(const State&)>;

// Builds a rule whose update set on s, and on every state w-similar to s,
// equals the oracle's normalized one-step difference. Each observed update
// contributes one forall rule over the critical values guarded by a term
// isolating the update tuple's type. CriticalityViolation when an update
// component is not a critical value.
Rule synthesize_rule(const StepOracle& oracle, const State& s, const WitnessSet& w);

// One guarded branch per similarity class among the samples, keyed by the
// first sample of each class: that sample's similarity formula around its
// synthesized rule, combined in parallel. Later samples of an already covered
// class are skipped; their guard would coincide with the representative's.
Machine synthesize_machine(const StepOracle& oracle, const std::vector<State>& samples,
                           const WitnessSet& w, const std::string& name = "synthesized");

struct SynthCheck {
  int states = 0;
  std::vector<std::string> gaps;        // states no branch guard covers
  std::vector<std::string> mismatches;  // states with a wrong update set
  bool ok() const { return gaps.empty() && mismatches.empty(); }
  std::string summary() const;
};

// Compares the synthesized machine against the oracle on every given state;
// a state covered by no branch is reported as a coverage gap.
SynthCheck verify_synthesized(const Machine& m, const StepOracle& oracle,
                              const std::vector<State>& states, const WitnessSet& w,
                              const std::vector<State>& samples);

struct TransferReport {
  int updates = 0;
  int checked_tuples = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Critical value tuples of equal type must receive the same treatment by the
// observed step: if an update's tuple has the same type as another value
// tuple, that tuple must be updated too.
TransferReport check_type_update_transfer(const StepOracle& oracle, const State& s,
                                          const WitnessSet& w);

}  // namespace pasm
