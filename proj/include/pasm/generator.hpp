#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "pasm/machine.hpp"
#include "pasm/witness.hpp"

namespace pasm {

struct GeneratorOptions {
  std::uint64_t seed = 0;
  int max_atoms = 5;
  std::size_t count = 200;
};

// A random state over m's vocabulary. Generated atoms are named, so the same
// labels denote the same atoms across every state produced in the process.
// Tables respect the assignment range discipline (relational symbols hold
// booleans, primary results stay in the carrier, secondary values atomic), so
// machine steps on generated states do not trip range checks gratuitously.
State random_state(const Machine& m, std::mt19937_64& rng, int max_atoms);

// Only states on which m can take a step without throwing.
State random_runnable_state(const Machine& m, std::mt19937_64& rng, int max_atoms);

// Pair mix for the bounded-exploration property: identical clones, clones
// with mutations checked to be invisible to w, and independent pairs.
std::vector<std::pair<State, State>> exploration_pairs(const Machine& m, const WitnessSet& w,
                                                       const GeneratorOptions& opts);

// (state, carrier permutation) cases for the isomorphism property.
std::vector<std::pair<State, std::map<AtomId, AtomId>>> permutation_cases(
    const Machine& m, const GeneratorOptions& opts);

}  // namespace pasm
