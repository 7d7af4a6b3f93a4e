#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pasm/machine.hpp"

namespace pasm {

// Machine sources in concrete syntax; parse with parse_machine_text.
namespace gallery_src {
extern const char* complement;
extern const char* circuit;
extern const char* pram;
extern const char* atm;
extern const char* foeval;
extern const char* bfs;
}  // namespace gallery_src

Machine complement_machine();
State complement_state(int n, const std::vector<std::pair<int, int>>& edges);
std::set<std::pair<int, int>> complement_oracle(int n,
                                                const std::vector<std::pair<int, int>>& edges);

// Gates 0..inputs-1 carry the input labels; the rest compute.
struct Circuit {
  struct Gate {
    char op;  // '&', '|', '!'
    std::vector<int> preds;
  };
  int inputs = 0;
  std::vector<Gate> gates;  // gate number = inputs + index
  int size() const { return inputs + static_cast<int>(gates.size()); }
};

Machine circuit_machine();
State circuit_state(const Circuit& c, const std::vector<bool>& input_values);
// Value of every gate, by topological evaluation. FixtureError on a cycle.
std::vector<bool> circuit_oracle(const Circuit& c, const std::vector<bool>& input_values);

struct PramInstr {
  std::string op;      // READ, STORE, HALT
  char mode = 'd';     // 'd' direct operand, 'i' indirect
  int operand = 0;
};
using PramProgram = std::vector<PramInstr>;

struct PramResult {
  std::map<int, int> registers;
  std::vector<int> counters;  // 0 = halted; otherwise 1-based line
};

Machine pram_machine();
State pram_state(const std::vector<PramProgram>& programs, const std::map<int, int>& inputs);
PramResult pram_oracle(const std::vector<PramProgram>& programs, const std::map<int, int>& inputs,
                       int cycles);
PramResult pram_read_result(const State& s, const std::vector<PramProgram>& programs,
                            const std::map<int, int>& inputs);

struct AtmSpec {
  enum class Kind { Exists, Forall, Accept, Reject };
  std::vector<Kind> kinds;  // state q = index; q0 = 0
  // (state, symbol) -> successors (state', written symbol, 'L' or 'R')
  std::map<std::pair<int, int>, std::vector<std::tuple<int, int, char>>> delta;
  int tape_symbols = 2;  // symbols 0..tape_symbols-1; 0 is blank
};

enum class Verdict { Accept, Reject, Unknown };

Machine atm_machine();
// Precomputes the configuration space to the depth bound.
State atm_state(const AtmSpec& spec, const std::vector<int>& input, int depth);
Verdict atm_oracle(const AtmSpec& spec, const std::vector<int>& input, int depth);
Verdict atm_read_root(const State& s);

struct FoFormula {
  enum class Kind { Atom, And, Or, Not, Exists, Forall };
  Kind kind = Kind::Atom;
  std::string rel;            // Atom
  std::vector<int> arg_vars;  // Atom: variable indices
  int var = -1;               // quantifiers
  std::vector<FoFormula> children;

  static FoFormula atom(std::string rel, std::vector<int> args);
  static FoFormula conj(FoFormula a, FoFormula b);
  static FoFormula disj(FoFormula a, FoFormula b);
  static FoFormula neg(FoFormula a);
  static FoFormula exists(int var, FoFormula a);
  static FoFormula forall(int var, FoFormula a);
};

struct FoStructure {
  int domain = 0;  // elements 0..domain-1
  std::map<std::string, std::set<std::vector<int>>> relations;
};

Machine fo_machine();
State fo_state(const FoFormula& sentence, const FoStructure& structure);
bool fo_oracle(const FoFormula& sentence, const FoStructure& structure);
bool fo_read_root(const State& s);

Machine bfs_machine();
State bfs_state(int n, const std::vector<std::pair<int, int>>& edges, int source);
std::set<int> bfs_oracle(int n, const std::vector<std::pair<int, int>>& edges, int source);

// One executed step of a gallery run, for downstream property checks.
struct StepRecord {
  std::string machine;
  State pre;
  UpdateSet delta;
};

struct GallerySection {
  std::string name;
  int checks = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

struct GalleryReport {
  std::vector<GallerySection> sections;
  bool ok() const;
  int total_checks() const;
  std::string summary() const;
};

GallerySection verify_complement(std::vector<StepRecord>* steps = nullptr);
GallerySection verify_circuit(std::vector<StepRecord>* steps = nullptr);
GallerySection verify_pram(std::vector<StepRecord>* steps = nullptr);
GallerySection verify_atm(std::vector<StepRecord>* steps = nullptr);
GallerySection verify_fo(std::vector<StepRecord>* steps = nullptr);
GallerySection verify_bfs(std::vector<StepRecord>* steps = nullptr);
GalleryReport verify_gallery(std::vector<StepRecord>* steps = nullptr);

}  // namespace pasm
