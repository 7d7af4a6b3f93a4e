#ifndef PASM_STATE_HPP
#define PASM_STATE_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pasm/value.hpp"

namespace pasm {

enum class SymbolKind { Primary, Secondary, Bridge, Background };

const char* symbol_kind_name(SymbolKind kind);

struct FunctionSymbol {
  std::string name;
  int arity = 0;
  SymbolKind kind = SymbolKind::Primary;
  bool dynamic = false;
  bool relational = false;

  bool operator==(const FunctionSymbol& o) const {
    return name == o.name && arity == o.arity && kind == o.kind && dynamic == o.dynamic &&
           relational == o.relational;
  }
};

// User-declared symbols of a machine or state. Background symbols (logic
// constants, pair/multiset constructors, arithmetic, reserve, atomic, the
// import allocator) are built in and not declared here.
class Vocabulary {
 public:
  void declare(const FunctionSymbol& sym);
  const FunctionSymbol* find(const std::string& name) const;        // user symbols only
  const FunctionSymbol* resolve(const std::string& name) const;     // user or builtin
  static const FunctionSymbol* builtin(const std::string& name);
  const std::map<std::string, FunctionSymbol>& symbols() const { return symbols_; }
  bool operator==(const Vocabulary& o) const { return symbols_ == o.symbols_; }
  bool operator!=(const Vocabulary& o) const { return !(*this == o); }

 private:
  std::map<std::string, FunctionSymbol> symbols_;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

struct Location {
  std::string fn;
  std::vector<Value> args;

  bool operator==(const Location& o) const { return fn == o.fn && args == o.args; }
  bool operator<(const Location& o) const;
  std::string to_string() const;
};

struct Update {
  Location loc;
  Value value;

  bool operator==(const Update& o) const { return loc == o.loc && value == o.value; }
  bool operator<(const Update& o) const;
  std::string to_string() const;
};

class State;

// A set of updates plus the carrier extensions performed by import, so that
// fire alone reproduces a full step. Updates are kept sorted and deduplicated;
// a clash is two updates on one location with different values.
class UpdateSet {
 public:
  void add(const Update& u);
  void add_import(const Value& atom);
  void merge(const UpdateSet& o);

  const std::vector<Update>& updates() const { return updates_; }
  const std::vector<Value>& imports() const { return imports_; }

  bool empty() const { return updates_.empty() && imports_.empty(); }
  std::size_t size() const { return updates_.size(); }

  bool consistent() const;
  std::vector<std::pair<Update, Update>> clashes() const;

  // True when firing would leave the state unchanged: no imports and every
  // update writes the value the location already holds.
  bool trivial_on(const State& s) const;
  // Drops updates that write the current value; keeps imports and their
  // reserve bookkeeping. diff(fire(s, u), s) == u.normalized_against(s).
  UpdateSet normalized_against(const State& s) const;

  bool operator==(const UpdateSet& o) const {
    return updates_ == o.updates_ && imports_ == o.imports_;
  }
  bool operator!=(const UpdateSet& o) const { return !(*this == o); }

  std::string to_string() const;

 private:
  std::vector<Update> updates_;
  std::vector<Value> imports_;
};

struct BaseDecls {
  // Pairs / multisets of atomic values count as atomic. Booleans, undef and
  // integers are atomic in every state; atoms are atomic iff in the carrier.
  bool pairs = false;
  bool multisets = false;

  bool operator==(const BaseDecls& o) const {
    return pairs == o.pairs && multisets == o.multisets;
  }
};

// A meta-finite state: finite primary carrier of atoms, finite interpretation
// tables for dynamic and static user symbols, and the background structure
// computed on demand. Tables are kept normalized (no entry stores the default
// value), so structural equality is observational equality.
class State {
 public:
  State() : vocab_(std::make_shared<Vocabulary>()) {}
  explicit State(VocabularyPtr vocab) : vocab_(std::move(vocab)) {}

  const Vocabulary& vocab() const { return *vocab_; }
  VocabularyPtr vocab_ptr() const { return vocab_; }

  const std::vector<Value>& carrier() const { return carrier_; }
  bool in_carrier(const Value& v) const;
  void add_carrier(const Value& atom);

  const BaseDecls& base() const { return base_; }
  void set_base(const BaseDecls& b) { base_ = b; }

  bool atomic(const Value& v) const;

  // Total lookup: builtins dispatch to the background structure, user symbols
  // to their tables with relational-false / undef defaults.
  Value lookup(const std::string& fn, const std::vector<Value>& args) const;

  void set_fun(const std::string& fn, const std::vector<Value>& args, const Value& value);

  const std::map<std::string, std::map<std::vector<Value>, Value>>& tables() const {
    return tables_;
  }

  State fire(const UpdateSet& u) const;
  static UpdateSet diff(const State& after, const State& before);

  State renamed(const std::map<AtomId, AtomId>& perm) const;
  static Value rename_value(const Value& v, const std::map<AtomId, AtomId>& perm);

  bool equivalent(const State& o) const;

 private:
  Value user_lookup(const FunctionSymbol& sym, const std::vector<Value>& args) const;
  Value builtin_lookup(const std::string& fn, const std::vector<Value>& args) const;

  VocabularyPtr vocab_;
  std::vector<Value> carrier_;  // sorted atoms
  BaseDecls base_;
  std::map<std::string, std::map<std::vector<Value>, Value>> tables_;
};

}  // namespace pasm

#endif
