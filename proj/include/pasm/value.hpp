#ifndef PASM_VALUE_HPP
#define PASM_VALUE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pasm {

using AtomId = std::int64_t;

class Value;

// Process-wide atom identity. Atoms are structure-free: equality is id equality
// and the label is presentation only. Named atoms are interned so that states
// loaded from different files share atoms by label. import_keyed hands out the
// same fresh atom for the same (site, context) in every state, which keeps
// import deterministic and uniform across coinciding states.
class AtomTable {
 public:
  static AtomTable& instance();

  AtomId named(const std::string& label);
  AtomId fresh();
  AtomId import_keyed(std::int64_t site, const Value& context);
  // Registers a raw id seen in input (e.g. "@#12"); keeps the fresh counter ahead of it.
  AtomId raw(AtomId id);

  std::optional<std::string> label(AtomId id) const;
  std::string render(AtomId id) const;

 private:
  AtomTable() = default;
  struct Impl;
  Impl& impl();
};

// Immutable value universe: undef, booleans, integers, atoms, pairs and finite
// multisets, totally ordered by kind rank Undef < Bool < Int < Atom < Pair <
// Multiset and canonically ordered within each kind. Multiset entries are kept
// sorted with positive multiplicities, so structural equality is canonical
// equality.
class Value {
 public:
  enum class Kind { Undef, Bool, Int, Atom, Pair, Multiset };

  using MsetEntries = std::vector<std::pair<Value, std::int64_t>>;

  Value() : kind_(Kind::Undef), scalar_(0) {}

  static Value undef() { return Value(); }
  static Value boolean(bool b);
  static Value integer(std::int64_t n);
  static Value atom(AtomId id);
  static Value named_atom(const std::string& label);
  static Value pair(const Value& first, const Value& second);
  static Value multiset(MsetEntries entries);  // canonicalizes, merges, drops zero counts
  static Value empty_multiset() { return multiset({}); }
  static Value singleton(const Value& v) { return multiset({{v, 1}}); }
  // Right-nested pair encoding of a component list; a single component encodes as itself.
  static Value tuple(const std::vector<Value>& components);

  Kind kind() const { return kind_; }
  bool is_undef() const { return kind_ == Kind::Undef; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_pair() const { return kind_ == Kind::Pair; }
  bool is_multiset() const { return kind_ == Kind::Multiset; }
  bool is_true() const { return is_bool() && scalar_ == 1; }
  bool is_false() const { return is_bool() && scalar_ == 0; }

  bool as_bool() const;
  std::int64_t as_int() const;
  AtomId atom_id() const;
  const Value& pair_first() const;
  const Value& pair_second() const;
  const MsetEntries& mset_entries() const;

  // Decodes the right-nested pair encoding back into `arity` components.
  std::vector<Value> tuple_components(int arity) const;

  static int compare(const Value& a, const Value& b);
  bool operator==(const Value& b) const { return compare(*this, b) == 0; }
  bool operator!=(const Value& b) const { return compare(*this, b) != 0; }
  bool operator<(const Value& b) const { return compare(*this, b) < 0; }

  std::size_t hash() const;
  std::string to_string() const;

 private:
  struct PairRep;
  struct MsetRep;

  Kind kind_;
  std::int64_t scalar_;
  std::shared_ptr<const PairRep> pair_;
  std::shared_ptr<const MsetRep> mset_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

// Multiset operations of the background structure. All yield undef on
// non-multiset operands, mirroring the totality convention for background
// functions.
Value mset_union(const Value& a, const Value& b);      // additive union
Value mset_big_union(const Value& m);                  // flattens a multiset of multisets
Value mset_as_set(const Value& m);                     // support with multiplicity 1
std::int64_t mset_mult(const Value& x, const Value& m);  // multiplicity of x in m, 0 if absent
bool mset_member(const Value& x, const Value& m);

std::string render_values(const std::vector<Value>& vs, const std::string& sep = ", ");

}  // namespace pasm

#endif
