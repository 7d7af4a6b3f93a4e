#include "pasm/value.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "pasm/errors.hpp"

namespace pasm {

struct AtomTable::Impl {
  std::mutex mu;
  std::unordered_map<std::string, AtomId> by_label;
  std::map<AtomId, std::string> labels;
  // Import memo key: site id plus canonical rendering of the context tuple.
  std::map<std::pair<std::int64_t, std::string>, AtomId> import_memo;
  AtomId next = 1;
};

AtomTable& AtomTable::instance() {
  static AtomTable table;
  return table;
}

AtomTable::Impl& AtomTable::impl() {
  static Impl impl;
  return impl;
}

AtomId AtomTable::named(const std::string& label) {
  Impl& im = impl();
  std::lock_guard<std::mutex> lock(im.mu);
  auto it = im.by_label.find(label);
  if (it != im.by_label.end()) return it->second;
  AtomId id = im.next++;
  im.by_label.emplace(label, id);
  im.labels.emplace(id, label);
  return id;
}

AtomId AtomTable::fresh() {
  Impl& im = impl();
  std::lock_guard<std::mutex> lock(im.mu);
  return im.next++;
}

AtomId AtomTable::import_keyed(std::int64_t site, const Value& context) {
  std::string key = context.to_string();
  Impl& im = impl();
  std::lock_guard<std::mutex> lock(im.mu);
  auto it = im.import_memo.find({site, key});
  if (it != im.import_memo.end()) return it->second;
  AtomId id = im.next++;
  im.import_memo.emplace(std::make_pair(site, key), id);
  return id;
}

AtomId AtomTable::raw(AtomId id) {
  if (id <= 0) throw ParseError("atom id must be positive: @#" + std::to_string(id));
  Impl& im = impl();
  std::lock_guard<std::mutex> lock(im.mu);
  if (id >= im.next) im.next = id + 1;
  return id;
}

std::optional<std::string> AtomTable::label(AtomId id) const {
  Impl& im = const_cast<AtomTable*>(this)->impl();
  std::lock_guard<std::mutex> lock(im.mu);
  auto it = im.labels.find(id);
  if (it == im.labels.end()) return std::nullopt;
  return it->second;
}

std::string AtomTable::render(AtomId id) const {
  auto lab = label(id);
  if (lab) return "@" + *lab;
  return "@#" + std::to_string(id);
}

struct Value::PairRep {
  Value first;
  Value second;
};

struct Value::MsetRep {
  MsetEntries entries;
};

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.scalar_ = b ? 1 : 0;
  return v;
}

Value Value::integer(std::int64_t n) {
  Value v;
  v.kind_ = Kind::Int;
  v.scalar_ = n;
  return v;
}

Value Value::atom(AtomId id) {
  Value v;
  v.kind_ = Kind::Atom;
  v.scalar_ = id;
  return v;
}

Value Value::named_atom(const std::string& label) {
  return atom(AtomTable::instance().named(label));
}

Value Value::pair(const Value& first, const Value& second) {
  Value v;
  v.kind_ = Kind::Pair;
  v.pair_ = std::make_shared<PairRep>(PairRep{first, second});
  return v;
}

Value Value::multiset(MsetEntries entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  MsetEntries merged;
  for (auto& e : entries) {
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  MsetEntries canon;
  for (auto& e : merged) {
    if (e.second < 0) throw EvalError("negative multiplicity in multiset");
    if (e.second > 0) canon.push_back(e);
  }
  Value v;
  v.kind_ = Kind::Multiset;
  v.mset_ = std::make_shared<MsetRep>(MsetRep{std::move(canon)});
  return v;
}

Value Value::tuple(const std::vector<Value>& components) {
  if (components.empty()) return undef();
  Value acc = components.back();
  for (std::size_t i = components.size() - 1; i-- > 0;) {
    acc = pair(components[i], acc);
  }
  return acc;
}

bool Value::as_bool() const {
  if (!is_bool()) throw EvalError("value is not a boolean: " + to_string());
  return scalar_ == 1;
}

std::int64_t Value::as_int() const {
  if (!is_int()) throw EvalError("value is not an integer: " + to_string());
  return scalar_;
}

AtomId Value::atom_id() const {
  if (!is_atom()) throw EvalError("value is not an atom: " + to_string());
  return scalar_;
}

const Value& Value::pair_first() const {
  if (!is_pair()) throw EvalError("value is not a pair: " + to_string());
  return pair_->first;
}

const Value& Value::pair_second() const {
  if (!is_pair()) throw EvalError("value is not a pair: " + to_string());
  return pair_->second;
}

const Value::MsetEntries& Value::mset_entries() const {
  if (!is_multiset()) throw EvalError("value is not a multiset: " + to_string());
  return mset_->entries;
}

std::vector<Value> Value::tuple_components(int arity) const {
  std::vector<Value> out;
  Value cur = *this;
  for (int i = 0; i + 1 < arity; ++i) {
    if (!cur.is_pair()) throw EvalError("tuple value too short for arity " + std::to_string(arity) + ": " + to_string());
    out.push_back(cur.pair_first());
    cur = cur.pair_second();
  }
  out.push_back(cur);
  return out;
}

int Value::compare(const Value& a, const Value& b) {
  auto rank = [](Kind k) {
    switch (k) {
      case Kind::Undef: return 0;
      case Kind::Bool: return 1;
      case Kind::Int: return 2;
      case Kind::Atom: return 3;
      case Kind::Pair: return 4;
      case Kind::Multiset: return 5;
    }
    return 6;
  };
  if (rank(a.kind_) != rank(b.kind_)) return rank(a.kind_) < rank(b.kind_) ? -1 : 1;
  switch (a.kind_) {
    case Kind::Undef:
      return 0;
    case Kind::Bool:
    case Kind::Int:
    case Kind::Atom:
      if (a.scalar_ != b.scalar_) return a.scalar_ < b.scalar_ ? -1 : 1;
      return 0;
    case Kind::Pair: {
      int c = compare(a.pair_->first, b.pair_->first);
      if (c != 0) return c;
      return compare(a.pair_->second, b.pair_->second);
    }
    case Kind::Multiset: {
      const auto& ea = a.mset_->entries;
      const auto& eb = b.mset_->entries;
      std::size_t n = std::min(ea.size(), eb.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(ea[i].first, eb[i].first);
        if (c != 0) return c;
        if (ea[i].second != eb[i].second) return ea[i].second < eb[i].second ? -1 : 1;
      }
      if (ea.size() != eb.size()) return ea.size() < eb.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

std::size_t Value::hash() const {
  auto mix = [](std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  };
  std::size_t h = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ULL;
  switch (kind_) {
    case Kind::Undef:
      return h;
    case Kind::Bool:
    case Kind::Int:
    case Kind::Atom:
      return mix(h, static_cast<std::size_t>(scalar_));
    case Kind::Pair:
      return mix(mix(h, pair_->first.hash()), pair_->second.hash());
    case Kind::Multiset: {
      for (const auto& e : mset_->entries) {
        h = mix(h, e.first.hash());
        h = mix(h, static_cast<std::size_t>(e.second));
      }
      return h;
    }
  }
  return h;
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Undef:
      return "undef";
    case Kind::Bool:
      return scalar_ ? "true" : "false";
    case Kind::Int:
      return std::to_string(scalar_);
    case Kind::Atom:
      return AtomTable::instance().render(scalar_);
    case Kind::Pair:
      return "(" + pair_->first.to_string() + ", " + pair_->second.to_string() + ")";
    case Kind::Multiset: {
      if (mset_->entries.empty()) return "{{}}";
      std::ostringstream os;
      os << "{{ ";
      bool first = true;
      for (const auto& e : mset_->entries) {
        if (!first) os << ", ";
        first = false;
        os << e.first.to_string() << " : " << e.second;
      }
      os << " }}";
      return os.str();
    }
  }
  return "undef";
}

Value mset_union(const Value& a, const Value& b) {
  if (!a.is_multiset() || !b.is_multiset()) return Value::undef();
  Value::MsetEntries entries = a.mset_entries();
  const auto& eb = b.mset_entries();
  entries.insert(entries.end(), eb.begin(), eb.end());
  return Value::multiset(std::move(entries));
}

Value mset_big_union(const Value& m) {
  if (!m.is_multiset()) return Value::undef();
  // Mult(x, big_union M) = sum over inner multisets Mi of Mult(x, Mi) * Mult(Mi, M).
  Value::MsetEntries entries;
  for (const auto& outer : m.mset_entries()) {
    if (!outer.first.is_multiset()) return Value::undef();
    for (const auto& inner : outer.first.mset_entries()) {
      entries.emplace_back(inner.first, inner.second * outer.second);
    }
  }
  return Value::multiset(std::move(entries));
}

Value mset_as_set(const Value& m) {
  if (!m.is_multiset()) return Value::undef();
  Value::MsetEntries entries;
  for (const auto& e : m.mset_entries()) entries.emplace_back(e.first, 1);
  return Value::multiset(std::move(entries));
}

std::int64_t mset_mult(const Value& x, const Value& m) {
  if (!m.is_multiset()) return 0;
  for (const auto& e : m.mset_entries()) {
    if (e.first == x) return e.second;
  }
  return 0;
}

bool mset_member(const Value& x, const Value& m) { return mset_mult(x, m) > 0; }

std::string render_values(const std::vector<Value>& vs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += sep;
    out += vs[i].to_string();
  }
  return out;
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Vocabulary: return "VocabularyError";
    case ErrorKind::Clash: return "ClashError";
    case ErrorKind::Isomorphism: return "IsomorphismError";
    case ErrorKind::Stratification: return "StratificationError";
    case ErrorKind::Eval: return "EvalError";
    case ErrorKind::Range: return "RangeError";
    case ErrorKind::Rule: return "RuleError";
    case ErrorKind::Scale: return "ScaleError";
    case ErrorKind::Criticality: return "CriticalityViolation";
    case ErrorKind::Coverage: return "CoverageGap";
    case ErrorKind::Fixture: return "FixtureError";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace pasm
