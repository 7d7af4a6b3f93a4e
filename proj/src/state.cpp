#include "pasm/state.hpp"

#include <algorithm>
#include <sstream>

#include "pasm/errors.hpp"

namespace pasm {

const char* symbol_kind_name(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Primary: return "primary";
    case SymbolKind::Secondary: return "secondary";
    case SymbolKind::Bridge: return "bridge";
    case SymbolKind::Background: return "background";
  }
  return "primary";
}

namespace {

std::map<std::string, FunctionSymbol> make_builtins() {
  std::map<std::string, FunctionSymbol> m;
  auto add = [&m](const std::string& name, int arity, bool relational) {
    m[name] = FunctionSymbol{name, arity, SymbolKind::Background, false, relational};
  };
  add("true", 0, true);
  add("false", 0, true);
  add("undef", 0, false);
  add("emptyset", 0, false);
  add("reserve", 1, true);
  add("atomic", 1, true);
  add("first", 1, false);
  add("second", 1, false);
  add("boole", 1, true);
  add("not", 1, true);
  add("singleton", 1, false);
  add("bigunion", 1, false);
  add("asSet", 1, false);
  add("succ", 1, false);
  add("eq", 2, true);
  add("and", 2, true);
  add("or", 2, true);
  add("implies", 2, true);
  add("iff", 2, true);
  add("munion", 2, false);
  add("pair", 2, false);
  add("add", 2, false);
  add("sub", 2, false);
  add("mul", 2, false);
  add("lt", 2, true);
  add("in", 2, true);
  add("mult", 2, false);
  add("imported", 2, false);
  // reserve is the one dynamic background symbol; its updates are generated by
  // import bookkeeping, never by assignment rules.
  m["reserve"].dynamic = true;
  return m;
}

const std::map<std::string, FunctionSymbol>& builtins() {
  static const std::map<std::string, FunctionSymbol> table = make_builtins();
  return table;
}

}  // namespace

void Vocabulary::declare(const FunctionSymbol& sym) {
  if (sym.name.empty()) throw VocabularyError("empty symbol name");
  if (sym.arity < 0) throw VocabularyError("negative arity for " + sym.name);
  if (sym.kind == SymbolKind::Background) {
    throw VocabularyError("background symbols are built in: " + sym.name);
  }
  if (builtins().count(sym.name)) {
    throw VocabularyError("symbol name collides with a background symbol: " + sym.name);
  }
  auto it = symbols_.find(sym.name);
  if (it != symbols_.end() && !(it->second == sym)) {
    throw VocabularyError("conflicting redeclaration of " + sym.name);
  }
  symbols_[sym.name] = sym;
}

const FunctionSymbol* Vocabulary::find(const std::string& name) const {
  auto it = symbols_.find(name);
  return it == symbols_.end() ? nullptr : &it->second;
}

const FunctionSymbol* Vocabulary::builtin(const std::string& name) {
  auto it = builtins().find(name);
  return it == builtins().end() ? nullptr : &it->second;
}

const FunctionSymbol* Vocabulary::resolve(const std::string& name) const {
  if (const FunctionSymbol* sym = find(name)) return sym;
  return builtin(name);
}

bool Location::operator<(const Location& o) const {
  if (fn != o.fn) return fn < o.fn;
  if (args.size() != o.args.size()) return args.size() < o.args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    int c = Value::compare(args[i], o.args[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

std::string Location::to_string() const {
  if (args.empty()) return fn;
  return fn + "(" + render_values(args) + ")";
}

bool Update::operator<(const Update& o) const {
  if (loc < o.loc) return true;
  if (o.loc < loc) return false;
  return Value::compare(value, o.value) < 0;
}

std::string Update::to_string() const { return loc.to_string() + " := " + value.to_string(); }

void UpdateSet::add(const Update& u) {
  auto it = std::lower_bound(updates_.begin(), updates_.end(), u);
  if (it != updates_.end() && *it == u) return;
  updates_.insert(it, u);
}

void UpdateSet::add_import(const Value& atom) {
  if (!atom.is_atom()) throw RuleError("import of a non-atom value: " + atom.to_string());
  auto it = std::lower_bound(imports_.begin(), imports_.end(), atom);
  if (it != imports_.end() && *it == atom) return;
  imports_.insert(it, atom);
}

void UpdateSet::merge(const UpdateSet& o) {
  for (const auto& u : o.updates_) add(u);
  for (const auto& a : o.imports_) add_import(a);
}

bool UpdateSet::consistent() const {
  for (std::size_t i = 1; i < updates_.size(); ++i) {
    if (updates_[i - 1].loc == updates_[i].loc &&
        updates_[i - 1].value != updates_[i].value) {
      return false;
    }
  }
  return true;
}

std::vector<std::pair<Update, Update>> UpdateSet::clashes() const {
  std::vector<std::pair<Update, Update>> out;
  for (std::size_t i = 1; i < updates_.size(); ++i) {
    if (updates_[i - 1].loc == updates_[i].loc &&
        updates_[i - 1].value != updates_[i].value) {
      out.emplace_back(updates_[i - 1], updates_[i]);
    }
  }
  return out;
}

bool UpdateSet::trivial_on(const State& s) const {
  if (!imports_.empty()) return false;
  for (const auto& u : updates_) {
    if (s.lookup(u.loc.fn, u.loc.args) != u.value) return false;
  }
  return true;
}

UpdateSet UpdateSet::normalized_against(const State& s) const {
  UpdateSet out;
  for (const auto& u : updates_) {
    if (s.lookup(u.loc.fn, u.loc.args) != u.value) out.add(u);
  }
  for (const auto& a : imports_) out.add_import(a);
  return out;
}

std::string UpdateSet::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& a : imports_) {
    if (!first) os << ", ";
    first = false;
    os << "import " << a.to_string();
  }
  for (const auto& u : updates_) {
    if (!first) os << ", ";
    first = false;
    os << u.to_string();
  }
  os << "}";
  return os.str();
}

bool State::in_carrier(const Value& v) const {
  if (!v.is_atom()) return false;
  return std::binary_search(carrier_.begin(), carrier_.end(), v);
}

void State::add_carrier(const Value& atom) {
  if (!atom.is_atom()) throw VocabularyError("carrier elements must be atoms: " + atom.to_string());
  auto it = std::lower_bound(carrier_.begin(), carrier_.end(), atom);
  if (it != carrier_.end() && *it == atom) return;
  carrier_.insert(it, atom);
}

bool State::atomic(const Value& v) const {
  switch (v.kind()) {
    case Value::Kind::Undef:
    case Value::Kind::Bool:
    case Value::Kind::Int:
      return true;
    case Value::Kind::Atom:
      return in_carrier(v);
    case Value::Kind::Pair:
      return base_.pairs && atomic(v.pair_first()) && atomic(v.pair_second());
    case Value::Kind::Multiset: {
      if (!base_.multisets) return false;
      for (const auto& e : v.mset_entries()) {
        if (!atomic(e.first)) return false;
      }
      return true;
    }
  }
  return false;
}

Value State::builtin_lookup(const std::string& fn, const std::vector<Value>& args) const {
  auto b = [](bool v) { return Value::boolean(v); };
  auto both_bool = [&args]() { return args[0].is_bool() && args[1].is_bool(); };
  if (fn == "true") return b(true);
  if (fn == "false") return b(false);
  if (fn == "undef") return Value::undef();
  if (fn == "emptyset") return Value::empty_multiset();
  if (fn == "reserve") return b(args[0].is_atom() && !in_carrier(args[0]));
  if (fn == "atomic") return b(atomic(args[0]));
  if (fn == "first") return args[0].is_pair() ? args[0].pair_first() : Value::undef();
  if (fn == "second") return args[0].is_pair() ? args[0].pair_second() : Value::undef();
  if (fn == "boole") return b(args[0].is_bool());
  if (fn == "not") return b(args[0].is_false());
  if (fn == "singleton") return Value::singleton(args[0]);
  if (fn == "bigunion") return mset_big_union(args[0]);
  if (fn == "asSet") return mset_as_set(args[0]);
  if (fn == "succ") return args[0].is_int() ? Value::integer(args[0].as_int() + 1) : Value::undef();
  if (fn == "eq") return b(args[0] == args[1]);
  if (fn == "and") return b(both_bool() && args[0].as_bool() && args[1].as_bool());
  if (fn == "or") return b(both_bool() && (args[0].as_bool() || args[1].as_bool()));
  if (fn == "implies") return b(both_bool() && (!args[0].as_bool() || args[1].as_bool()));
  if (fn == "iff") return b(both_bool() && args[0].as_bool() == args[1].as_bool());
  if (fn == "munion") return mset_union(args[0], args[1]);
  if (fn == "pair") return Value::pair(args[0], args[1]);
  if (fn == "add")
    return args[0].is_int() && args[1].is_int() ? Value::integer(args[0].as_int() + args[1].as_int())
                                                : Value::undef();
  if (fn == "sub")
    return args[0].is_int() && args[1].is_int() ? Value::integer(args[0].as_int() - args[1].as_int())
                                                : Value::undef();
  if (fn == "mul")
    return args[0].is_int() && args[1].is_int() ? Value::integer(args[0].as_int() * args[1].as_int())
                                                : Value::undef();
  if (fn == "lt") return b(args[0].is_int() && args[1].is_int() && args[0].as_int() < args[1].as_int());
  if (fn == "in") return b(args[1].is_multiset() && mset_member(args[0], args[1]));
  if (fn == "mult") return args[1].is_multiset() ? Value::integer(mset_mult(args[0], args[1])) : Value::undef();
  if (fn == "imported") {
    if (!args[0].is_int()) return Value::undef();
    return Value::atom(AtomTable::instance().import_keyed(args[0].as_int(), args[1]));
  }
  throw EvalError("unknown background symbol: " + fn);
}

Value State::user_lookup(const FunctionSymbol& sym, const std::vector<Value>& args) const {
  auto t = tables_.find(sym.name);
  if (t != tables_.end()) {
    auto e = t->second.find(args);
    if (e != t->second.end()) return e->second;
  }
  return sym.relational ? Value::boolean(false) : Value::undef();
}

Value State::lookup(const std::string& fn, const std::vector<Value>& args) const {
  const FunctionSymbol* sym = vocab_->find(fn);
  if (sym == nullptr) {
    const FunctionSymbol* bg = Vocabulary::builtin(fn);
    if (bg == nullptr) throw EvalError("undeclared function symbol: " + fn);
    if (static_cast<int>(args.size()) != bg->arity) {
      throw EvalError("arity mismatch for " + fn);
    }
    return builtin_lookup(fn, args);
  }
  if (static_cast<int>(args.size()) != sym->arity) {
    throw EvalError("arity mismatch for " + fn + ": expected " + std::to_string(sym->arity) +
                    " arguments, got " + std::to_string(args.size()));
  }
  return user_lookup(*sym, args);
}

void State::set_fun(const std::string& fn, const std::vector<Value>& args, const Value& value) {
  const FunctionSymbol* sym = vocab_->find(fn);
  if (sym == nullptr) throw VocabularyError("undeclared function symbol: " + fn);
  if (static_cast<int>(args.size()) != sym->arity) {
    throw VocabularyError("arity mismatch in interpretation of " + fn);
  }
  Value def = sym->relational ? Value::boolean(false) : Value::undef();
  if (value == def) {
    auto t = tables_.find(fn);
    if (t != tables_.end()) t->second.erase(args);
    return;
  }
  tables_[fn][args] = value;
}

State State::fire(const UpdateSet& u) const {
  if (!u.consistent()) {
    auto cs = u.clashes();
    std::string detail = cs.empty() ? "" : (": " + cs[0].first.to_string() + " vs " + cs[0].second.to_string());
    throw ClashError("inconsistent update set" + detail);
  }
  State next = *this;
  for (const auto& a : u.imports()) {
    if (next.in_carrier(a)) throw RuleError("import of an existing carrier atom: " + a.to_string());
    next.add_carrier(a);
  }
  for (const auto& up : u.updates()) {
    if (up.loc.fn == "reserve") {
      // Import bookkeeping: reserve(a) := false must accompany a carrier extension.
      if (up.value != Value::boolean(false)) {
        throw RuleError("reserve can only be retracted by import");
      }
      if (!up.loc.args.empty() && !next.in_carrier(up.loc.args[0])) {
        throw RuleError("reserve update without carrier extension: " + up.loc.to_string());
      }
      continue;
    }
    const FunctionSymbol* sym = vocab_->find(up.loc.fn);
    if (sym == nullptr) throw RuleError("update of an undeclared symbol: " + up.loc.fn);
    if (!sym->dynamic) throw RuleError("update of a static symbol: " + up.loc.fn);
    next.set_fun(up.loc.fn, up.loc.args, up.value);
  }
  return next;
}

UpdateSet State::diff(const State& after, const State& before) {
  if (after.vocab() != before.vocab()) {
    throw VocabularyError("diff across different vocabularies");
  }
  UpdateSet out;
  for (const auto& a : before.carrier_) {
    if (!after.in_carrier(a)) throw VocabularyError("carrier shrank between states");
  }
  for (const auto& a : after.carrier_) {
    if (!before.in_carrier(a)) {
      out.add_import(a);
      out.add(Update{Location{"reserve", {a}}, Value::boolean(false)});
    }
  }
  auto scan = [&](const State& side) {
    for (const auto& [fn, table] : side.tables_) {
      const FunctionSymbol* sym = before.vocab().find(fn);
      if (sym == nullptr) continue;
      for (const auto& [args, _] : table) {
        Value va = after.lookup(fn, args);
        Value vb = before.lookup(fn, args);
        if (va != vb) {
          if (!sym->dynamic) {
            throw VocabularyError("states differ in static interpretation of " + fn);
          }
          out.add(Update{Location{fn, args}, va});
        }
      }
    }
  };
  scan(after);
  scan(before);
  return out;
}

Value State::rename_value(const Value& v, const std::map<AtomId, AtomId>& perm) {
  switch (v.kind()) {
    case Value::Kind::Undef:
    case Value::Kind::Bool:
    case Value::Kind::Int:
      return v;
    case Value::Kind::Atom: {
      auto it = perm.find(v.atom_id());
      return it == perm.end() ? v : Value::atom(it->second);
    }
    case Value::Kind::Pair:
      return Value::pair(rename_value(v.pair_first(), perm), rename_value(v.pair_second(), perm));
    case Value::Kind::Multiset: {
      Value::MsetEntries entries;
      for (const auto& e : v.mset_entries()) {
        entries.emplace_back(rename_value(e.first, perm), e.second);
      }
      return Value::multiset(std::move(entries));
    }
  }
  return v;
}

State State::renamed(const std::map<AtomId, AtomId>& perm) const {
  State out(vocab_);
  out.base_ = base_;
  for (const auto& a : carrier_) out.add_carrier(rename_value(a, perm));
  if (out.carrier_.size() != carrier_.size()) {
    throw IsomorphismError("renaming is not injective on the carrier");
  }
  for (const auto& [fn, table] : tables_) {
    for (const auto& [args, value] : table) {
      std::vector<Value> rargs;
      rargs.reserve(args.size());
      for (const auto& a : args) rargs.push_back(rename_value(a, perm));
      out.set_fun(fn, rargs, rename_value(value, perm));
    }
  }
  return out;
}

bool State::equivalent(const State& o) const {
  return vocab() == o.vocab() && carrier_ == o.carrier_ && base_ == o.base_ &&
         tables_ == o.tables_;
}

}  // namespace pasm
