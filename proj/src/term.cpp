#include "pasm/term.hpp"

#include <algorithm>
#include <sstream>

#include "pasm/errors.hpp"

namespace pasm {

struct Term::Rep {
  Kind kind = Kind::Var;
  std::string name;            // Var name or App function symbol
  Value lit;                   // Lit
  std::vector<Term> args;      // App
  std::vector<Term> head;      // Comp: encoded head at index 0
  int head_arity = 1;          // Comp
  std::vector<Term> guard;     // Comp: guard at index 0
  std::vector<std::string> binders;
  std::vector<Term> domain_terms;  // Comp: closed comprehensions replacing the carrier
};

Term Term::var(const std::string& name) {
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Var;
  rep->name = name;
  return Term(std::move(rep));
}

Term Term::lit(const Value& v) {
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Lit;
  rep->lit = v;
  return Term(std::move(rep));
}

Term Term::app(const std::string& fn, std::vector<Term> args) {
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::App;
  rep->name = fn;
  rep->args = std::move(args);
  return Term(std::move(rep));
}

Term Term::tuple_term(const std::vector<Term>& components) {
  if (components.empty()) return undef();
  Term out = components.back();
  for (std::size_t i = components.size() - 1; i-- > 0;) {
    out = app("pair", {components[i], out});
  }
  return out;
}

Term Term::comp(const std::vector<Term>& head_components, const Term& guard,
                std::vector<std::string> binders, std::vector<Term> domain_terms) {
  if (head_components.empty()) throw RuleError("comprehension with an empty head");
  return comp_encoded(tuple_term(head_components), static_cast<int>(head_components.size()),
                      guard, std::move(binders), std::move(domain_terms));
}

Term Term::comp_encoded(const Term& head, int head_arity, const Term& guard,
                        std::vector<std::string> binders, std::vector<Term> domain_terms) {
  if (head_arity < 1) throw RuleError("comprehension head arity must be positive");
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Comp;
  rep->head = {head};
  rep->head_arity = head_arity;
  rep->guard = {guard};
  rep->binders = std::move(binders);
  rep->domain_terms = std::move(domain_terms);
  return Term(std::move(rep));
}

Term::Kind Term::kind() const { return rep_->kind; }

const std::string& Term::var_name() const { return rep_->name; }
const Value& Term::lit_value() const { return rep_->lit; }
const std::string& Term::app_fn() const { return rep_->name; }
const std::vector<Term>& Term::app_args() const { return rep_->args; }
const Term& Term::comp_head() const { return rep_->head[0]; }
int Term::comp_head_arity() const { return rep_->head_arity; }
const Term& Term::comp_guard() const { return rep_->guard[0]; }
const std::vector<std::string>& Term::comp_binders() const { return rep_->binders; }
const std::vector<Term>& Term::comp_domain_terms() const { return rep_->domain_terms; }

std::vector<Term> Term::comp_head_components() const {
  std::vector<Term> out;
  Term cur = comp_head();
  for (int i = comp_head_arity(); i > 1; --i) {
    if (!cur.is_app() || cur.app_fn() != "pair" || cur.app_args().size() != 2) {
      throw RuleError("comprehension head does not encode " + std::to_string(comp_head_arity()) +
                      " components: " + comp_head().to_string());
    }
    out.push_back(cur.app_args()[0]);
    cur = cur.app_args()[1];
  }
  out.push_back(cur);
  return out;
}

bool Term::operator==(const Term& o) const {
  if (rep_ == o.rep_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Var:
      return var_name() == o.var_name();
    case Kind::Lit:
      return lit_value() == o.lit_value();
    case Kind::App:
      return app_fn() == o.app_fn() && app_args() == o.app_args();
    case Kind::Comp:
      return comp_head_arity() == o.comp_head_arity() && comp_binders() == o.comp_binders() &&
             comp_head() == o.comp_head() && comp_guard() == o.comp_guard() &&
             comp_domain_terms() == o.comp_domain_terms();
  }
  return false;
}

namespace {

// Precedence levels, loosest binding first. Operands print at the level to the
// right of the operator for left-associative chains.
constexpr int kIff = 0, kImplies = 1, kOr = 2, kAnd = 3, kCmp = 4, kAdd = 5, kMul = 6,
              kPrimary = 7;

void print_term(std::ostringstream& os, const Term& t, int min_level);

void print_infix(std::ostringstream& os, const Term& t, int level, const char* op, int left_level,
                 int right_level, int min_level) {
  bool wrap = level < min_level;
  if (wrap) os << "(";
  print_term(os, t.app_args()[0], left_level);
  os << " " << op << " ";
  print_term(os, t.app_args()[1], right_level);
  if (wrap) os << ")";
}

void print_term(std::ostringstream& os, const Term& t, int min_level) {
  switch (t.kind()) {
    case Term::Kind::Var:
      os << t.var_name();
      return;
    case Term::Kind::Lit:
      os << t.lit_value().to_string();
      return;
    case Term::Kind::App: {
      const std::string& fn = t.app_fn();
      std::size_t n = t.app_args().size();
      if (fn == "iff" && n == 2) return print_infix(os, t, kIff, "<->", kImplies, kIff, min_level);
      if (fn == "implies" && n == 2)
        return print_infix(os, t, kImplies, "->", kOr, kImplies, min_level);
      if (fn == "or" && n == 2) return print_infix(os, t, kOr, "or", kOr, kAnd, min_level);
      if (fn == "and" && n == 2) return print_infix(os, t, kAnd, "and", kAnd, kCmp, min_level);
      if (fn == "eq" && n == 2) return print_infix(os, t, kCmp, "=", kAdd, kAdd, min_level);
      if (fn == "lt" && n == 2) return print_infix(os, t, kCmp, "<", kAdd, kAdd, min_level);
      if (fn == "add" && n == 2) return print_infix(os, t, kAdd, "+", kAdd, kMul, min_level);
      if (fn == "sub" && n == 2) return print_infix(os, t, kAdd, "-", kAdd, kMul, min_level);
      if (fn == "mul" && n == 2) return print_infix(os, t, kMul, "*", kMul, kPrimary, min_level);
      if (fn == "not" && n == 1) {
        os << "not(";
        print_term(os, t.app_args()[0], kIff);
        os << ")";
        return;
      }
      if (fn == "pair" && n == 2) {
        os << "(";
        print_term(os, t.app_args()[0], kIff);
        os << ", ";
        print_term(os, t.app_args()[1], kIff);
        os << ")";
        return;
      }
      if (fn == "emptyset" && n == 0) {
        os << "{{}}";
        return;
      }
      os << fn;
      if (n > 0) {
        os << "(";
        for (std::size_t i = 0; i < n; ++i) {
          if (i > 0) os << ", ";
          print_term(os, t.app_args()[i], kIff);
        }
        os << ")";
      }
      return;
    }
    case Term::Kind::Comp: {
      os << "{{ ";
      std::vector<Term> components = t.comp_head_components();
      if (components.size() == 1) {
        print_term(os, components[0], kIff);
      } else {
        os << "(";
        for (std::size_t i = 0; i < components.size(); ++i) {
          if (i > 0) os << ", ";
          print_term(os, components[i], kIff);
        }
        os << ")";
      }
      os << " | ";
      print_term(os, t.comp_guard(), kIff);
      os << " }}";
      if (!t.comp_binders().empty()) {
        os << " over ";
        if (!t.comp_domain_terms().empty()) {
          os << "critical(";
          for (std::size_t i = 0; i < t.comp_domain_terms().size(); ++i) {
            if (i > 0) os << "; ";
            print_term(os, t.comp_domain_terms()[i], kIff);
          }
          os << ") ";
        }
        for (std::size_t i = 0; i < t.comp_binders().size(); ++i) {
          if (i > 0) os << ", ";
          os << t.comp_binders()[i];
        }
      }
      return;
    }
  }
}

}  // namespace

std::string Term::to_string() const {
  std::ostringstream os;
  print_term(os, *this, kIff);
  return os.str();
}

const Value* Env::find(const std::string& name) const {
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
    if (it->first == name) return &it->second;
  }
  return nullptr;
}

namespace {

void collect_free(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      if (std::find(bound.begin(), bound.end(), t.var_name()) == bound.end()) {
        out.insert(t.var_name());
      }
      return;
    case Term::Kind::Lit:
      return;
    case Term::Kind::App:
      for (const Term& a : t.app_args()) collect_free(a, bound, out);
      return;
    case Term::Kind::Comp: {
      std::size_t mark = bound.size();
      for (const std::string& b : t.comp_binders()) bound.push_back(b);
      collect_free(t.comp_head(), bound, out);
      collect_free(t.comp_guard(), bound, out);
      bound.resize(mark);
      for (const Term& d : t.comp_domain_terms()) collect_free(d, bound, out);
      return;
    }
  }
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(t, bound, out);
  return out;
}

Value eval(const Term& t, const State& s, Env& env) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      const Value* v = env.find(t.var_name());
      if (v == nullptr) throw EvalError("unbound variable: " + t.var_name());
      return *v;
    }
    case Term::Kind::Lit:
      return t.lit_value();
    case Term::Kind::App: {
      const std::string& fn = t.app_fn();
      // Conjunction short-circuits: a non-true left operand forces false
      // whatever the right operand evaluates to.
      if (fn == "and" && t.app_args().size() == 2) {
        Value a = eval(t.app_args()[0], s, env);
        if (!a.is_true()) return Value::boolean(false);
        return Value::boolean(eval(t.app_args()[1], s, env).is_true());
      }
      std::vector<Value> args;
      args.reserve(t.app_args().size());
      for (const Term& a : t.app_args()) args.push_back(eval(a, s, env));
      return s.lookup(fn, args);
    }
    case Term::Kind::Comp: {
      std::vector<Value> domain_store;
      const std::vector<Value>* domain;
      if (t.comp_domain_terms().empty()) {
        domain = &s.carrier();
      } else {
        domain_store = critical_values(s, t.comp_domain_terms());
        domain = &domain_store;
      }
      std::size_t k = t.comp_binders().size();
      Value::MsetEntries entries;
      if (k == 0) {
        if (holds(t.comp_guard(), s, env)) entries.emplace_back(eval(t.comp_head(), s, env), 1);
        return Value::multiset(std::move(entries));
      }
      if (domain->empty()) return Value::empty_multiset();
      std::vector<std::size_t> idx(k, 0);
      bool done = false;
      while (!done) {
        for (std::size_t i = 0; i < k; ++i) env.push(t.comp_binders()[i], (*domain)[idx[i]]);
        if (holds(t.comp_guard(), s, env)) entries.emplace_back(eval(t.comp_head(), s, env), 1);
        for (std::size_t i = 0; i < k; ++i) env.pop();
        done = true;
        for (std::size_t pos = k; pos-- > 0;) {
          if (++idx[pos] < domain->size()) {
            done = false;
            break;
          }
          idx[pos] = 0;
        }
      }
      return Value::multiset(std::move(entries));
    }
  }
  throw EvalError("unreachable term kind");
}

Value eval_closed(const Term& t, const State& s) {
  Env env;
  return eval(t, s, env);
}

bool holds(const Term& t, const State& s, Env& env) { return eval(t, s, env).is_true(); }

std::vector<Value> critical_values(const State& s, const std::vector<Term>& comp_terms) {
  std::set<Value> acc;
  for (const Term& t : comp_terms) {
    if (!t.is_comp()) {
      throw RuleError("critical domain requires comprehension terms, got: " + t.to_string());
    }
    Value m = eval_closed(t, s);
    if (!m.is_multiset()) throw EvalError("comprehension evaluated to a non-multiset");
    for (const auto& e : m.mset_entries()) {
      for (const Value& c : e.first.tuple_components(t.comp_head_arity())) acc.insert(c);
    }
  }
  return std::vector<Value>(acc.begin(), acc.end());
}

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  std::string name = base;
  while (taken.count(name)) name += "'";
  return name;
}

}  // namespace

Term substitute(const Term& t, const std::map<std::string, Term>& subst) {
  if (subst.empty()) return t;
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = subst.find(t.var_name());
      return it == subst.end() ? t : it->second;
    }
    case Term::Kind::Lit:
      return t;
    case Term::Kind::App: {
      std::vector<Term> args;
      args.reserve(t.app_args().size());
      for (const Term& a : t.app_args()) args.push_back(substitute(a, subst));
      return Term::app(t.app_fn(), std::move(args));
    }
    case Term::Kind::Comp: {
      std::map<std::string, Term> inner = subst;
      for (const std::string& b : t.comp_binders()) inner.erase(b);
      if (inner.empty()) return t;

      std::set<std::string> replacement_free;
      for (const auto& [_, r] : inner) {
        auto fv = free_vars(r);
        replacement_free.insert(fv.begin(), fv.end());
      }

      Term head = t.comp_head();
      Term guard = t.comp_guard();
      std::vector<std::string> binders = t.comp_binders();
      std::set<std::string> taken = replacement_free;
      for (const std::string& b : binders) taken.insert(b);
      {
        auto fv_head = free_vars(head);
        auto fv_guard = free_vars(guard);
        taken.insert(fv_head.begin(), fv_head.end());
        taken.insert(fv_guard.begin(), fv_guard.end());
      }
      for (std::string& b : binders) {
        if (replacement_free.count(b)) {
          std::string renamed = fresh_name(b, taken);
          taken.insert(renamed);
          std::map<std::string, Term> renaming = {{b, Term::var(renamed)}};
          head = substitute(head, renaming);
          guard = substitute(guard, renaming);
          b = renamed;
        }
      }
      return Term::comp_encoded(substitute(head, inner), t.comp_head_arity(),
                                substitute(guard, inner), std::move(binders),
                                t.comp_domain_terms());
    }
  }
  return t;
}

namespace {

enum class Sort { Point, Sec };

Sort strat(const Term& t, const Vocabulary& vocab, std::vector<std::string>& diags) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return Sort::Point;
    case Term::Kind::Lit:
      return t.lit_value().is_atom() ? Sort::Point : Sort::Sec;
    case Term::Kind::App: {
      const FunctionSymbol* sym = vocab.resolve(t.app_fn());
      std::vector<Sort> arg_sorts;
      for (const Term& a : t.app_args()) arg_sorts.push_back(strat(a, vocab, diags));
      if (sym == nullptr) {
        diags.push_back("unknown function symbol: " + t.app_fn());
        return Sort::Sec;
      }
      if (sym->kind == SymbolKind::Primary) {
        // Primary tables are keyed by carrier atoms, so their arguments must
        // stay in the point fragment. Everywhere else point terms are fine:
        // the secondary universe contains the carrier.
        for (std::size_t i = 0; i < arg_sorts.size(); ++i) {
          if (arg_sorts[i] != Sort::Point) {
            diags.push_back("primary function " + sym->name +
                            " applied to a non-point argument: " + t.app_args()[i].to_string());
          }
        }
        return Sort::Point;
      }
      return Sort::Sec;
    }
    case Term::Kind::Comp:
      strat(t.comp_head(), vocab, diags);
      strat(t.comp_guard(), vocab, diags);
      for (const Term& d : t.comp_domain_terms()) strat(d, vocab, diags);
      return Sort::Sec;
  }
  return Sort::Sec;
}

}  // namespace

std::vector<std::string> check_stratification(const Term& t, const Vocabulary& vocab) {
  std::vector<std::string> diags;
  strat(t, vocab, diags);
  return diags;
}

Term desugar_exists(const std::vector<std::string>& vars, const Term& phi) {
  std::vector<Term> components;
  for (const std::string& v : vars) components.push_back(Term::var(v));
  Term c = Term::comp(components, phi, vars);
  return Term::neg(Term::eq(c, Term::empty()));
}

Term desugar_forall(const std::vector<std::string>& vars, const Term& phi) {
  std::vector<Term> components;
  for (const std::string& v : vars) components.push_back(Term::var(v));
  Term c = Term::comp(components, Term::neg(phi), vars);
  return Term::eq(c, Term::empty());
}

}  // namespace pasm
