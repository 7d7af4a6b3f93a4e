#include "pasm/rule.hpp"

#include <algorithm>
#include <sstream>

#include "pasm/errors.hpp"

namespace pasm {

struct Rule::Rep {
  Kind kind = Kind::Par;
  std::string fn;                  // Assign target, Import variable
  std::vector<Term> args;          // Assign
  std::vector<Term> rhs;           // Assign, size 1
  std::vector<Term> guard;         // If, Forall, ForallCritical, size 1
  std::vector<std::string> vars;   // Forall, ForallCritical
  std::vector<Term> domain_terms;  // ForallCritical
  std::vector<Rule> children;      // Par rules, or the single body
  int site = -1;                   // Import
};

Rule Rule::assign(const std::string& fn, std::vector<Term> args, const Term& rhs) {
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Assign;
  rep->fn = fn;
  rep->args = std::move(args);
  rep->rhs = {rhs};
  return Rule(std::move(rep));
}

Rule Rule::par(std::vector<Rule> rules) {
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Par;
  rep->children = std::move(rules);
  return Rule(std::move(rep));
}

Rule Rule::cond(const Term& guard, const Rule& body) {
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::If;
  rep->guard = {guard};
  rep->children = {body};
  return Rule(std::move(rep));
}

Rule Rule::forall(std::vector<std::string> vars, const Term& guard, const Rule& body) {
  if (vars.empty()) throw RuleError("forall without variables");
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Forall;
  rep->vars = std::move(vars);
  rep->guard = {guard};
  rep->children = {body};
  return Rule(std::move(rep));
}

Rule Rule::forall_critical(std::vector<std::string> vars, std::vector<Term> domain_terms,
                           const Term& guard, const Rule& body) {
  if (vars.empty()) throw RuleError("forall without variables");
  if (domain_terms.empty()) throw RuleError("critical domain without comprehension terms");
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::ForallCritical;
  rep->vars = std::move(vars);
  rep->domain_terms = std::move(domain_terms);
  rep->guard = {guard};
  rep->children = {body};
  return Rule(std::move(rep));
}

Rule Rule::import_rule(const std::string& var, const Rule& body) {
  if (var.empty()) throw RuleError("import without a variable");
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Import;
  rep->fn = var;
  rep->children = {body};
  return Rule(std::move(rep));
}

Rule Rule::import_rule_at(const std::string& var, const Rule& body, int site) {
  if (var.empty()) throw RuleError("import without a variable");
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Import;
  rep->fn = var;
  rep->children = {body};
  rep->site = site;
  return Rule(std::move(rep));
}

Rule::Kind Rule::kind() const { return rep_->kind; }
const std::string& Rule::assign_fn() const { return rep_->fn; }
const std::vector<Term>& Rule::assign_args() const { return rep_->args; }
const Term& Rule::assign_rhs() const { return rep_->rhs[0]; }
const std::vector<Rule>& Rule::par_rules() const { return rep_->children; }
const Term& Rule::guard() const { return rep_->guard[0]; }
const Rule& Rule::body() const { return rep_->children[0]; }
const std::vector<std::string>& Rule::vars() const { return rep_->vars; }
const std::string& Rule::import_var() const { return rep_->fn; }
int Rule::import_site() const { return rep_->site; }
const std::vector<Term>& Rule::domain_terms() const { return rep_->domain_terms; }

bool Rule::operator==(const Rule& o) const {
  if (rep_ == o.rep_) return true;
  if (kind() != o.kind()) return false;
  const Rep& a = *rep_;
  const Rep& b = *o.rep_;
  return a.fn == b.fn && a.args == b.args && a.rhs == b.rhs && a.guard == b.guard &&
         a.vars == b.vars && a.domain_terms == b.domain_terms && a.children == b.children;
}

namespace {

void term_vars(const Term& t, std::set<std::string>& out) {
  auto fv = free_vars(t);
  out.insert(fv.begin(), fv.end());
}

void rule_fv(const Rule& r, std::set<std::string>& out) {
  switch (r.kind()) {
    case Rule::Kind::Assign:
      for (const Term& a : r.assign_args()) term_vars(a, out);
      term_vars(r.assign_rhs(), out);
      return;
    case Rule::Kind::Par:
      for (const Rule& c : r.par_rules()) rule_fv(c, out);
      return;
    case Rule::Kind::If:
      term_vars(r.guard(), out);
      rule_fv(r.body(), out);
      return;
    case Rule::Kind::Forall:
    case Rule::Kind::ForallCritical: {
      std::set<std::string> inner;
      term_vars(r.guard(), inner);
      rule_fv(r.body(), inner);
      for (const std::string& v : r.vars()) inner.erase(v);
      out.insert(inner.begin(), inner.end());
      for (const Term& d : r.domain_terms()) term_vars(d, out);
      return;
    }
    case Rule::Kind::Import: {
      std::set<std::string> inner;
      rule_fv(r.body(), inner);
      inner.erase(r.import_var());
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

}  // namespace

std::set<std::string> rule_free_vars(const Rule& r) {
  std::set<std::string> out;
  rule_fv(r, out);
  return out;
}

Rule number_import_sites(const Rule& r, int& next) {
  switch (r.kind()) {
    case Rule::Kind::Assign:
      return r;
    case Rule::Kind::Par: {
      std::vector<Rule> children;
      children.reserve(r.par_rules().size());
      for (const Rule& c : r.par_rules()) children.push_back(number_import_sites(c, next));
      return Rule::par(std::move(children));
    }
    case Rule::Kind::If:
      return Rule::cond(r.guard(), number_import_sites(r.body(), next));
    case Rule::Kind::Forall:
      return Rule::forall(r.vars(), r.guard(), number_import_sites(r.body(), next));
    case Rule::Kind::ForallCritical:
      return Rule::forall_critical(r.vars(), r.domain_terms(), r.guard(),
                                   number_import_sites(r.body(), next));
    case Rule::Kind::Import: {
      int site = next++;
      return Rule::import_rule_at(r.import_var(), number_import_sites(r.body(), next), site);
    }
  }
  return r;
}

namespace {

void wf(const Rule& r, const Vocabulary& vocab, std::vector<std::string>& diags) {
  auto terms = [&](const Term& t) {
    auto d = check_stratification(t, vocab);
    diags.insert(diags.end(), d.begin(), d.end());
  };
  switch (r.kind()) {
    case Rule::Kind::Assign: {
      const FunctionSymbol* sym = vocab.find(r.assign_fn());
      if (sym == nullptr) {
        if (Vocabulary::builtin(r.assign_fn()) != nullptr) {
          diags.push_back("assignment to a background symbol: " + r.assign_fn());
        } else {
          diags.push_back("assignment to an undeclared symbol: " + r.assign_fn());
        }
      } else {
        if (!sym->dynamic) diags.push_back("assignment to a static symbol: " + r.assign_fn());
        if (static_cast<int>(r.assign_args().size()) != sym->arity) {
          diags.push_back("arity mismatch in assignment to " + r.assign_fn());
        }
      }
      for (const Term& a : r.assign_args()) terms(a);
      terms(r.assign_rhs());
      return;
    }
    case Rule::Kind::Par:
      for (const Rule& c : r.par_rules()) wf(c, vocab, diags);
      return;
    case Rule::Kind::If:
      terms(r.guard());
      wf(r.body(), vocab, diags);
      return;
    case Rule::Kind::Forall:
    case Rule::Kind::ForallCritical: {
      std::set<std::string> seen;
      for (const std::string& v : r.vars()) {
        if (!seen.insert(v).second) diags.push_back("repeated bound variable: " + v);
      }
      terms(r.guard());
      for (const Term& d : r.domain_terms()) {
        terms(d);
        if (!d.is_comp()) diags.push_back("critical domain requires comprehension terms");
        if (!free_vars(d).empty()) diags.push_back("critical domain term is not closed");
      }
      wf(r.body(), vocab, diags);
      return;
    }
    case Rule::Kind::Import:
      wf(r.body(), vocab, diags);
      return;
  }
}

}  // namespace

std::vector<std::string> rule_well_formed(const Rule& r, const Vocabulary& vocab) {
  std::vector<std::string> diags;
  wf(r, vocab, diags);
  return diags;
}

namespace {

void check_assign_ranges(const FunctionSymbol& sym, const std::vector<Value>& args,
                         const Value& value, const State& s) {
  auto range_fail = [&](const std::string& what, const Value& v) {
    throw RangeError(what + " in assignment to " + sym.name + ": " + v.to_string());
  };
  for (const Value& a : args) {
    switch (sym.kind) {
      case SymbolKind::Primary:
      case SymbolKind::Bridge:
        if (!s.in_carrier(a)) range_fail("argument outside the carrier", a);
        break;
      case SymbolKind::Secondary:
        if (!s.atomic(a)) range_fail("non-atomic argument", a);
        break;
      case SymbolKind::Background:
        break;
    }
  }
  if (sym.relational) {
    if (!value.is_bool()) range_fail("non-boolean value for a relational symbol", value);
    return;
  }
  switch (sym.kind) {
    case SymbolKind::Primary:
      if (!s.in_carrier(value) && !value.is_undef()) {
        range_fail("value outside the carrier", value);
      }
      break;
    case SymbolKind::Secondary:
    case SymbolKind::Bridge:
      if (!s.atomic(value)) range_fail("non-atomic value", value);
      break;
    case SymbolKind::Background:
      break;
  }
}

void us_rec(const Rule& r, const State& s, Env& env, UpdateSet& out,
            std::vector<ImportRecord>* prov) {
  switch (r.kind()) {
    case Rule::Kind::Assign: {
      const FunctionSymbol* sym = s.vocab().find(r.assign_fn());
      if (sym == nullptr) throw RuleError("assignment to an undeclared symbol: " + r.assign_fn());
      if (!sym->dynamic) throw RuleError("assignment to a static symbol: " + r.assign_fn());
      std::vector<Value> args;
      args.reserve(r.assign_args().size());
      for (const Term& a : r.assign_args()) args.push_back(eval(a, s, env));
      Value value = eval(r.assign_rhs(), s, env);
      check_assign_ranges(*sym, args, value, s);
      out.add(Update{Location{r.assign_fn(), std::move(args)}, value});
      return;
    }
    case Rule::Kind::Par:
      for (const Rule& c : r.par_rules()) us_rec(c, s, env, out, prov);
      return;
    case Rule::Kind::If:
      if (holds(r.guard(), s, env)) us_rec(r.body(), s, env, out, prov);
      return;
    case Rule::Kind::Forall: {
      std::size_t k = r.vars().size();
      const std::vector<Value>& domain = s.carrier();
      if (domain.empty()) return;
      std::vector<std::size_t> idx(k, 0);
      bool done = false;
      while (!done) {
        for (std::size_t i = 0; i < k; ++i) env.push(r.vars()[i], domain[idx[i]]);
        if (holds(r.guard(), s, env)) us_rec(r.body(), s, env, out, prov);
        for (std::size_t i = 0; i < k; ++i) env.pop();
        done = true;
        for (std::size_t pos = k; pos-- > 0;) {
          if (++idx[pos] < domain.size()) {
            done = false;
            break;
          }
          idx[pos] = 0;
        }
      }
      return;
    }
    case Rule::Kind::ForallCritical: {
      std::vector<Value> domain = critical_values(s, r.domain_terms());
      std::size_t k = r.vars().size();
      if (domain.empty()) return;
      std::vector<std::size_t> idx(k, 0);
      bool done = false;
      while (!done) {
        for (std::size_t i = 0; i < k; ++i) env.push(r.vars()[i], domain[idx[i]]);
        if (holds(r.guard(), s, env)) us_rec(r.body(), s, env, out, prov);
        for (std::size_t i = 0; i < k; ++i) env.pop();
        done = true;
        for (std::size_t pos = k; pos-- > 0;) {
          if (++idx[pos] < domain.size()) {
            done = false;
            break;
          }
          idx[pos] = 0;
        }
      }
      return;
    }
    case Rule::Kind::Import: {
      if (r.import_site() < 0) throw RuleError("import site not numbered");
      std::set<std::string> ctx_vars;
      rule_fv(r.body(), ctx_vars);
      ctx_vars.erase(r.import_var());
      std::vector<Value> ctx_values;
      for (const std::string& name : ctx_vars) {
        const Value* v = env.find(name);
        if (v == nullptr) throw EvalError("unbound variable: " + name);
        ctx_values.push_back(*v);
      }
      Value context = Value::tuple(ctx_values);
      // The plain key matches the background term imported(site, context); a
      // generation suffix only appears when a past step already consumed the
      // allocated atom for this key.
      AtomTable& tab = AtomTable::instance();
      Value atom = Value::atom(tab.import_keyed(r.import_site(), context));
      for (std::int64_t gen = 1; s.in_carrier(atom); ++gen) {
        atom = Value::atom(
            tab.import_keyed(r.import_site(), Value::pair(context, Value::integer(gen))));
      }
      out.add_import(atom);
      out.add(Update{Location{"reserve", {atom}}, Value::boolean(false)});
      if (prov != nullptr) prov->push_back({atom, r.import_site(), context});
      State extended = s;
      extended.add_carrier(atom);
      env.push(r.import_var(), atom);
      us_rec(r.body(), extended, env, out, prov);
      env.pop();
      return;
    }
  }
}

}  // namespace

UpdateSet update_set(const Rule& r, const State& s, std::vector<ImportRecord>* provenance) {
  UpdateSet out;
  Env env;
  us_rec(r, s, env, out, provenance);
  return out;
}

namespace {

std::string indent_str(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

}  // namespace

std::string Rule::to_string(int indent) const {
  std::ostringstream os;
  std::string pad = indent_str(indent);
  switch (kind()) {
    case Kind::Assign: {
      os << pad << assign_fn();
      if (!assign_args().empty()) {
        os << "(";
        for (std::size_t i = 0; i < assign_args().size(); ++i) {
          if (i > 0) os << ", ";
          os << assign_args()[i].to_string();
        }
        os << ")";
      }
      os << " := " << assign_rhs().to_string();
      return os.str();
    }
    case Kind::Par: {
      os << pad << "par\n";
      for (const Rule& c : par_rules()) os << c.to_string(indent + 1) << "\n";
      os << pad << "endpar";
      return os.str();
    }
    case Kind::If: {
      os << pad << "if " << guard().to_string() << " then\n";
      os << body().to_string(indent + 1) << "\n";
      os << pad << "endif";
      return os.str();
    }
    case Kind::Forall:
    case Kind::ForallCritical: {
      os << pad << "forall ";
      for (std::size_t i = 0; i < vars().size(); ++i) {
        if (i > 0) os << ", ";
        os << vars()[i];
      }
      if (kind() == Kind::ForallCritical) {
        os << " over critical(";
        for (std::size_t i = 0; i < domain_terms().size(); ++i) {
          if (i > 0) os << "; ";
          os << domain_terms()[i].to_string();
        }
        os << ")";
      }
      os << " with " << guard().to_string() << " do\n";
      os << body().to_string(indent + 1) << "\n";
      os << pad << "enddo";
      return os.str();
    }
    case Kind::Import: {
      os << pad << "import " << import_var() << " do\n";
      os << body().to_string(indent + 1) << "\n";
      os << pad << "enddo";
      return os.str();
    }
  }
  return os.str();
}

}  // namespace pasm
