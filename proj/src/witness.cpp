#include "pasm/witness.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "pasm/errors.hpp"

namespace pasm {

namespace {

std::set<std::string> term_vars(const std::vector<Term>& heads, const Term& guard) {
  std::set<std::string> vars = free_vars(guard);
  for (const Term& h : heads) {
    std::set<std::string> hv = free_vars(h);
    vars.insert(hv.begin(), hv.end());
  }
  return vars;
}

// Open extraction: heads plus an accumulated guard; the binder set is implicit
// (all variables end up bound once the main rule closes over them).
struct Open {
  std::vector<Term> heads;
  Term guard;
};

Open substituted(const Open& w, const std::string& var, const Term& repl) {
  std::map<std::string, Term> subst{{var, repl}};
  Open out{{}, substitute(w.guard, subst)};
  out.heads.reserve(w.heads.size());
  for (const Term& h : w.heads) out.heads.push_back(substitute(h, subst));
  return out;
}

void extract_rec(const Rule& r, std::vector<Open>& out) {
  switch (r.kind()) {
    case Rule::Kind::Assign: {
      std::vector<Term> heads;
      heads.push_back(r.assign_rhs());
      for (const Term& a : r.assign_args()) heads.push_back(a);
      out.push_back({std::move(heads), Term::tru()});
      return;
    }
    case Rule::Kind::Par:
      for (const Rule& sub : r.par_rules()) extract_rec(sub, out);
      return;
    case Rule::Kind::If: {
      out.push_back({{r.guard()}, Term::tru()});
      out.push_back({{Term::tru()}, Term::tru()});
      std::vector<Open> body;
      extract_rec(r.body(), body);
      for (const Open& w : body) {
        out.push_back({w.heads, Term::conj(w.guard, r.guard())});
      }
      return;
    }
    case Rule::Kind::Forall:
    case Rule::Kind::ForallCritical: {
      std::vector<Open> body;
      extract_rec(r.body(), body);
      for (const Open& w : body) {
        out.push_back({w.heads, Term::conj(w.guard, r.guard())});
      }
      for (const Open& w : body) {
        out.push_back({w.heads, Term::conj(w.guard, Term::neg(r.guard()))});
      }
      // The restricted quantification range is itself observable state: pin
      // down each domain comprehension's value so coinciding states agree on
      // which bindings the rule visits.
      for (const Term& dom : r.domain_terms()) {
        out.push_back({{dom}, Term::tru()});
      }
      return;
    }
    case Rule::Kind::Import: {
      if (r.import_site() < 0) throw RuleError("import site not numbered");
      std::set<std::string> ctx = rule_free_vars(r.body());
      ctx.erase(r.import_var());
      std::vector<Term> ctx_terms;
      for (const std::string& v : ctx) ctx_terms.push_back(Term::var(v));
      Term imported = Term::app(
          "imported", {Term::lit(Value::integer(r.import_site())), Term::tuple_term(ctx_terms)});
      std::vector<Open> body;
      extract_rec(r.body(), body);
      for (const Open& w : body) out.push_back(substituted(w, r.import_var(), imported));
      // The allocation itself updates the state (carrier growth and reserve
      // bookkeeping), so the allocated element must be witnessed even when the
      // body contributes nothing.
      out.push_back({{imported}, Term::tru()});
      return;
    }
  }
}

WitnessTerm promote(const Open& w) {
  std::set<std::string> vars = term_vars(w.heads, w.guard);
  return WitnessTerm{w.heads, w.guard, {vars.begin(), vars.end()}};
}

void collect_subterms(const Term& t, std::vector<Term>& out) {
  out.push_back(t);
  if (t.is_app()) {
    for (const Term& a : t.app_args()) collect_subterms(a, out);
  }
  // Comprehensions are kept whole: their bound structure is not a value path.
}

}  // namespace

Term WitnessTerm::to_comp() const {
  return Term::comp(heads, guard, binders);
}

std::string WitnessTerm::to_string() const { return to_comp().to_string(); }

bool WitnessTerm::operator==(const WitnessTerm& other) const {
  return heads == other.heads && guard == other.guard && binders == other.binders;
}

WitnessSet extract_witness(const Rule& r) {
  if (!rule_free_vars(r).empty()) {
    throw RuleError("witness extraction requires a closed rule");
  }
  std::vector<Open> open;
  extract_rec(r, open);
  WitnessSet out;
  std::set<std::string> seen;
  for (const Open& w : open) {
    WitnessTerm t = promote(w);
    if (seen.insert(t.to_string()).second) out.push_back(std::move(t));
  }
  return out;
}

WitnessSet extract_witness(const Machine& m) { return extract_witness(m.rule); }

WitnessSet close_subterms(const WitnessSet& w) {
  WitnessSet out;
  std::set<std::string> seen;
  auto push = [&](WitnessTerm t) {
    if (seen.insert(t.to_string()).second) out.push_back(std::move(t));
  };
  for (const WitnessTerm& t : w) {
    push(t);
    std::set<std::string> guard_free = free_vars(t.guard);
    for (const Term& head : t.heads) {
      std::vector<Term> subs;
      collect_subterms(head, subs);
      for (const Term& sub : subs) {
        std::set<std::string> keep = free_vars(sub);
        std::vector<std::string> rest;
        for (const std::string& v : guard_free) {
          if (keep.find(v) == keep.end()) rest.push_back(v);
        }
        Term guard = rest.empty() ? t.guard : desugar_exists(rest, t.guard);
        std::set<std::string> vars = term_vars({sub}, guard);
        push(WitnessTerm{{sub}, guard, {vars.begin(), vars.end()}});
      }
    }
  }
  return out;
}

std::vector<std::string> guard_conjuncts(const Term& guard) {
  std::vector<std::string> out;
  std::vector<Term> stack{guard};
  while (!stack.empty()) {
    Term t = stack.back();
    stack.pop_back();
    if (t.is_app() && t.app_fn() == "and" && t.app_args().size() == 2) {
      stack.push_back(t.app_args()[1]);
      stack.push_back(t.app_args()[0]);
      continue;
    }
    if (t == Term::tru()) continue;
    out.push_back(t.to_string());
  }
  return out;
}

std::string witness_key(const WitnessTerm& t) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < t.heads.size(); ++i) {
    if (i > 0) os << ", ";
    os << t.heads[i].to_string();
  }
  os << ") | ";
  std::vector<std::string> conj = guard_conjuncts(t.guard);
  for (std::size_t i = 0; i < conj.size(); ++i) {
    if (i > 0) os << " & ";
    os << conj[i];
  }
  os << " over";
  for (const std::string& b : t.binders) os << " " << b;
  return os.str();
}

std::vector<Value> eval_witness(const WitnessSet& w, const State& s) {
  std::vector<Value> out;
  out.reserve(w.size());
  for (const WitnessTerm& t : w) out.push_back(eval_closed(t.to_comp(), s));
  return out;
}

bool coincide(const State& s1, const State& s2, const WitnessSet& w) {
  for (const WitnessTerm& t : w) {
    Term c = t.to_comp();
    if (!(eval_closed(c, s1) == eval_closed(c, s2))) return false;
  }
  return true;
}

bool w_similar(const State& s1, const State& s2, const WitnessSet& w) {
  std::vector<Value> a = eval_witness(w, s1);
  std::vector<Value> b = eval_witness(w, s2);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

Term similarity_formula(const State& s, const WitnessSet& w) {
  std::vector<Value> vals = eval_witness(w, s);
  Term out = Term::tru();
  bool first = true;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      Term atom = Term::eq(w[i].to_comp(), w[j].to_comp());
      if (!(vals[i] == vals[j])) atom = Term::neg(atom);
      out = first ? atom : Term::conj(out, atom);
      first = false;
    }
  }
  return out;
}

std::string ExplorationReport::summary() const {
  std::ostringstream os;
  os << "pairs=" << pairs << " coinciding=" << coinciding << " violations=" << violations.size();
  return os.str();
}

ExplorationReport check_bounded_exploration(const Machine& m, const WitnessSet& w,
                                            const std::vector<std::pair<State, State>>& pairs) {
  ExplorationReport report;
  report.pairs = pairs.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const State& s1 = pairs[i].first;
    const State& s2 = pairs[i].second;
    if (!coincide(s1, s2, w)) continue;
    ++report.coinciding;
    UpdateSet d1 = machine_update_set(m, s1).normalized_against(s1);
    UpdateSet d2 = machine_update_set(m, s2).normalized_against(s2);
    if (!(d1 == d2)) {
      report.violations.push_back(
          {i, "diffs differ: " + d1.to_string() + " vs " + d2.to_string()});
    }
  }
  return report;
}

namespace {

bool property_holds(const Machine& m, const WitnessSet& w,
                    const std::vector<std::pair<State, State>>& validation) {
  return check_bounded_exploration(m, w, validation).ok();
}

}  // namespace

WitnessSet prune_witness(const Machine& m, const WitnessSet& w,
                         const std::vector<std::pair<State, State>>& validation) {
  WitnessSet current = w;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < current.size(); ++i) {
      WitnessSet candidate;
      for (std::size_t j = 0; j < current.size(); ++j) {
        if (j != i) candidate.push_back(current[j]);
      }
      if (property_holds(m, candidate, validation)) {
        current = std::move(candidate);
        changed = true;
        break;
      }
    }
  }
  return current;
}

}  // namespace pasm
