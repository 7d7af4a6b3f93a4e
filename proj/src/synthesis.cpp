#include "pasm/synthesis.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "pasm/errors.hpp"

namespace pasm {

namespace {

constexpr std::size_t kMaxPartitionTuples = 4096;
constexpr std::size_t kMaxIsoEnum = 20000;
constexpr std::size_t kMaxValueTuples = 20000;
constexpr std::size_t kMaxFormulaNodes = 2000000;
constexpr std::size_t kMaxGuardCandidates = 20000;
constexpr std::size_t kWorkBudget = 400000000;
constexpr int kMaxLevel = 32;

int compare_value_vec(const std::vector<Value>& a, const std::vector<Value>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    int c = Value::compare(a[i], b[i]);
    if (c != 0) return c;
  }
  return 0;
}

}  // namespace

bool MultTag::operator==(const MultTag& o) const {
  return term_index == o.term_index && head == o.head && binding == o.binding;
}

bool MultTag::operator<(const MultTag& o) const {
  if (term_index != o.term_index) return term_index < o.term_index;
  int c = compare_value_vec(head, o.head);
  if (c != 0) return c < 0;
  return compare_value_vec(binding, o.binding) < 0;
}

std::string MultTag::to_string() const {
  std::ostringstream os;
  os << "tag(" << term_index << "; " << render_values(head) << "; " << render_values(binding)
     << ")";
  return os.str();
}

CElem CElem::value(const Value& v) {
  CElem e;
  e.is_tag_ = false;
  e.v_ = v;
  return e;
}

CElem CElem::tag(const MultTag& t) {
  CElem e;
  e.is_tag_ = true;
  e.t_ = t;
  return e;
}

const Value& CElem::val() const {
  if (is_tag_) throw RuleError("tag element has no value component");
  return v_;
}

const MultTag& CElem::tag_ref() const {
  if (!is_tag_) throw RuleError("value element has no tag component");
  return t_;
}

bool CElem::operator==(const CElem& o) const {
  if (is_tag_ != o.is_tag_) return false;
  return is_tag_ ? t_ == o.t_ : v_ == o.v_;
}

bool CElem::operator<(const CElem& o) const {
  if (is_tag_ != o.is_tag_) return !is_tag_;  // values sort before tags
  return is_tag_ ? t_ < o.t_ : v_ < o.v_;
}

std::string CElem::to_string() const { return is_tag_ ? t_.to_string() : v_.to_string(); }

int CriticalStructure::index_of(const CElem& e) const {
  auto it = std::lower_bound(domain.begin(), domain.end(), e);
  if (it == domain.end() || !(*it == e)) return -1;
  return static_cast<int>(it - domain.begin());
}

bool CriticalStructure::has_tuple(int rel, const std::vector<int>& tuple) const {
  const std::vector<std::vector<int>>& rows = relations[rel];
  return std::binary_search(rows.begin(), rows.end(), tuple);
}

std::vector<Term> witness_comps(const WitnessSet& w) {
  std::vector<Term> out;
  out.reserve(w.size());
  for (const WitnessTerm& t : w) out.push_back(t.to_comp());
  return out;
}

CriticalStructure critical_structure(const State& s, const WitnessSet& w) {
  CriticalStructure cs;
  cs.arities.reserve(w.size());
  std::vector<std::vector<std::pair<std::vector<Value>, MultTag>>> raw(w.size());
  std::set<CElem> dom;
  const std::vector<Value>& carrier = s.carrier();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const WitnessTerm& wt = w[i];
    cs.arities.push_back(static_cast<int>(wt.heads.size()) + 1);
    std::size_t k = wt.binders.size();
    if (k > 0 && carrier.empty()) continue;
    std::vector<std::size_t> idx(k, 0);
    bool done = false;
    while (!done) {
      Env env;
      std::vector<Value> binding;
      binding.reserve(k);
      for (std::size_t j = 0; j < k; ++j) {
        env.push(wt.binders[j], carrier[idx[j]]);
        binding.push_back(carrier[idx[j]]);
      }
      if (holds(wt.guard, s, env)) {
        std::vector<Value> head;
        head.reserve(wt.heads.size());
        for (const Term& h : wt.heads) head.push_back(eval(h, s, env));
        MultTag tag{static_cast<int>(i), head, binding};
        for (const Value& v : head) dom.insert(CElem::value(v));
        dom.insert(CElem::tag(tag));
        raw[i].emplace_back(std::move(head), std::move(tag));
      }
      done = true;
      for (std::size_t pos = k; pos-- > 0;) {
        if (++idx[pos] < carrier.size()) {
          done = false;
          break;
        }
        idx[pos] = 0;
      }
    }
  }
  cs.domain.assign(dom.begin(), dom.end());
  cs.relations.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (const auto& [head, tag] : raw[i]) {
      std::vector<int> tuple;
      tuple.reserve(head.size() + 1);
      for (const Value& v : head) tuple.push_back(cs.index_of(CElem::value(v)));
      tuple.push_back(cs.index_of(CElem::tag(tag)));
      cs.relations[i].push_back(std::move(tuple));
    }
    std::sort(cs.relations[i].begin(), cs.relations[i].end());
  }
  return cs;
}

EqFreeFormula EqFreeFormula::atom(int rel, std::vector<int> args) {
  EqFreeFormula f;
  f.kind = Kind::Atom;
  f.rel = rel;
  f.args = std::move(args);
  return f;
}

EqFreeFormula EqFreeFormula::neg(EqFreeFormula f) {
  EqFreeFormula out;
  out.kind = Kind::Not;
  out.children.push_back(std::move(f));
  return out;
}

EqFreeFormula EqFreeFormula::conj(std::vector<EqFreeFormula> fs) {
  EqFreeFormula out;
  out.kind = Kind::And;
  out.children = std::move(fs);
  return out;
}

EqFreeFormula EqFreeFormula::disj(std::vector<EqFreeFormula> fs) {
  EqFreeFormula out;
  out.kind = Kind::Or;
  out.children = std::move(fs);
  return out;
}

EqFreeFormula EqFreeFormula::exists(int var, EqFreeFormula body) {
  EqFreeFormula out;
  out.kind = Kind::Exists;
  out.var = var;
  out.children.push_back(std::move(body));
  return out;
}

EqFreeFormula EqFreeFormula::forall(int var, EqFreeFormula body) {
  EqFreeFormula out;
  out.kind = Kind::Forall;
  out.var = var;
  out.children.push_back(std::move(body));
  return out;
}

std::size_t EqFreeFormula::node_count() const {
  std::size_t n = 1;
  for (const EqFreeFormula& c : children) n += c.node_count();
  return n;
}

std::string EqFreeFormula::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Atom: {
      os << "R" << rel << "(";
      for (std::size_t i = 0; i < args.size(); ++i) os << (i ? "," : "") << "v" << args[i];
      os << ")";
      break;
    }
    case Kind::Not:
      os << "!" << children[0].to_string();
      break;
    case Kind::And:
    case Kind::Or: {
      if (children.empty()) {
        os << (kind == Kind::And ? "true" : "false");
        break;
      }
      os << "(";
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) os << (kind == Kind::And ? " & " : " | ");
        os << children[i].to_string();
      }
      os << ")";
      break;
    }
    case Kind::Exists:
    case Kind::Forall:
      os << (kind == Kind::Exists ? "E" : "A") << "v" << var << "." << children[0].to_string();
      break;
  }
  return os.str();
}

namespace {

void validate_rec(const EqFreeFormula& f, const CriticalStructure& a, std::set<int>& bound) {
  switch (f.kind) {
    case EqFreeFormula::Kind::Atom: {
      if (f.rel < 0 || f.rel >= static_cast<int>(a.arities.size())) {
        throw RuleError("formula uses an unknown relation index " + std::to_string(f.rel));
      }
      if (static_cast<int>(f.args.size()) != a.arities[f.rel]) {
        throw RuleError("relation R" + std::to_string(f.rel) + " expects " +
                        std::to_string(a.arities[f.rel]) + " arguments, got " +
                        std::to_string(f.args.size()));
      }
      for (int v : f.args) {
        if (v < 0) throw RuleError("negative variable id in formula");
      }
      return;
    }
    case EqFreeFormula::Kind::Not:
    case EqFreeFormula::Kind::And:
    case EqFreeFormula::Kind::Or:
      for (const EqFreeFormula& c : f.children) validate_rec(c, a, bound);
      if (f.kind == EqFreeFormula::Kind::Not && f.children.size() != 1) {
        throw RuleError("negation requires exactly one operand");
      }
      return;
    case EqFreeFormula::Kind::Exists:
    case EqFreeFormula::Kind::Forall: {
      if (f.children.size() != 1) throw RuleError("quantifier requires exactly one operand");
      if (f.var < 0) throw RuleError("negative variable id in quantifier");
      bool fresh = bound.insert(f.var).second;
      validate_rec(f.children[0], a, bound);
      if (fresh) bound.erase(f.var);
      return;
    }
  }
  throw RuleError("unreachable formula kind");
}

}  // namespace

void eqfree_validate(const EqFreeFormula& f, const CriticalStructure& a) {
  std::set<int> bound;
  validate_rec(f, a, bound);
}

bool eqfree_holds(const EqFreeFormula& f, const CriticalStructure& a, std::map<int, int>& env) {
  switch (f.kind) {
    case EqFreeFormula::Kind::Atom: {
      std::vector<int> tuple;
      tuple.reserve(f.args.size());
      for (int v : f.args) {
        auto it = env.find(v);
        if (it == env.end()) throw RuleError("unbound formula variable v" + std::to_string(v));
        tuple.push_back(it->second);
      }
      return a.has_tuple(f.rel, tuple);
    }
    case EqFreeFormula::Kind::Not:
      return !eqfree_holds(f.children[0], a, env);
    case EqFreeFormula::Kind::And:
      for (const EqFreeFormula& c : f.children) {
        if (!eqfree_holds(c, a, env)) return false;
      }
      return true;
    case EqFreeFormula::Kind::Or:
      for (const EqFreeFormula& c : f.children) {
        if (eqfree_holds(c, a, env)) return true;
      }
      return false;
    case EqFreeFormula::Kind::Exists:
    case EqFreeFormula::Kind::Forall: {
      auto it = env.find(f.var);
      bool had = it != env.end();
      int old = had ? it->second : -1;
      bool want = f.kind == EqFreeFormula::Kind::Exists;
      bool result = !want;
      for (int d = 0; d < static_cast<int>(a.size()); ++d) {
        env[f.var] = d;
        if (eqfree_holds(f.children[0], a, env) == want) {
          result = want;
          break;
        }
      }
      if (had) {
        env[f.var] = old;
      } else {
        env.erase(f.var);
      }
      return result;
    }
  }
  throw RuleError("unreachable formula kind");
}

bool eqfree_holds(const EqFreeFormula& f, const CriticalStructure& a,
                  const std::vector<int>& tuple) {
  std::map<int, int> env;
  for (std::size_t i = 0; i < tuple.size(); ++i) env[static_cast<int>(i)] = tuple[i];
  return eqfree_holds(f, a, env);
}

namespace {

// Plain finite relational structure used for the type computations; the
// critical structure converts to it, and its Leibniz quotient stays in it.
struct RelStruct {
  int n = 0;
  std::vector<int> arity;
  std::vector<std::set<std::vector<int>>> rels;

  bool has(int r, const std::vector<int>& t) const { return rels[r].count(t) > 0; }
};

RelStruct to_rel(const CriticalStructure& a) {
  RelStruct s;
  s.n = static_cast<int>(a.size());
  s.arity = a.arities;
  s.rels.resize(a.relations.size());
  for (std::size_t r = 0; r < a.relations.size(); ++r) {
    s.rels[r].insert(a.relations[r].begin(), a.relations[r].end());
  }
  return s;
}

// Elements indistinguishable by every one-hole membership context satisfy the
// same formulas, so they can be merged before any type computation.
bool leibniz_indist(const RelStruct& s, int x, int y) {
  if (x == y) return true;
  for (std::size_t r = 0; r < s.rels.size(); ++r) {
    for (const std::vector<int>& t : s.rels[r]) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == x) {
          std::vector<int> t2 = t;
          t2[i] = y;
          if (!s.has(static_cast<int>(r), t2)) return false;
        }
        if (t[i] == y) {
          std::vector<int> t2 = t;
          t2[i] = x;
          if (!s.has(static_cast<int>(r), t2)) return false;
        }
      }
    }
  }
  return true;
}

struct Quotient {
  RelStruct q;
  std::vector<int> cls;  // original index -> class index
};

Quotient leibniz_quotient(const RelStruct& s) {
  Quotient out;
  out.cls.assign(s.n, -1);
  std::vector<int> reps;
  for (int e = 0; e < s.n; ++e) {
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if (leibniz_indist(s, e, reps[c])) {
        out.cls[e] = static_cast<int>(c);
        break;
      }
    }
    if (out.cls[e] < 0) {
      out.cls[e] = static_cast<int>(reps.size());
      reps.push_back(e);
    }
  }
  out.q.n = static_cast<int>(reps.size());
  out.q.arity = s.arity;
  out.q.rels.resize(s.rels.size());
  for (std::size_t r = 0; r < s.rels.size(); ++r) {
    for (const std::vector<int>& t : s.rels[r]) {
      std::vector<int> t2;
      t2.reserve(t.size());
      for (int e : t) t2.push_back(out.cls[e]);
      out.q.rels[r].insert(std::move(t2));
    }
  }
  return out;
}

bool corr_valid(const RelStruct& s, const PartialCorrespondence& p, std::size_t* work) {
  for (std::size_t r = 0; r < s.rels.size(); ++r) {
    int k = s.arity[r];
    if (p.empty()) continue;
    std::vector<std::size_t> idx(k, 0);
    std::vector<int> left(k), right(k);
    bool done = false;
    while (!done) {
      for (int i = 0; i < k; ++i) {
        left[i] = p[idx[i]].first;
        right[i] = p[idx[i]].second;
      }
      if (work != nullptr) ++*work;
      if (s.has(static_cast<int>(r), left) != s.has(static_cast<int>(r), right)) return false;
      done = true;
      for (int pos = k; pos-- > 0;) {
        if (++idx[pos] < p.size()) {
          done = false;
          break;
        }
        idx[pos] = 0;
      }
    }
  }
  return true;
}

// Validity of p extended by the pair at index np, assuming p minus that pair
// is valid: only selections using the new pair are checked.
bool corr_valid_incr(const RelStruct& s, const PartialCorrespondence& p, std::size_t np,
                     std::size_t* work) {
  for (std::size_t r = 0; r < s.rels.size(); ++r) {
    int k = s.arity[r];
    std::vector<std::size_t> idx(k, 0);
    std::vector<int> left(k), right(k);
    bool done = false;
    while (!done) {
      bool uses = false;
      for (int i = 0; i < k; ++i) {
        if (idx[i] == np) {
          uses = true;
          break;
        }
      }
      if (uses) {
        for (int i = 0; i < k; ++i) {
          left[i] = p[idx[i]].first;
          right[i] = p[idx[i]].second;
        }
        if (work != nullptr) ++*work;
        if (s.has(static_cast<int>(r), left) != s.has(static_cast<int>(r), right)) return false;
      }
      done = true;
      for (int pos = k; pos-- > 0;) {
        if (++idx[pos] < p.size()) {
          done = false;
          break;
        }
        idx[pos] = 0;
      }
    }
  }
  return true;
}

PartialCorrespondence canon_corr(PartialCorrespondence p) {
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

// Back-and-forth refinement of valid correspondences, queried through two
// equivalent views. Full type equality holds exactly when the seed extends to
// a valid correspondence that is total and surjective: any such extension
// supports the back-and-forth forever, and conversely a surviving seed can be
// grown one pair at a time until both sides are covered. Finite levels are
// decided by the depth-bounded game directly.
struct TypeCtx {
  RelStruct q;
  std::vector<int> cls;

  std::vector<char> pair1;                            // singleton validity
  std::vector<char> pair2;                            // two-pair compatibility
  std::vector<char> core;                             // survives support pruning
  std::map<PartialCorrespondence, char> total_memo;   // extendable to bitotal?
  std::vector<PartialCorrespondence> totals;          // found bitotal witnesses
  std::map<std::pair<PartialCorrespondence, int>, char> lvl_memo;
  std::size_t work = 0;

  void spend(std::size_t c) {
    work += c;
    if (work > kWorkBudget) {
      throw ScaleError("type refinement exceeded the desk-scale work budget");
    }
  }

  int pid(int a, int b) const { return a * q.n + b; }

  void init_filters() {
    int n = q.n;
    pair1.assign(static_cast<std::size_t>(n) * n, 0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        PartialCorrespondence p{{a, b}};
        pair1[pid(a, b)] = corr_valid(q, p, &work) ? 1 : 0;
      }
    }
    spend(static_cast<std::size_t>(n) * n);
    std::size_t nn = static_cast<std::size_t>(n) * n;
    pair2.assign(nn * nn, 0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (!pair1[pid(a, b)]) continue;
        for (int c = 0; c < n; ++c) {
          for (int d = 0; d < n; ++d) {
            if (!pair1[pid(c, d)]) continue;
            PartialCorrespondence p = canon_corr({{a, b}, {c, d}});
            pair2[pid(a, b) * nn + pid(c, d)] = corr_valid(q, p, &work) ? 1 : 0;
          }
        }
      }
    }

    // Support pruning: a pair inside a total valid correspondence has, for
    // every element on either side, a surviving pairwise-compatible partner
    // covering it, so iterating removal to a fixpoint keeps every pair that
    // can take part in one. The totals search then only branches over these.
    core = pair1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          if (!core[pid(a, b)]) continue;
          bool supported = true;
          for (int side = 0; side < 2 && supported; ++side) {
            for (int e = 0; e < n && supported; ++e) {
              bool found = false;
              for (int d = 0; d < n && !found; ++d) {
                int c1 = side == 0 ? e : d;
                int c2 = side == 0 ? d : e;
                found = core[pid(c1, c2)] != 0 && pair2[pid(a, b) * nn + pid(c1, c2)] != 0;
              }
              supported = found;
              spend(1);
            }
          }
          if (!supported) {
            core[pid(a, b)] = 0;
            changed = true;
          }
        }
      }
    }
  }

  bool pairs_compatible(const PartialCorrespondence& p, int a, int b) const {
    if (!pair1[pid(a, b)]) return false;
    std::size_t nn = static_cast<std::size_t>(q.n) * q.n;
    for (const auto& [c, d] : p) {
      if (!pair2[pid(a, b) * nn + pid(c, d)]) return false;
    }
    return true;
  }

  // Compatibility against the pruned pair set; only sound for questions about
  // total correspondences, the depth-bounded game must use the raw filters.
  bool core_compatible(const PartialCorrespondence& p, int a, int b) const {
    return core[pid(a, b)] != 0 && pairs_compatible(p, a, b);
  }

  bool covered(const PartialCorrespondence& p, int elem, bool left) const {
    for (const auto& [a, b] : p) {
      if ((left ? a : b) == elem) return true;
    }
    return false;
  }

  bool extend_total(const PartialCorrespondence& p) {
    auto it = total_memo.find(p);
    if (it != total_memo.end()) return it->second != 0;
    spend(p.size() + 1);
    // Fail-first: cover the element with the fewest candidate partners next.
    int need = -1;
    bool left = true;
    int best = q.n + 1;
    for (int side = 0; side < 2; ++side) {
      for (int e = 0; e < q.n; ++e) {
        if (covered(p, e, side == 0)) continue;
        int cnt = 0;
        for (int partner = 0; partner < q.n && cnt < best; ++partner) {
          int a = side == 0 ? e : partner;
          int b = side == 0 ? partner : e;
          if (core_compatible(p, a, b)) ++cnt;
        }
        spend(static_cast<std::size_t>(q.n));
        if (cnt < best) {
          best = cnt;
          need = e;
          left = side == 0;
          if (best == 0) {
            total_memo[p] = 0;
            return false;
          }
        }
      }
    }
    if (need < 0) {
      total_memo[p] = 1;
      totals.push_back(p);
      return true;
    }
    for (int partner = 0; partner < q.n; ++partner) {
      int a = left ? need : partner;
      int b = left ? partner : need;
      if (!core_compatible(p, a, b)) continue;
      PartialCorrespondence p2 = p;
      p2.insert(std::lower_bound(p2.begin(), p2.end(), std::make_pair(a, b)),
                std::make_pair(a, b));
      std::size_t np = static_cast<std::size_t>(
          std::lower_bound(p2.begin(), p2.end(), std::make_pair(a, b)) - p2.begin());
      if (!corr_valid_incr(q, p2, np, &work)) continue;
      spend(1);
      if (extend_total(p2)) {
        total_memo[p] = 1;
        return true;
      }
    }
    total_memo[p] = 0;
    return false;
  }

  bool seed_from(const std::vector<int>& t1, const std::vector<int>& t2,
                 PartialCorrespondence& out) const {
    if (t1.size() != t2.size()) return false;
    PartialCorrespondence p;
    p.reserve(t1.size());
    for (std::size_t i = 0; i < t1.size(); ++i) p.emplace_back(t1[i], t2[i]);
    out = canon_corr(std::move(p));
    return true;
  }

  bool equal_inf(const PartialCorrespondence& seed) {
    for (const PartialCorrespondence& t : totals) {
      if (std::includes(t.begin(), t.end(), seed.begin(), seed.end())) return true;
    }
    for (const auto& [a, b] : seed) {
      if (!core[pid(a, b)]) return false;
      spend(1);
    }
    if (!corr_valid(q, seed, &work)) return false;
    return extend_total(seed);
  }

  bool equal_tuples(const std::vector<int>& qt1, const std::vector<int>& qt2) {
    PartialCorrespondence seed;
    if (!seed_from(qt1, qt2, seed)) return false;
    return equal_inf(seed);
  }

  // Membership of the correspondence in the level-m refinement stage; the
  // seed must be valid.
  bool in_level(const PartialCorrespondence& p, int m) {
    if (m <= 0) return true;
    auto key = std::make_pair(p, m);
    auto it = lvl_memo.find(key);
    if (it != lvl_memo.end()) return it->second != 0;
    auto tm = total_memo.find(p);
    if (tm != total_memo.end() && tm->second != 0) {
      lvl_memo[key] = 1;
      return true;
    }
    spend(p.size() + 1);
    for (int side = 0; side < 2; ++side) {
      for (int e = 0; e < q.n; ++e) {
        bool ok = false;
        for (int partner = 0; partner < q.n && !ok; ++partner) {
          int a = side == 0 ? e : partner;
          int b = side == 0 ? partner : e;
          if (!pairs_compatible(p, a, b)) continue;
          auto pr = std::make_pair(a, b);
          if (std::binary_search(p.begin(), p.end(), pr)) {
            ok = in_level(p, m - 1);
            continue;
          }
          PartialCorrespondence p2 = p;
          p2.insert(std::lower_bound(p2.begin(), p2.end(), pr), pr);
          std::size_t np = static_cast<std::size_t>(
              std::lower_bound(p2.begin(), p2.end(), pr) - p2.begin());
          if (!corr_valid_incr(q, p2, np, &work)) continue;
          ok = in_level(p2, m - 1);
        }
        if (!ok) {
          lvl_memo[key] = 0;
          return false;
        }
      }
    }
    lvl_memo[key] = 1;
    return true;
  }

  std::vector<int> to_q(const std::vector<int>& t) const {
    std::vector<int> out;
    out.reserve(t.size());
    for (int e : t) {
      if (e < 0 || e >= static_cast<int>(cls.size())) {
        throw RuleError("tuple index out of the structure domain");
      }
      out.push_back(cls[e]);
    }
    return out;
  }
};

TypeCtx make_ctx(const CriticalStructure& a) {
  TypeCtx ctx;
  Quotient qu = leibniz_quotient(to_rel(a));
  ctx.q = std::move(qu.q);
  ctx.cls = std::move(qu.cls);
  ctx.init_filters();
  return ctx;
}

}  // namespace

bool correspondence_valid(const CriticalStructure& a, const PartialCorrespondence& p) {
  for (const auto& [x, y] : p) {
    if (x < 0 || y < 0 || x >= static_cast<int>(a.size()) || y >= static_cast<int>(a.size())) {
      throw RuleError("correspondence pair outside the domain");
    }
  }
  RelStruct s = to_rel(a);
  return corr_valid(s, canon_corr(p), nullptr);
}

struct TypeOracle::Impl {
  TypeCtx ctx;
};

TypeOracle::TypeOracle(const CriticalStructure& a) : impl_(new Impl{make_ctx(a)}) {}
TypeOracle::~TypeOracle() = default;
TypeOracle::TypeOracle(TypeOracle&&) noexcept = default;
TypeOracle& TypeOracle::operator=(TypeOracle&&) noexcept = default;

bool TypeOracle::equal(const std::vector<int>& t1, const std::vector<int>& t2) {
  if (t1.size() != t2.size()) return false;
  return impl_->ctx.equal_tuples(impl_->ctx.to_q(t1), impl_->ctx.to_q(t2));
}

int TypeOracle::level(const std::vector<int>& t1, const std::vector<int>& t2) {
  if (t1.size() != t2.size()) return -1;
  TypeCtx& ctx = impl_->ctx;
  PartialCorrespondence seed;
  ctx.seed_from(ctx.to_q(t1), ctx.to_q(t2), seed);
  if (!corr_valid(ctx.q, seed, &ctx.work)) return -1;
  if (ctx.equal_inf(seed)) return INT_MAX;
  for (int m = 1; m <= kMaxLevel; ++m) {
    if (!ctx.in_level(seed, m)) return m - 1;
  }
  throw ScaleError("refinement level exceeds the supported depth");
}

namespace {

void enumerate_tuples(int base, int len, const std::function<void(const std::vector<int>&)>& fn) {
  if (base == 0) return;
  std::vector<int> t(len, 0);
  bool done = false;
  while (!done) {
    fn(t);
    done = true;
    for (int pos = len; pos-- > 0;) {
      if (++t[pos] < base) {
        done = false;
        break;
      }
      t[pos] = 0;
    }
  }
}

double pow_size(std::size_t base, int len) {
  double out = 1;
  for (int i = 0; i < len; ++i) out *= static_cast<double>(base);
  return out;
}

// Refinement stages are nested, so the survivors of stage m are the only
// candidates for stage m + 1; iterating one shrinking set bounds the work by
// the deepest pair instead of summing full sweeps per pair. Returns the last
// stage some seed survives, 0 when every seed already fails stage 1.
int last_surviving_stage(TypeCtx& ctx, std::vector<PartialCorrespondence> surv) {
  for (int m = 1; m <= kMaxLevel; ++m) {
    std::vector<PartialCorrespondence> next;
    for (PartialCorrespondence& s : surv) {
      if (ctx.in_level(s, m)) next.push_back(std::move(s));
    }
    if (next.empty()) return m - 1;
    surv.swap(next);
  }
  throw ScaleError("refinement level exceeds the supported depth");
}

}  // namespace

int TypePartition::block_of(const std::vector<int>& tuple) const {
  auto it = std::lower_bound(tuples.begin(), tuples.end(), tuple);
  if (it == tuples.end() || *it != tuple) {
    throw RuleError("tuple is not part of the partition");
  }
  return block[static_cast<std::size_t>(it - tuples.begin())];
}

TypePartition fo_woeq_partition(const CriticalStructure& a, int tuple_len) {
  if (tuple_len < 1) throw RuleError("partition requires a positive tuple length");
  if (pow_size(a.size(), tuple_len) > static_cast<double>(kMaxPartitionTuples)) {
    throw ScaleError("tuple space too large for the type partition");
  }
  TypePartition out;
  out.tuple_len = tuple_len;
  TypeCtx ctx = make_ctx(a);

  // Distinct quotient images are classified once against representatives.
  std::map<std::vector<int>, int> qblock;
  std::vector<std::vector<int>> qreps;
  enumerate_tuples(static_cast<int>(a.size()), tuple_len, [&](const std::vector<int>& t) {
    out.tuples.push_back(t);
    std::vector<int> qt = ctx.to_q(t);
    auto it = qblock.find(qt);
    int blk;
    if (it != qblock.end()) {
      blk = it->second;
    } else {
      blk = -1;
      for (std::size_t c = 0; c < qreps.size(); ++c) {
        if (ctx.equal_tuples(qt, qreps[c])) {
          blk = static_cast<int>(c);
          break;
        }
      }
      if (blk < 0) {
        blk = static_cast<int>(qreps.size());
        qreps.push_back(qt);
      }
      qblock[qt] = blk;
    }
    out.block.push_back(blk);
  });
  out.blocks = static_cast<int>(qreps.size());

  // The refinement is stable one stage past the last one where some pair of
  // representatives from different blocks is still unseparated; pairs whose
  // seed is invalid are separated before any refinement starts.
  std::set<PartialCorrespondence> seeds;
  for (std::size_t i = 0; i < qreps.size(); ++i) {
    for (std::size_t j = i + 1; j < qreps.size(); ++j) {
      PartialCorrespondence seed;
      ctx.seed_from(qreps[i], qreps[j], seed);
      if (!corr_valid(ctx.q, seed, &ctx.work)) continue;
      seeds.insert(std::move(seed));
    }
  }
  out.stabilization_level =
      seeds.empty()
          ? 0
          : last_surviving_stage(
                ctx, std::vector<PartialCorrespondence>(seeds.begin(), seeds.end())) +
                1;
  return out;
}

namespace {

// Characteristic formula builder over the quotient structure. Conjunctions
// over extension elements are collapsed per type class: extensions of equal
// full type produce one shared conjunct, which keeps the formula equal up to
// idempotence of conjunction and disjunction.
struct PhiBuilder {
  TypeCtx& ctx;
  std::size_t nodes = 0;
  std::map<std::pair<int, std::vector<int>>, EqFreeFormula> memo;
  std::map<std::vector<int>, std::vector<int>> canon_memo;
  std::vector<std::vector<std::vector<int>>> reps_by_len;

  explicit PhiBuilder(TypeCtx& c) : ctx(c) {}

  const std::vector<int>& canon(const std::vector<int>& t) {
    auto it = canon_memo.find(t);
    if (it != canon_memo.end()) return it->second;
    std::size_t len = t.size();
    if (reps_by_len.size() <= len) reps_by_len.resize(len + 1);
    for (const std::vector<int>& rep : reps_by_len[len]) {
      if (ctx.equal_tuples(t, rep)) return canon_memo[t] = rep;
    }
    reps_by_len[len].push_back(t);
    return canon_memo[t] = t;
  }

  void charge(const EqFreeFormula& f) {
    nodes += f.node_count();
    if (nodes > kMaxFormulaNodes) {
      throw ScaleError("characteristic formula exceeds the node budget");
    }
  }

  EqFreeFormula build(const std::vector<int>& t, int m) {
    std::vector<int> key_tuple = canon(t);
    auto key = std::make_pair(m, key_tuple);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    EqFreeFormula out = m == 0 ? build_atoms(key_tuple) : build_step(key_tuple, m);
    charge(out);
    return memo.emplace(std::move(key), std::move(out)).first->second;
  }

  EqFreeFormula build_atoms(const std::vector<int>& t) {
    std::vector<EqFreeFormula> lits;
    int len = static_cast<int>(t.size());
    for (std::size_t r = 0; r < ctx.q.rels.size(); ++r) {
      int k = ctx.q.arity[r];
      enumerate_tuples(len, k, [&](const std::vector<int>& sigma) {
        std::vector<int> image(k);
        for (int i = 0; i < k; ++i) image[i] = t[sigma[i]];
        EqFreeFormula atom = EqFreeFormula::atom(static_cast<int>(r), sigma);
        if (ctx.q.has(static_cast<int>(r), image)) {
          lits.push_back(std::move(atom));
        } else {
          lits.push_back(EqFreeFormula::neg(std::move(atom)));
        }
        ctx.spend(1);
      });
    }
    return EqFreeFormula::conj(std::move(lits));
  }

  EqFreeFormula build_step(const std::vector<int>& t, int m) {
    int var = static_cast<int>(t.size());
    std::vector<std::vector<int>> classes;  // distinct extension classes, first-seen order
    std::set<std::vector<int>> seen;
    for (int c = 0; c < ctx.q.n; ++c) {
      std::vector<int> tc = t;
      tc.push_back(c);
      std::vector<int> rep = canon(tc);
      if (seen.insert(rep).second) classes.push_back(rep);
    }
    std::vector<EqFreeFormula> conjuncts;
    std::vector<EqFreeFormula> branches;
    for (const std::vector<int>& rep : classes) {
      EqFreeFormula sub = build(rep, m - 1);
      branches.push_back(sub);
      conjuncts.push_back(EqFreeFormula::exists(var, std::move(sub)));
    }
    conjuncts.push_back(EqFreeFormula::forall(var, EqFreeFormula::disj(std::move(branches))));
    return EqFreeFormula::conj(std::move(conjuncts));
  }
};

}  // namespace

EqFreeFormula isolating_formula(const CriticalStructure& a, const std::vector<int>& tuple) {
  if (tuple.empty()) throw RuleError("isolating formula requires a nonempty tuple");
  TypeCtx ctx = make_ctx(a);
  std::vector<int> qa = ctx.to_q(tuple);
  int len = static_cast<int>(tuple.size());
  if (pow_size(static_cast<std::size_t>(ctx.q.n), len) > static_cast<double>(kMaxIsoEnum)) {
    throw ScaleError("tuple space too large for the isolating formula");
  }

  // The depth m* at which the bounded refinement already carves out exactly
  // the full-type class of the tuple: tuples in the class stay at every
  // stage, tuples with an invalid seed are out from stage 1, so m* is the
  // last stage some valid seed pairing the tuple with an outsider survives.
  std::set<PartialCorrespondence> outsiders;
  enumerate_tuples(ctx.q.n, len, [&](const std::vector<int>& t) {
    PartialCorrespondence seed;
    ctx.seed_from(qa, t, seed);
    if (!corr_valid(ctx.q, seed, &ctx.work)) return;
    if (!ctx.equal_inf(seed)) outsiders.insert(std::move(seed));
  });
  int mstar = last_surviving_stage(
      ctx, std::vector<PartialCorrespondence>(outsiders.begin(), outsiders.end()));

  PhiBuilder builder(ctx);
  EqFreeFormula phi_m = builder.build(qa, mstar);
  EqFreeFormula phi_m1 = builder.build(qa, mstar + 1);
  EqFreeFormula stability =
      EqFreeFormula::disj({EqFreeFormula::neg(phi_m), std::move(phi_m1)});
  return EqFreeFormula::conj({std::move(phi_m), std::move(stability)});
}

namespace {

// Relations a variable's occurrences use at the tag position, ignoring
// occurrences captured by an inner quantifier over the same id.
void tag_rels_of(const EqFreeFormula& f, int var, std::set<int>& out) {
  switch (f.kind) {
    case EqFreeFormula::Kind::Atom:
      if (!f.args.empty() && f.args.back() == var) out.insert(f.rel);
      return;
    case EqFreeFormula::Kind::Not:
    case EqFreeFormula::Kind::And:
    case EqFreeFormula::Kind::Or:
      for (const EqFreeFormula& c : f.children) tag_rels_of(c, var, out);
      return;
    case EqFreeFormula::Kind::Exists:
    case EqFreeFormula::Kind::Forall:
      if (f.var == var) return;
      tag_rels_of(f.children[0], var, out);
      return;
  }
}

struct VarReal {
  bool is_tag = false;
  int rel = -1;
  std::vector<std::string> names;  // value use: one name; tag use: binder names
};

struct TermBuilder {
  const WitnessSet& w;
  std::vector<Term> comps;
  int fresh = 0;

  explicit TermBuilder(const WitnessSet& ws) : w(ws), comps(witness_comps(ws)) {}

  std::string fresh_name() { return "z" + std::to_string(fresh++); }

  static Term conj_all(const std::vector<Term>& ts) {
    if (ts.empty()) return Term::tru();
    Term out = ts[0];
    for (std::size_t i = 1; i < ts.size(); ++i) out = Term::conj(out, ts[i]);
    return out;
  }

  static Term disj_all(const std::vector<Term>& ts) {
    if (ts.empty()) return Term::fls();
    Term out = ts[0];
    for (std::size_t i = 1; i < ts.size(); ++i) out = Term::disj(out, ts[i]);
    return out;
  }

  static Term nonempty(const Term& comp) { return Term::neg(Term::eq(comp, Term::empty())); }
  static Term is_empty(const Term& comp) { return Term::eq(comp, Term::empty()); }

  Term translate(const EqFreeFormula& f, std::map<int, VarReal>& realz) {
    switch (f.kind) {
      case EqFreeFormula::Kind::Atom:
        return translate_atom(f, realz);
      case EqFreeFormula::Kind::Not:
        return Term::neg(translate(f.children[0], realz));
      case EqFreeFormula::Kind::And: {
        std::vector<Term> parts;
        parts.reserve(f.children.size());
        for (const EqFreeFormula& c : f.children) parts.push_back(translate(c, realz));
        return conj_all(parts);
      }
      case EqFreeFormula::Kind::Or: {
        std::vector<Term> parts;
        parts.reserve(f.children.size());
        for (const EqFreeFormula& c : f.children) parts.push_back(translate(c, realz));
        return disj_all(parts);
      }
      case EqFreeFormula::Kind::Exists:
        return translate_quant(f, realz, true);
      case EqFreeFormula::Kind::Forall:
        return translate_quant(f, realz, false);
    }
    throw RuleError("unreachable formula kind");
  }

  // An atom holds when the tag argument names an actual binding of its own
  // relation whose head values match the value arguments; tag existence is
  // asserted by the quantifier that introduced the binding variables.
  Term translate_atom(const EqFreeFormula& f, std::map<int, VarReal>& realz) {
    const WitnessTerm& wt = w[static_cast<std::size_t>(f.rel)];
    std::size_t nvals = wt.heads.size();
    auto tag_it = realz.find(f.args.back());
    if (tag_it == realz.end()) {
      throw RuleError("unbound formula variable v" + std::to_string(f.args.back()));
    }
    const VarReal& tag_real = tag_it->second;
    if (!tag_real.is_tag || tag_real.rel != f.rel) return Term::fls();
    std::map<std::string, Term> subst;
    for (std::size_t j = 0; j < wt.binders.size(); ++j) {
      subst.emplace(wt.binders[j], Term::var(tag_real.names[j]));
    }
    std::vector<Term> parts;
    for (std::size_t j = 0; j < nvals; ++j) {
      auto it = realz.find(f.args[j]);
      if (it == realz.end()) {
        throw RuleError("unbound formula variable v" + std::to_string(f.args[j]));
      }
      if (it->second.is_tag) return Term::fls();
      parts.push_back(Term::eq(substitute(wt.heads[j], subst), Term::var(it->second.names[0])));
    }
    return conj_all(parts);
  }

  Term translate_quant(const EqFreeFormula& f, std::map<int, VarReal>& realz, bool exists) {
    const EqFreeFormula& body = f.children[0];
    std::set<int> tag_rels;
    tag_rels_of(body, f.var, tag_rels);

    auto saved = realz.find(f.var);
    bool had = saved != realz.end();
    VarReal old = had ? saved->second : VarReal{};

    std::vector<Term> branches;
    {
      // Value branch: the variable ranges over the critical values.
      std::string z = fresh_name();
      realz[f.var] = VarReal{false, -1, {z}};
      Term sub = translate(body, realz);
      Term comp = Term::comp({Term::var(z)}, exists ? sub : Term::neg(sub), {z}, comps);
      branches.push_back(exists ? nonempty(comp) : is_empty(comp));
    }
    for (int r : tag_rels) {
      // Tag branch: the variable stands for a satisfied binding of one
      // witness term, quantified through that term's binder variables.
      const WitnessTerm& wt = w[static_cast<std::size_t>(r)];
      std::vector<std::string> names;
      names.reserve(wt.binders.size());
      for (std::size_t j = 0; j < wt.binders.size(); ++j) names.push_back(fresh_name());
      realz[f.var] = VarReal{true, r, names};
      Term sub = translate(body, realz);
      std::map<std::string, Term> subst;
      for (std::size_t j = 0; j < wt.binders.size(); ++j) {
        subst.emplace(wt.binders[j], Term::var(names[j]));
      }
      Term guard = substitute(wt.guard, subst);
      Term inner = Term::conj(guard, exists ? sub : Term::neg(sub));
      std::vector<Term> head;
      if (names.empty()) {
        head.push_back(Term::tru());
      } else {
        for (const std::string& n : names) head.push_back(Term::var(n));
      }
      Term comp = Term::comp(head, inner, names);
      branches.push_back(exists ? nonempty(comp) : is_empty(comp));
    }

    if (had) {
      realz[f.var] = old;
    } else {
      realz.erase(f.var);
    }
    return exists ? disj_all(branches) : conj_all(branches);
  }
};

}  // namespace

Term isolating_term(const EqFreeFormula& f, int free_count, const WitnessSet& w) {
  TermBuilder builder(w);
  std::map<int, VarReal> realz;
  for (int i = 0; i < free_count; ++i) {
    realz[i] = VarReal{false, -1, {"x" + std::to_string(i)}};
  }
  return builder.translate(f, realz);
}

namespace {

// Ordered enumeration of small candidate guards: for each relation, an
// existentially closed atom whose value positions carry free variables, then
// its negation, then pairwise conjunctions. The first candidate matching the
// wanted truth pattern on all critical value tuples wins, which keeps the
// synthesized guards readable whenever a short one exists.
bool search_guard(const CriticalStructure& cs, int freec,
                  const std::vector<std::vector<int>>& tuples, const std::vector<char>& want,
                  EqFreeFormula& out) {
  std::vector<EqFreeFormula> base;
  for (std::size_t r = 0; r < cs.arities.size(); ++r) {
    int vals = cs.arities[r] - 1;
    enumerate_tuples(freec, vals, [&](const std::vector<int>& sigma) {
      std::vector<int> args = sigma;
      args.push_back(freec);
      base.push_back(
          EqFreeFormula::exists(freec, EqFreeFormula::atom(static_cast<int>(r), args)));
    });
  }
  std::vector<EqFreeFormula> candidates;
  for (const EqFreeFormula& b : base) candidates.push_back(b);
  for (const EqFreeFormula& b : base) candidates.push_back(EqFreeFormula::neg(b));
  std::size_t single = candidates.size();
  for (std::size_t i = 0; i < single && candidates.size() < kMaxGuardCandidates; ++i) {
    for (std::size_t j = i + 1; j < single && candidates.size() < kMaxGuardCandidates; ++j) {
      candidates.push_back(EqFreeFormula::conj({candidates[i], candidates[j]}));
    }
  }
  for (const EqFreeFormula& cand : candidates) {
    bool all = true;
    for (std::size_t i = 0; i < tuples.size() && all; ++i) {
      if (eqfree_holds(cand, cs, tuples[i]) != (want[i] != 0)) all = false;
    }
    if (all) {
      out = cand;
      return true;
    }
  }
  return false;
}

}  // namespace

Rule synthesize_rule(const StepOracle& oracle, const State& s, const WitnessSet& w) {
  State after = oracle(s);
  UpdateSet delta = State::diff(after, s);
  if (!delta.imports().empty()) {
    throw CriticalityViolation("observed step extends the carrier; its updates are not critical");
  }
  if (delta.updates().empty()) return Rule::skip();

  CriticalStructure cs = critical_structure(s, w);
  std::vector<Term> comps = witness_comps(w);
  std::vector<Value> crit = critical_values(s, comps);

  std::vector<int> value_idx;
  for (std::size_t i = 0; i < cs.domain.size(); ++i) {
    if (!cs.domain[i].is_tag()) value_idx.push_back(static_cast<int>(i));
  }

  auto value_index = [&](const Value& v) {
    int idx = cs.index_of(CElem::value(v));
    if (idx < 0) {
      throw CriticalityViolation("update component is not a critical value: " + v.to_string());
    }
    return idx;
  };

  TypeOracle types(cs);
  std::vector<Rule> rules;
  std::map<int, std::vector<std::vector<int>>> tuple_cache;
  std::set<std::pair<std::string, std::vector<char>>> emitted;
  for (const Update& u : delta.updates()) {
    int r = static_cast<int>(u.loc.args.size());
    std::vector<int> target;
    target.push_back(value_index(u.value));
    for (const Value& arg : u.loc.args) target.push_back(value_index(arg));

    auto& tuples = tuple_cache[r + 1];
    if (tuples.empty()) {
      if (pow_size(value_idx.size(), r + 1) > static_cast<double>(kMaxValueTuples)) {
        throw ScaleError("critical value tuple space too large for synthesis");
      }
      enumerate_tuples(static_cast<int>(value_idx.size()), r + 1,
                       [&](const std::vector<int>& t) {
                         std::vector<int> mapped(t.size());
                         for (std::size_t i = 0; i < t.size(); ++i) mapped[i] = value_idx[t[i]];
                         tuples.push_back(std::move(mapped));
                       });
    }
    std::vector<char> want(tuples.size(), 0);
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      want[i] = types.equal(target, tuples[i]) ? 1 : 0;
    }
    // Updates to one function whose tuples share a type class yield the same
    // guarded rule; emit it once.
    if (!emitted.insert({u.loc.fn, want}).second) continue;

    EqFreeFormula guard = EqFreeFormula::conj({});
    if (!search_guard(cs, r + 1, tuples, want, guard)) {
      guard = isolating_formula(cs, target);
    }
    Term guard_term = isolating_term(guard, r + 1, w);

    std::vector<std::string> vars;
    for (int i = 0; i <= r; ++i) vars.push_back("x" + std::to_string(i));
    std::vector<Term> args;
    for (int i = 1; i <= r; ++i) args.push_back(Term::var("x" + std::to_string(i)));
    Rule body = Rule::assign(u.loc.fn, std::move(args), Term::var("x0"));
    rules.push_back(Rule::forall_critical(vars, comps, guard_term, body));
  }
  return Rule::par(std::move(rules));
}

Machine synthesize_machine(const StepOracle& oracle, const std::vector<State>& samples,
                           const WitnessSet& w, const std::string& name) {
  if (samples.empty()) throw CoverageGap("no sample states to synthesize from");
  // One branch per similarity class: a second sample of an already covered class
  // would satisfy the same guard, so its branch would fire alongside the first.
  std::vector<const State*> reps;
  std::vector<Rule> branches;
  for (const State& s : samples) {
    bool covered = false;
    for (const State* r : reps) {
      if (w_similar(*r, s, w)) { covered = true; break; }
    }
    if (covered) continue;
    reps.push_back(&s);
    Term guard = similarity_formula(s, w);
    branches.push_back(Rule::cond(guard, synthesize_rule(oracle, s, w)));
  }
  return make_machine(name, samples[0].vocab_ptr(), samples[0].base(),
                      Rule::par(std::move(branches)));
}

std::string SynthCheck::summary() const {
  std::ostringstream os;
  os << states << " states, " << gaps.size() << " coverage gaps, " << mismatches.size()
     << " mismatches";
  return os.str();
}

SynthCheck verify_synthesized(const Machine& m, const StepOracle& oracle,
                              const std::vector<State>& states, const WitnessSet& w,
                              const std::vector<State>& samples) {
  SynthCheck out;
  out.states = static_cast<int>(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State& s = states[i];
    bool covered = false;
    for (const State& sample : samples) {
      if (w_similar(s, sample, w)) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      out.gaps.push_back("state " + std::to_string(i) + " matches no sampled similarity class");
      continue;
    }
    UpdateSet expected = State::diff(oracle(s), s);
    UpdateSet got = machine_update_set(m, s).normalized_against(s);
    if (!(got == expected)) {
      out.mismatches.push_back("state " + std::to_string(i) + ": expected " +
                               expected.to_string() + ", got " + got.to_string());
    }
  }
  return out;
}

TransferReport check_type_update_transfer(const StepOracle& oracle, const State& s,
                                          const WitnessSet& w) {
  TransferReport out;
  State after = oracle(s);
  UpdateSet delta = State::diff(after, s);
  out.updates = static_cast<int>(delta.updates().size());
  if (!delta.imports().empty()) {
    out.violations.push_back("step extends the carrier, which no critical tuple accounts for");
  }
  if (delta.updates().empty()) return out;

  CriticalStructure cs = critical_structure(s, w);
  std::vector<int> value_idx;
  for (std::size_t i = 0; i < cs.domain.size(); ++i) {
    if (!cs.domain[i].is_tag()) value_idx.push_back(static_cast<int>(i));
  }
  TypeOracle types(cs);

  std::set<Update> updates(delta.updates().begin(), delta.updates().end());
  for (const Update& u : delta.updates()) {
    std::vector<int> target;
    bool critical = true;
    std::vector<Value> comps_vals;
    comps_vals.push_back(u.value);
    for (const Value& arg : u.loc.args) comps_vals.push_back(arg);
    for (const Value& v : comps_vals) {
      int idx = cs.index_of(CElem::value(v));
      if (idx < 0) {
        out.violations.push_back("update " + u.to_string() +
                                 " uses the non-critical value " + v.to_string());
        critical = false;
        break;
      }
      target.push_back(idx);
    }
    if (!critical) continue;

    int len = static_cast<int>(target.size());
    if (pow_size(value_idx.size(), len) > static_cast<double>(kMaxValueTuples)) {
      throw ScaleError("critical value tuple space too large for the transfer check");
    }
    enumerate_tuples(static_cast<int>(value_idx.size()), len, [&](const std::vector<int>& t) {
      std::vector<int> mapped(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) mapped[i] = value_idx[t[i]];
      if (!types.equal(target, mapped)) return;
      ++out.checked_tuples;
      std::vector<Value> vals(mapped.size());
      for (std::size_t i = 0; i < mapped.size(); ++i) {
        vals[i] = cs.domain[static_cast<std::size_t>(mapped[i])].val();
      }
      Update expected;
      expected.loc.fn = u.loc.fn;
      expected.loc.args.assign(vals.begin() + 1, vals.end());
      expected.value = vals[0];
      if (updates.count(expected) > 0) return;
      if (s.lookup(expected.loc.fn, expected.loc.args) == expected.value) return;
      out.violations.push_back("update " + u.to_string() +
                               " has the same type as the missing update " +
                               expected.to_string());
    });
  }
  return out;
}

}  // namespace pasm
