#ifndef PASM_TERM_HPP
#define PASM_TERM_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pasm/state.hpp"
#include "pasm/value.hpp"

namespace pasm {

// Immutable term AST. Comprehension terms carry their binders explicitly, an
// encoded head (right-nested pairs for several components) with its component
// count, and optionally a list of closed comprehension terms whose element
// components replace the carrier as the enumeration domain.
class Term {
 public:
  enum class Kind { Var, Lit, App, Comp };

  static Term var(const std::string& name);
  static Term lit(const Value& v);
  static Term app(const std::string& fn, std::vector<Term> args = {});
  static Term comp(const std::vector<Term>& head_components, const Term& guard,
                   std::vector<std::string> binders, std::vector<Term> domain_terms = {});
  static Term comp_encoded(const Term& head, int head_arity, const Term& guard,
                           std::vector<std::string> binders, std::vector<Term> domain_terms = {});

  // Connective and constant helpers.
  static Term tru() { return app("true"); }
  static Term fls() { return app("false"); }
  static Term undef() { return app("undef"); }
  static Term empty() { return app("emptyset"); }
  static Term eq(const Term& a, const Term& b) { return app("eq", {a, b}); }
  static Term neg(const Term& a) { return app("not", {a}); }
  static Term conj(const Term& a, const Term& b) { return app("and", {a, b}); }
  static Term disj(const Term& a, const Term& b) { return app("or", {a, b}); }
  static Term impl(const Term& a, const Term& b) { return app("implies", {a, b}); }
  static Term tuple_term(const std::vector<Term>& components);

  Kind kind() const;
  bool is_var() const { return kind() == Kind::Var; }
  bool is_lit() const { return kind() == Kind::Lit; }
  bool is_app() const { return kind() == Kind::App; }
  bool is_comp() const { return kind() == Kind::Comp; }

  const std::string& var_name() const;
  const Value& lit_value() const;
  const std::string& app_fn() const;
  const std::vector<Term>& app_args() const;
  const Term& comp_head() const;
  int comp_head_arity() const;
  const Term& comp_guard() const;
  const std::vector<std::string>& comp_binders() const;
  const std::vector<Term>& comp_domain_terms() const;
  // Splits the encoded head back into its components.
  std::vector<Term> comp_head_components() const;

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }

  std::string to_string() const;

 private:
  struct Rep;
  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

// Variable bindings during evaluation; inner bindings shadow outer ones.
class Env {
 public:
  void push(const std::string& name, const Value& v) { stack_.emplace_back(name, v); }
  void pop() { stack_.pop_back(); }
  const Value* find(const std::string& name) const;
  bool empty() const { return stack_.empty(); }

 private:
  std::vector<std::pair<std::string, Value>> stack_;
};

Value eval(const Term& t, const State& s, Env& env);
Value eval_closed(const Term& t, const State& s);
bool holds(const Term& t, const State& s, Env& env);

// Sorted distinct component values of the given closed comprehension terms.
std::vector<Value> critical_values(const State& s, const std::vector<Term>& comp_terms);

std::set<std::string> free_vars(const Term& t);

// Capture-avoiding substitution; comprehension binders are renamed when they
// would capture a free variable of a replacement.
Term substitute(const Term& t, const std::map<std::string, Term>& subst);

// Reports violations of the primary/secondary separation: primary functions
// applied to non-point arguments, and uses of unknown symbols. Secondary and
// bridge arguments are unconstrained here because the secondary universe
// contains the carrier; value-level discipline is enforced at assignment.
std::vector<std::string> check_stratification(const Term& t, const Vocabulary& vocab);

// exists x1..xk (phi)  ~>  not({{ (x1,..,xk) | phi }} = {{}})
// forall x1..xk (phi)  ~>  {{ (x1,..,xk) | not(phi) }} = {{}}
Term desugar_exists(const std::vector<std::string>& vars, const Term& phi);
Term desugar_forall(const std::vector<std::string>& vars, const Term& phi);

}  // namespace pasm

#endif
