#ifndef PASM_RULE_HPP
#define PASM_RULE_HPP

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pasm/state.hpp"
#include "pasm/term.hpp"

namespace pasm {

// Immutable rule AST for synchronous parallel machines. ForallCritical ranges
// its variables over the component values of closed comprehension terms
// instead of the carrier; synthesized rules use it to reach non-atom values.
class Rule {
 public:
  enum class Kind { Assign, Par, If, Forall, Import, ForallCritical };

  static Rule assign(const std::string& fn, std::vector<Term> args, const Term& rhs);
  static Rule par(std::vector<Rule> rules);
  static Rule cond(const Term& guard, const Rule& body);
  static Rule forall(std::vector<std::string> vars, const Term& guard, const Rule& body);
  static Rule forall_critical(std::vector<std::string> vars, std::vector<Term> domain_terms,
                              const Term& guard, const Rule& body);
  static Rule import_rule(const std::string& var, const Rule& body);
  static Rule import_rule_at(const std::string& var, const Rule& body, int site);
  static Rule skip() { return par({}); }

  Kind kind() const;
  bool is_assign() const { return kind() == Kind::Assign; }
  bool is_par() const { return kind() == Kind::Par; }

  const std::string& assign_fn() const;
  const std::vector<Term>& assign_args() const;
  const Term& assign_rhs() const;
  const std::vector<Rule>& par_rules() const;
  const Term& guard() const;             // If, Forall, ForallCritical
  const Rule& body() const;              // If, Forall, Import, ForallCritical
  const std::vector<std::string>& vars() const;  // Forall, ForallCritical
  const std::string& import_var() const;
  int import_site() const;
  const std::vector<Term>& domain_terms() const;  // ForallCritical

  bool operator==(const Rule& o) const;
  bool operator!=(const Rule& o) const { return !(*this == o); }

  std::string to_string(int indent = 0) const;

 private:
  struct Rep;
  explicit Rule(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

std::set<std::string> rule_free_vars(const Rule& r);

// Rewrites the rule with import sites numbered in preorder starting at next.
Rule number_import_sites(const Rule& r, int& next);

std::vector<std::string> rule_well_formed(const Rule& r, const Vocabulary& vocab);

struct ImportRecord {
  Value atom;
  int site = 0;
  Value context;
};

// Computes the update set of a closed rule. Import allocates a fresh atom
// deterministically from (site, context of outer bindings), records it with a
// reserve retraction, and evaluates its body against the extended carrier.
UpdateSet update_set(const Rule& r, const State& s,
                     std::vector<ImportRecord>* provenance = nullptr);

}  // namespace pasm

#endif
