#pragma once

// Second-order syntax and the single principal step that is still available
// there: predicate variables, second-order epsilon terms eps X. F binding a
// predicate variable, and lambda witnesses lam x1 .. xn. G. Terms and
// predicate terms live in separate binder spaces (both nameless internally).
// Lambda abstractions occur only as application heads and witnesses, so beta
// reduction terminates.
//
// First-order trees embed losslessly via `embed`. Predicate quantifiers
// (PredExists) have no concrete syntax; they are builder-level, as the
// defining equation turns them into second-order epsilon terms anyway.

#include "epsub/ast.hpp"
#include "epsub/complexity.hpp"
#include "epsub/engine.hpp"
#include "epsub/parse.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace epsub::so {

class SOTerm;
class SOFormula;
class PredTerm;
using SOTermPtr = std::shared_ptr<const SOTerm>;
using SOFormulaPtr = std::shared_ptr<const SOFormula>;
using PredTermPtr = std::shared_ptr<const PredTerm>;

class SOTerm {
public:
  enum class Kind { Var, Bound, Fun, Eps };
  Kind kind;
  std::string name;
  unsigned index = 0;
  std::vector<SOTermPtr> args;
  SOFormulaPtr body;
  std::size_t hash = 0;
  bool is_eps() const { return kind == Kind::Eps; }
};

class PredTerm {
public:
  enum class Kind { Free, Bound, Eps, Lambda };
  Kind kind;
  std::string name;                // Free name; Eps binder hint
  unsigned index = 0;              // Bound: de Bruijn in the predicate space
  unsigned arity = 0;              // Free/Eps; Lambda arity = params.size()
  std::vector<std::string> params; // Lambda binder hints (individual space)
  SOFormulaPtr body;               // Eps, Lambda
  std::size_t hash = 0;
  bool is_eps() const { return kind == Kind::Eps; }
  bool is_lambda() const { return kind == Kind::Lambda; }
  unsigned get_arity() const { return kind == Kind::Lambda ? (unsigned)params.size() : arity; }
};

class SOFormula {
public:
  enum class Kind { Atom, PredApp, Not, And, Or, Implies, Exists, Forall, PredExists };
  Kind kind;
  std::string name;            // Atom symbol; binder hints
  unsigned arity = 0;          // PredExists: arity of the bound predicate variable
  std::vector<SOTermPtr> args; // Atom, PredApp
  PredTermPtr head;            // PredApp
  SOFormulaPtr lhs, rhs, body;
  std::size_t hash = 0;
};

struct SOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------- construction ----------

SOTermPtr var(const std::string& name);
SOTermPtr ibound(unsigned index);
SOTermPtr fun(const std::string& symbol, std::vector<SOTermPtr> args = {});
SOTermPtr eps(const std::string& name, const SOFormulaPtr& body); // closes the individual name
SOTermPtr eps_raw(const std::string& hint, const SOFormulaPtr& closed_body);

PredTermPtr pred_free(const std::string& name, unsigned arity);
PredTermPtr pred_bound(unsigned index);
// closes free predicate `name` (matched by name at application heads)
PredTermPtr so_eps(const std::string& name, unsigned arity, const SOFormulaPtr& body);
PredTermPtr so_eps_raw(const std::string& hint, unsigned arity, const SOFormulaPtr& closed_body);
// closes the named individual variables left to right (lam x y. G)
PredTermPtr lambda(const std::vector<std::string>& names, const SOFormulaPtr& body);
PredTermPtr lambda_raw(std::vector<std::string> hints, const SOFormulaPtr& closed_body);

SOFormulaPtr atom(const std::string& pred, std::vector<SOTermPtr> args = {});
SOFormulaPtr pred_app(const PredTermPtr& head, std::vector<SOTermPtr> args = {});
SOFormulaPtr neg(const SOFormulaPtr& f);
SOFormulaPtr conj(const SOFormulaPtr& a, const SOFormulaPtr& b);
SOFormulaPtr disj(const SOFormulaPtr& a, const SOFormulaPtr& b);
SOFormulaPtr implies(const SOFormulaPtr& a, const SOFormulaPtr& b);
SOFormulaPtr exists(const std::string& name, const SOFormulaPtr& body);
SOFormulaPtr forall(const std::string& name, const SOFormulaPtr& body);
SOFormulaPtr pred_exists(const std::string& name, unsigned arity, const SOFormulaPtr& body);

// ---------- equivalence, queries, printing ----------

bool alpha_eq(const SOTermPtr& a, const SOTermPtr& b);
bool alpha_eq(const SOFormulaPtr& a, const SOFormulaPtr& b);
bool alpha_eq(const PredTermPtr& a, const PredTermPtr& b);

bool self_contained(const SOTermPtr& t);
bool self_contained(const SOFormulaPtr& f);
bool self_contained(const PredTermPtr& p);

std::string to_string(const SOTermPtr& t);
std::string to_string(const SOFormulaPtr& f);
std::string to_string(const PredTermPtr& p);

// ---------- beta reduction ----------

// Full normal form; capture-avoiding by construction. Throws SOError on an
// application whose argument count differs from the head's arity.
SOFormulaPtr beta_reduce(const SOFormulaPtr& f);
SOTermPtr beta_reduce(const SOTermPtr& t);
PredTermPtr beta_reduce(const PredTermPtr& p);

// One contraction: instantiates the lambda body with the arguments, without
// normalizing the result.
SOFormulaPtr apply_lambda(const PredTermPtr& lam, const std::vector<SOTermPtr>& args);

// ---------- substitution ----------

// Replaces self-contained occurrences alpha-equivalent to an epsilon term
// (individual space). Simultaneous, not rescanned.
SOFormulaPtr subst_eps_term(const SOFormulaPtr& host, const SOTermPtr& target, const SOTermPtr& repl);
SOTermPtr subst_eps_term(const SOTermPtr& host, const SOTermPtr& target, const SOTermPtr& repl);

// Replaces head occurrences of a second-order epsilon term by a predicate
// term. The result is *not* beta-reduced.
SOFormulaPtr subst_pred_term(const SOFormulaPtr& host, const PredTermPtr& target, const PredTermPtr& repl);
SOTermPtr subst_pred_term(const SOTermPtr& host, const PredTermPtr& target, const PredTermPtr& repl);
PredTermPtr subst_pred_term(const PredTermPtr& host, const PredTermPtr& target, const PredTermPtr& repl);

// ---------- embedding ----------

SOTermPtr embed(const epsub::TermPtr& t);
SOFormulaPtr embed(const epsub::FormulaPtr& f);

// ---------- complexity ----------
// Same (rank, degree) recursion as first order, with second-order epsilon
// binders counted like epsilon binders.

unsigned so_rank(const SOTermPtr& e);
unsigned so_rank(const PredTermPtr& e);
unsigned so_degree(const SOTermPtr& e);
unsigned so_degree(const PredTermPtr& e);
Complexity so_complexity(const SOTermPtr& e);
Complexity so_complexity(const PredTermPtr& e);

// ---------- systems ----------

// Owner of a second-order critical formula: either a first-order style
// epsilon term with a term witness, or a second-order epsilon term with a
// predicate-term witness.
struct IndOwner {
  SOTermPtr epsilon;
  SOTermPtr witness;
};
struct PredOwner {
  PredTermPtr epsilon;
  PredTermPtr witness;
};

struct SOCriticalFormula {
  SOFormulaPtr formula; // beta-normal
  std::variant<IndOwner, PredOwner> owner;

  bool predicate_owner() const { return std::holds_alternative<PredOwner>(owner); }
};

struct SOSystem {
  std::vector<SOCriticalFormula> members;
  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
};

// Construction from a matrix; the formula is assembled and beta-normalized.
SOCriticalFormula make_critical_ind(const std::string& var_name, const SOFormulaPtr& body_with_free_var,
                                    const SOTermPtr& witness);
SOCriticalFormula make_critical_pred(const std::string& pred_name, unsigned arity,
                                     const SOFormulaPtr& body_with_free_pred,
                                     const PredTermPtr& witness);

// Re-assembles matrix[witness] -> matrix[eps] from the tracked owner and
// compares with the stored formula (both beta-normal).
bool validate(const SOCriticalFormula& cf);

using SOOwnerRef = std::variant<SOTermPtr, PredTermPtr>;

struct SOBranch {
  bool keep = false;
  std::string label; // "keep" or the printed witness
  SOSystem system;
  std::vector<SOFormulaPtr> destroyed;
};

// Same branch structure as the first-order step, with beta reduction applied
// after each substitution and every member revalidated by reassembly.
std::vector<SOBranch> so_principal_step(const SOSystem& system, const SOOwnerRef& e,
                                        Mode mode = Mode::Permissive);

SystemMeasure so_measure(const SOSystem& system);

struct BranchReport {
  std::string label;
  SystemMeasure measure;
  bool smaller = false; // strictly below the parent measure
};

struct ComplexityReport {
  SystemMeasure parent;
  std::vector<BranchReport> branches;
  bool any_not_smaller = false;
};

ComplexityReport complexity_report(const SOSystem& parent, const std::vector<SOBranch>& children);

// ---------- parsing ----------
// Grammar extensions over the first-order syntax: `EPS X. <formula>` binds a
// predicate variable (arity fixed by its applications), `X(t1,...,tn)`
// applies it, `lam x1 .. xn. <formula>` is a lambda witness, and
// `(EPS X. F)(t1,...,tn)` / `(lam x. F)(t)` apply parenthesized heads.

SOFormulaPtr parse_so_formula(const std::string& text, ParseContext* ctx = nullptr);
PredTermPtr parse_pred_term(const std::string& text, ParseContext* ctx = nullptr);
SOTermPtr parse_so_term(const std::string& text, ParseContext* ctx = nullptr);

} // namespace epsub::so
