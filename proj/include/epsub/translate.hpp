#pragma once

// Epsilon translation of quantified formulas, critical formula construction,
// and recognition that a quantifier-free formula has the shape
// F[t] -> F[eps x. F[x]].

#include "epsub/ast.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epsub {

// A matrix F[x]: the bound variable (as a printing hint) plus the body in
// closed form (references to the hole are Bound(0) at body depth).
struct Matrix {
  std::string var_hint;
  FormulaPtr body;

  // F[t]
  FormulaPtr apply(const TermPtr& t) const { return instantiate(body, t); }
  // eps x. F[x]
  TermPtr epsilon() const { return eps_raw(var_hint, body); }
};

// Builds a Matrix from a named free variable: matrix("x", P(var("x"), 0)).
Matrix matrix(const std::string& var_name, const FormulaPtr& body_with_free_var);

struct CriticalFormula {
  FormulaPtr formula;   // the full implication F[t] -> F[eps x. F]
  TermPtr epsilon_term; // the eps term it belongs to
  TermPtr witness;      // the antecedent instance t
  Matrix mat;           // F[x]
};

// One way a formula decomposes as a critical formula.
struct DecompositionEntry {
  TermPtr epsilon_term;
  TermPtr witness;
  Matrix mat;
};

// All decompositions, deterministic leftmost-outermost candidate order.
// Empty means "not a critical formula".
using Decomposition = std::vector<DecompositionEntry>;

struct TranslateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotCriticalError : TranslateError {
  std::size_t index;
  FormulaPtr formula;
  NotCriticalError(std::size_t i, FormulaPtr f, const std::string& why);
};

// Quantifier elimination, innermost first:
//   exists x. F  ->  F'[eps x. F' / x]
//   forall x. F  ->  F'[eps x. ~F' / x]
// where F' is the already translated body.
FormulaPtr epsilon_translate(const FormulaPtr& f);

// F[t] -> F[eps x. F]. Requires a quantifier-free matrix body. Degenerate
// matrices (hole variable unused) are allowed and yield identity implications.
CriticalFormula make_critical_formula(const Matrix& m, const TermPtr& witness);

// For each self-contained eps subterm e = eps x. B of the consequent, checks
// that replacing every occurrence of e in the consequent by the hole gives B,
// then matches the antecedent against B to extract a unique witness.
Decomposition recognize_critical(const FormulaPtr& f);

// A validated system of critical formulas. Insertion order, duplicates
// removed up to alpha-equivalence (first occurrence kept). Each member stores
// its primary (first-listed) decomposition; the full list is kept for
// diagnostics.
struct SystemE {
  struct Member {
    CriticalFormula cf;       // primary decomposition
    Decomposition all;        // every decomposition found
  };
  std::vector<Member> members;

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
};

// Validates every formula via recognize_critical; throws NotCriticalError
// (with the offending index) if some member has no decomposition.
SystemE build_system(const std::vector<FormulaPtr>& formulas);

// Appends a formula if not already present up to alpha-equivalence.
void push_dedup(SystemE& system, SystemE::Member member);

} // namespace epsub
