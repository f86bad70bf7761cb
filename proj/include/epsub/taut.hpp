#pragma once

// Propositional abstraction of quantifier-free formulas and an exact
// tautology decision with countermodels. Atoms are keyed by their canonical
// (alpha-normal) print string, so alpha-equivalent atoms share a variable.

#include "epsub/ast.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace epsub {

using AtomKey = std::string;
using Assignment = std::map<AtomKey, bool>;

struct Prop;
using PropPtr = std::shared_ptr<const Prop>;

struct Prop {
  enum class Kind { Var, Not, And, Or, Implies };
  Kind kind;
  int var = -1; // Kind::Var: index into the atom table
  PropPtr lhs, rhs;
};

struct Abstraction {
  PropPtr skeleton;
  std::vector<std::pair<AtomKey, FormulaPtr>> atoms; // key -> representative atom
};

struct TautError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws TautError if the formula contains quantifiers.
Abstraction abstract(const FormulaPtr& f);

struct TautResult {
  bool tautology = false;
  Assignment countermodel; // total on the formula's atoms when not a tautology
};

// Exact decision: truth-table enumeration when the atom count is at most
// `table_threshold`, otherwise a complete backtracking search for a
// falsifying assignment.
TautResult is_tautology(const FormulaPtr& f, unsigned table_threshold = 20);

// Independent evaluator used to audit countermodels. The assignment must be
// total on the formula's atoms.
bool evaluate(const FormulaPtr& f, const Assignment& a);

} // namespace epsub
