#pragma once

// First-order syntax trees with epsilon terms.
//
// Bound variables are nameless indices (innermost binder = 0); free variables
// are named. Binders keep the surface name as a printing hint only, so
// alpha-equivalence is plain structural equality and every node carries a
// precomputed structural hash.

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epsub {

class Term;
class Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

class Term {
public:
  enum class Kind { Var, Bound, Fun, Eps };

  Kind kind;
  std::string name;          // Var: variable name; Fun: symbol; Eps: binder hint
  unsigned index = 0;        // Bound: de Bruijn index
  std::vector<TermPtr> args; // Fun
  FormulaPtr body;           // Eps
  std::size_t hash = 0;      // structural, hint-insensitive

  bool is_eps() const { return kind == Kind::Eps; }
};

class Formula {
public:
  enum class Kind { Atom, Not, And, Or, Implies, Exists, Forall };

  Kind kind;
  std::string name;          // Atom: predicate symbol; Exists/Forall: binder hint
  std::vector<TermPtr> args; // Atom
  FormulaPtr lhs, rhs;       // connectives (Not uses lhs only)
  FormulaPtr body;           // quantifiers
  std::size_t hash = 0;
};

// ---------- construction ----------
// Binding constructors close over free occurrences of the named variable.

TermPtr var(const std::string& name);
TermPtr bound(unsigned index);
TermPtr fun(const std::string& symbol, std::vector<TermPtr> args = {});
TermPtr eps(const std::string& name, const FormulaPtr& body);
TermPtr eps_raw(const std::string& hint, const FormulaPtr& already_closed_body);

FormulaPtr atom(const std::string& pred, std::vector<TermPtr> args = {});
FormulaPtr neg(const FormulaPtr& f);
FormulaPtr conj(const FormulaPtr& a, const FormulaPtr& b);
FormulaPtr disj(const FormulaPtr& a, const FormulaPtr& b);
FormulaPtr implies(const FormulaPtr& a, const FormulaPtr& b);
FormulaPtr exists(const std::string& name, const FormulaPtr& body);
FormulaPtr forall(const std::string& name, const FormulaPtr& body);
FormulaPtr exists_raw(const std::string& hint, const FormulaPtr& already_closed_body);
FormulaPtr forall_raw(const std::string& hint, const FormulaPtr& already_closed_body);

// ---------- alpha equivalence ----------

bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool alpha_eq(const FormulaPtr& a, const FormulaPtr& b);

// ---------- queries ----------

std::set<std::string> free_vars(const TermPtr& t);
std::set<std::string> free_vars(const FormulaPtr& f);

bool quantifier_free(const FormulaPtr& f);

// True when the subtree references binders above its own root, i.e. it is not
// a self-contained term/formula.
bool has_dangling_refs(const TermPtr& t);
bool has_dangling_refs(const FormulaPtr& f);

// True when the subtree contains a reference to the binder `level` steps above
// its root (level 0 = the binder immediately enclosing the root).
bool references_level(const TermPtr& t, unsigned level);
bool references_level(const FormulaPtr& f, unsigned level);

// ---------- positions ----------
// Child indices from the root: Atom/Fun argument i is child i; Not and
// quantifier/epsilon bodies are child 0; binary connectives have children 0,1.

using Position = std::vector<unsigned>;

struct EpsOccurrence {
  TermPtr term;       // the occurrence subtree (may reference enclosing binders)
  Position pos;
  unsigned depth;     // binders (of any kind) between the root and this occurrence
  unsigned eps_depth; // enclosing epsilon terms only; 0 = maximal occurrence
};

// All epsilon subterm occurrences, leftmost-outermost, descending into bodies.
std::vector<EpsOccurrence> epsilon_subterms(const TermPtr& t);
std::vector<EpsOccurrence> epsilon_subterms(const FormulaPtr& f);

TermPtr term_at(const FormulaPtr& root, const Position& pos);
TermPtr term_at(const TermPtr& root, const Position& pos);

// ---------- substitution ----------

// Replaces every occurrence of a subterm alpha-equivalent to `target` by
// `replacement`, in one simultaneous pass (the replacement is not rescanned).
// `target` must be an epsilon term without dangling references.
TermPtr substitute(const TermPtr& host, const TermPtr& target, const TermPtr& replacement);
FormulaPtr substitute(const FormulaPtr& host, const TermPtr& target, const TermPtr& replacement);

// Generic subtree replacement (any self-contained target term).
TermPtr replace_subterm(const TermPtr& host, const TermPtr& target, const TermPtr& replacement);
FormulaPtr replace_subterm(const FormulaPtr& host, const TermPtr& target, const TermPtr& replacement);

// Replaces free occurrences of the named variable.
TermPtr subst_free_var(const TermPtr& host, const std::string& name, const TermPtr& replacement);
FormulaPtr subst_free_var(const FormulaPtr& host, const std::string& name, const TermPtr& replacement);

// Fills the hole of a binder body: references to the removed binder become
// `replacement`, deeper references shift down by one.
FormulaPtr instantiate(const FormulaPtr& body, const TermPtr& replacement);

struct AstError : std::logic_error {
  using std::logic_error::logic_error;
};

} // namespace epsub
