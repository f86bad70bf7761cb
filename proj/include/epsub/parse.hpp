#pragma once

// Concrete syntax (first-order entry points):
//   formula  := implication; `->` right-assoc, `|`, `&` left-assoc, `~` prefix
//   binders  := `eps x. F`, `exists x. F`, `forall x. F` (body extends right)
//   atoms    := P(t1, ..., tn) or bare P
//   terms    := identifier (bound or free variable), numeral constants,
//               f(t1, ..., tn), epsilon terms
//   `#` starts a comment; identifiers are [A-Za-z][A-Za-z0-9_]*
//
// Function and predicate symbols get their arity fixed at first use; a later
// mismatch is a parse error. Identifiers not bound by any binder (and not
// bound by `let`) parse as free variables and are reported on the warning
// channel.
//
// System files:
//   let e0 = eps x. P(x, 0)
//   system { <formula> ; <formula> ; ... }

#include "epsub/ast.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace epsub {

struct SourcePos {
  int line = 1;
  int col = 1;
};

struct ParseError : std::runtime_error {
  SourcePos pos;
  ParseError(const std::string& msg, SourcePos p)
      : std::runtime_error(msg + " (line " + std::to_string(p.line) + ", column " +
                           std::to_string(p.col) + ")"),
        pos(p) {}
};

struct Warning {
  SourcePos pos;
  std::string message;
};

struct SymbolTable {
  std::map<std::string, unsigned> functions;
  std::map<std::string, unsigned> predicates;
};

struct ParseContext {
  std::vector<Warning> warnings;
  SymbolTable symbols;
  std::map<std::string, TermPtr> lets;
};

FormulaPtr parse_formula(const std::string& text, ParseContext* ctx = nullptr);
TermPtr parse_term(const std::string& text, ParseContext* ctx = nullptr);

// Tries a formula first, falls back to a term (covers inputs like `eps x. ...`).
std::variant<FormulaPtr, TermPtr> parse_any(const std::string& text, ParseContext* ctx = nullptr);

struct SystemFile {
  std::vector<std::pair<std::string, TermPtr>> lets;
  std::vector<FormulaPtr> formulas; // abbreviations already expanded
  std::vector<Warning> warnings;
  SymbolTable symbols;
};

SystemFile parse_system_file(const std::string& text);

// Optional `let` bindings followed by a single formula.
FormulaPtr parse_formula_file(const std::string& text, ParseContext* ctx = nullptr);

} // namespace epsub
