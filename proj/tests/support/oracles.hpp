#pragma once

// Test-side oracles, independent of the library kernel: a direct truth-table
// tautology decision working on the formula tree itself.

#include "epsub/ast.hpp"
#include "epsub/print.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace epsub::test {

inline void collect_atoms(const FormulaPtr& f, std::vector<std::string>& order,
                          std::map<std::string, std::size_t>& idx) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      auto key = canonical_str(f);
      if (!idx.count(key)) {
        idx[key] = order.size();
        order.push_back(key);
      }
      return;
    }
    case Formula::Kind::Not: collect_atoms(f->lhs, order, idx); return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      collect_atoms(f->lhs, order, idx);
      collect_atoms(f->rhs, order, idx);
      return;
    default: throw std::runtime_error("oracle: quantifier in formula");
  }
}

inline bool eval_tree(const FormulaPtr& f, const std::map<std::string, std::size_t>& idx,
                      unsigned long long mask) {
  switch (f->kind) {
    case Formula::Kind::Atom: return (mask >> idx.at(canonical_str(f))) & 1;
    case Formula::Kind::Not: return !eval_tree(f->lhs, idx, mask);
    case Formula::Kind::And: return eval_tree(f->lhs, idx, mask) && eval_tree(f->rhs, idx, mask);
    case Formula::Kind::Or: return eval_tree(f->lhs, idx, mask) || eval_tree(f->rhs, idx, mask);
    case Formula::Kind::Implies:
      return !eval_tree(f->lhs, idx, mask) || eval_tree(f->rhs, idx, mask);
    default: throw std::runtime_error("oracle: quantifier in formula");
  }
}

// Exhaustive truth-table verdict; requires at most 24 atoms.
inline bool tt_tautology(const FormulaPtr& f) {
  std::vector<std::string> order;
  std::map<std::string, std::size_t> idx;
  collect_atoms(f, order, idx);
  if (order.size() > 24) throw std::runtime_error("oracle: too many atoms");
  for (unsigned long long mask = 0; mask < (1ULL << order.size()); ++mask)
    if (!eval_tree(f, idx, mask)) return false;
  return true;
}

} // namespace epsub::test
