#pragma once

// Rank, degree and the system-level multiset measure that drives owner
// selection and the termination check.
//
// rank(e)   = 1 + max rank of eps occurrences in e's body that reference e's
//             binder (subordinate occurrences); 1 if none.
// degree(e) = 1 + max degree of eps occurrences properly inside e; 1 if none.
// Complexity compares lexicographically, rank first.

#include "epsub/ast.hpp"
#include "epsub/translate.hpp"

#include <string>
#include <vector>

namespace epsub {

struct Complexity {
  unsigned rank = 1;
  unsigned degree = 1;

  friend bool operator==(const Complexity&, const Complexity&) = default;
  friend bool operator<(const Complexity& a, const Complexity& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.degree < b.degree;
  }
  friend bool operator>(const Complexity& a, const Complexity& b) { return b < a; }
};

unsigned rank(const TermPtr& e);
unsigned degree(const TermPtr& e);
Complexity complexity(const TermPtr& e);

// True iff `inner` occurs within `outer`'s body with `outer`'s bound variable
// free in the occurrence. The bound variable is identified by `outer`'s
// binder hint, so `is_subordinate(eps x. Q(x, y), eps y. P(eps x. Q(x, y), y))`
// holds.
bool is_subordinate(const TermPtr& inner, const TermPtr& outer);

// Multiset of owner complexities, one entry per distinct owner eps term.
// Ordered descending so that multiset comparison is lexicographic.
struct SystemMeasure {
  std::vector<Complexity> entries;

  friend bool operator==(const SystemMeasure&, const SystemMeasure&) = default;
};

// Dershowitz-Manna multiset ordering (elements are totally ordered, so this
// is a lexicographic comparison of the descending-sorted sequences, with a
// proper prefix counting as smaller).
bool measure_less(const SystemMeasure& a, const SystemMeasure& b);

SystemMeasure measure(const SystemE& system);

// Owner of maximal (rank, degree); ties broken by ascending canonical print
// string. Throws on an empty system.
TermPtr select_maximal(const SystemE& system);

std::string to_string(const Complexity& c);
std::string to_string(const SystemMeasure& m);

} // namespace epsub
