#include "epsub/complexity.hpp"

#include "epsub/print.hpp"

#include <algorithm>

namespace epsub {

unsigned rank(const TermPtr& e) {
  if (!e->is_eps()) throw AstError("rank: not an epsilon term");
  unsigned best = 0;
  for (const auto& occ : epsilon_subterms(e->body)) {
    // subordinate: the occurrence mentions e's binder, which sits occ.depth
    // levels above the occurrence root
    if (references_level(occ.term, occ.depth)) best = std::max(best, rank(occ.term));
  }
  return 1 + best;
}

unsigned degree(const TermPtr& e) {
  if (!e->is_eps()) throw AstError("degree: not an epsilon term");
  unsigned best = 0;
  for (const auto& occ : epsilon_subterms(e->body)) {
    if (occ.eps_depth == 0) best = std::max(best, degree(occ.term)); // maximal occurrences only
  }
  return 1 + best;
}

Complexity complexity(const TermPtr& e) { return Complexity{rank(e), degree(e)}; }

bool is_subordinate(const TermPtr& inner, const TermPtr& outer) {
  if (!inner->is_eps() || !outer->is_eps()) throw AstError("is_subordinate: not an epsilon term");
  // Name the outer binder and look for genuine occurrences of `inner`.
  auto opened = instantiate(outer->body, var(outer->name));
  if (!free_vars(inner).count(outer->name)) return false;
  for (const auto& occ : epsilon_subterms(opened)) {
    if (has_dangling_refs(occ.term)) continue;
    if (alpha_eq(occ.term, inner)) return true;
  }
  return false;
}

namespace {

std::vector<Complexity> sorted_desc(std::vector<Complexity> v) {
  std::sort(v.begin(), v.end(), [](const Complexity& a, const Complexity& b) { return b < a; });
  return v;
}

} // namespace

bool measure_less(const SystemMeasure& a, const SystemMeasure& b) {
  const auto& x = a.entries;
  const auto& y = b.entries;
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < y[i]) return true;
    if (y[i] < x[i]) return false;
  }
  return x.size() < y.size();
}

SystemMeasure measure(const SystemE& system) {
  std::vector<TermPtr> owners;
  for (const auto& m : system.members) {
    bool seen = false;
    for (const auto& o : owners)
      if (alpha_eq(o, m.cf.epsilon_term)) { seen = true; break; }
    if (!seen) owners.push_back(m.cf.epsilon_term);
  }
  SystemMeasure out;
  out.entries.reserve(owners.size());
  for (const auto& o : owners) out.entries.push_back(complexity(o));
  out.entries = sorted_desc(std::move(out.entries));
  return out;
}

TermPtr select_maximal(const SystemE& system) {
  if (system.empty()) throw TranslateError("select_maximal: empty system");
  TermPtr best;
  Complexity best_c;
  std::string best_str;
  for (const auto& m : system.members) {
    const TermPtr& e = m.cf.epsilon_term;
    if (best && alpha_eq(best, e)) continue;
    Complexity c = complexity(e);
    std::string s = canonical_str(e);
    if (!best || best_c < c || (c == best_c && s < best_str)) {
      best = e;
      best_c = c;
      best_str = std::move(s);
    }
  }
  return best;
}

std::string to_string(const Complexity& c) {
  return "(" + std::to_string(c.rank) + "," + std::to_string(c.degree) + ")";
}

std::string to_string(const SystemMeasure& m) {
  std::string out = "{";
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    if (i) out += ", ";
    out += to_string(m.entries[i]);
  }
  return out + "}";
}

} // namespace epsub
