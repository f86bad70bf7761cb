#include "epsub/taut.hpp"

#include "epsub/print.hpp"

#include <optional>

namespace epsub {

namespace {

PropPtr mk_prop(Prop p) { return std::make_shared<const Prop>(std::move(p)); }

PropPtr build_skeleton(const FormulaPtr& f, std::map<AtomKey, int>& index,
                       std::vector<std::pair<AtomKey, FormulaPtr>>& atoms) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      AtomKey key = canonical_str(f);
      auto it = index.find(key);
      int id;
      if (it == index.end()) {
        id = static_cast<int>(atoms.size());
        index.emplace(key, id);
        atoms.emplace_back(key, f);
      } else {
        id = it->second;
      }
      Prop p;
      p.kind = Prop::Kind::Var;
      p.var = id;
      return mk_prop(std::move(p));
    }
    case Formula::Kind::Not: {
      Prop p;
      p.kind = Prop::Kind::Not;
      p.lhs = build_skeleton(f->lhs, index, atoms);
      return mk_prop(std::move(p));
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      Prop p;
      p.kind = f->kind == Formula::Kind::And   ? Prop::Kind::And
               : f->kind == Formula::Kind::Or  ? Prop::Kind::Or
                                               : Prop::Kind::Implies;
      p.lhs = build_skeleton(f->lhs, index, atoms);
      p.rhs = build_skeleton(f->rhs, index, atoms);
      return mk_prop(std::move(p));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      throw TautError("tautology check requires a quantifier-free formula");
  }
  throw TautError("abstract: bad formula kind");
}

bool eval_prop(const PropPtr& p, const std::vector<char>& vals) {
  switch (p->kind) {
    case Prop::Kind::Var: return vals[p->var] != 0;
    case Prop::Kind::Not: return !eval_prop(p->lhs, vals);
    case Prop::Kind::And: return eval_prop(p->lhs, vals) && eval_prop(p->rhs, vals);
    case Prop::Kind::Or: return eval_prop(p->lhs, vals) || eval_prop(p->rhs, vals);
    case Prop::Kind::Implies: return !eval_prop(p->lhs, vals) || eval_prop(p->rhs, vals);
  }
  return false;
}

// Three-valued evaluation over a partial assignment (-1 = unassigned).
std::optional<bool> eval_partial(const PropPtr& p, const std::vector<signed char>& vals) {
  switch (p->kind) {
    case Prop::Kind::Var: {
      signed char v = vals[p->var];
      if (v < 0) return std::nullopt;
      return v != 0;
    }
    case Prop::Kind::Not: {
      auto v = eval_partial(p->lhs, vals);
      if (!v) return std::nullopt;
      return !*v;
    }
    case Prop::Kind::And: {
      auto l = eval_partial(p->lhs, vals);
      auto r = eval_partial(p->rhs, vals);
      if (l && !*l) return false;
      if (r && !*r) return false;
      if (l && r) return *l && *r;
      return std::nullopt;
    }
    case Prop::Kind::Or: {
      auto l = eval_partial(p->lhs, vals);
      auto r = eval_partial(p->rhs, vals);
      if (l && *l) return true;
      if (r && *r) return true;
      if (l && r) return *l || *r;
      return std::nullopt;
    }
    case Prop::Kind::Implies: {
      auto l = eval_partial(p->lhs, vals);
      auto r = eval_partial(p->rhs, vals);
      if (l && !*l) return true;
      if (r && *r) return true;
      if (l && r) return !*l || *r;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Branch variable: an unassigned atom inside the leftmost undetermined
// subformula, so every assignment drives some undetermined part toward a
// value instead of revisiting parts that are already settled.
int branch_var(const PropPtr& p, const std::vector<signed char>& vals) {
  switch (p->kind) {
    case Prop::Kind::Var: return vals[p->var] < 0 ? p->var : -1;
    case Prop::Kind::Not: return branch_var(p->lhs, vals);
    default: {
      if (!eval_partial(p->lhs, vals)) return branch_var(p->lhs, vals);
      return branch_var(p->rhs, vals);
    }
  }
}

// Complete search for an assignment falsifying the skeleton.
bool search_false(const PropPtr& p, std::vector<signed char>& vals) {
  auto v = eval_partial(p, vals);
  if (v) return !*v;
  int var = branch_var(p, vals);
  if (var < 0) return false; // fully determined, handled above
  for (signed char b : {0, 1}) {
    vals[var] = b;
    if (search_false(p, vals)) return true;
    vals[var] = -1;
  }
  return false;
}

} // namespace

Abstraction abstract(const FormulaPtr& f) {
  Abstraction out;
  std::map<AtomKey, int> index;
  out.skeleton = build_skeleton(f, index, out.atoms);
  return out;
}

TautResult is_tautology(const FormulaPtr& f, unsigned table_threshold) {
  Abstraction a = abstract(f);
  std::size_t n = a.atoms.size();
  TautResult out;

  auto countermodel_from = [&](const std::vector<signed char>& vals) {
    for (std::size_t i = 0; i < n; ++i)
      out.countermodel[a.atoms[i].first] = vals[i] > 0;
  };

  if (n <= table_threshold && n < 64) {
    std::vector<char> vals(n, 0);
    for (unsigned long long mask = 0; mask < (1ULL << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i) vals[i] = (mask >> i) & 1;
      if (!eval_prop(a.skeleton, vals)) {
        std::vector<signed char> sv(vals.begin(), vals.end());
        countermodel_from(sv);
        return out;
      }
    }
    out.tautology = true;
    return out;
  }

  std::vector<signed char> vals(n, -1);
  if (search_false(a.skeleton, vals)) {
    // any completion of the partial assignment falsifies; default the rest
    for (auto& v : vals)
      if (v < 0) v = 0;
    countermodel_from(vals);
    return out;
  }
  out.tautology = true;
  return out;
}

bool evaluate(const FormulaPtr& f, const Assignment& a) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      auto it = a.find(canonical_str(f));
      if (it == a.end()) throw TautError("evaluate: assignment missing atom " + to_string(f));
      return it->second;
    }
    case Formula::Kind::Not: return !evaluate(f->lhs, a);
    case Formula::Kind::And: return evaluate(f->lhs, a) && evaluate(f->rhs, a);
    case Formula::Kind::Or: return evaluate(f->lhs, a) || evaluate(f->rhs, a);
    case Formula::Kind::Implies: return !evaluate(f->lhs, a) || evaluate(f->rhs, a);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      throw TautError("evaluate: quantifier in formula");
  }
  throw TautError("evaluate: bad kind");
}

} // namespace epsub
