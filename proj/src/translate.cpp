#include "epsub/translate.hpp"

#include "epsub/print.hpp"

namespace epsub {

namespace {

FormulaPtr close_free(const FormulaPtr& f, const std::string& name) {
  // eps() closes the name; reuse it and take the body back.
  return eps(name, f)->body;
}

} // namespace

Matrix matrix(const std::string& var_name, const FormulaPtr& body_with_free_var) {
  return Matrix{var_name, close_free(body_with_free_var, var_name)};
}

NotCriticalError::NotCriticalError(std::size_t i, FormulaPtr f, const std::string& why)
    : TranslateError("formula " + std::to_string(i) + " is not a critical formula: " + why +
                     ": " + to_string(f)),
      index(i),
      formula(std::move(f)) {}

// ---------- epsilon translation ----------

FormulaPtr epsilon_translate(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::Not:
      return neg(epsilon_translate(f->lhs));
    case Formula::Kind::And:
      return conj(epsilon_translate(f->lhs), epsilon_translate(f->rhs));
    case Formula::Kind::Or:
      return disj(epsilon_translate(f->lhs), epsilon_translate(f->rhs));
    case Formula::Kind::Implies:
      return implies(epsilon_translate(f->lhs), epsilon_translate(f->rhs));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      // Open the binder with a fresh name so the recursion only ever works on
      // self-contained trees, then close the translated body into the eps term.
      auto frees = free_vars(f->body);
      std::string marker = f->name.empty() ? "x" : f->name;
      for (int i = 2; frees.count(marker); ++i)
        marker = (f->name.empty() ? "x" : f->name) + "_" + std::to_string(i);
      auto opened = instantiate(f->body, var(marker));
      auto translated = epsilon_translate(opened);
      auto closed = f->kind == Formula::Kind::Exists ? eps(marker, translated)
                                                     : eps(marker, neg(translated));
      auto e = eps_raw(f->name, closed->body); // keep the surface hint
      return subst_free_var(translated, marker, e);
    }
  }
  throw AstError("epsilon_translate: bad kind");
}

// ---------- critical formulas ----------

CriticalFormula make_critical_formula(const Matrix& m, const TermPtr& witness) {
  if (!quantifier_free(m.body))
    throw TranslateError("make_critical_formula: matrix body contains a quantifier: " +
                         to_string(m.body));
  auto e = m.epsilon();
  auto f = implies(m.apply(witness), m.apply(e));
  return CriticalFormula{f, e, witness, m};
}

namespace {

// Matches `a` against `pattern` where occurrences of `hole` mark the witness
// positions. Every hole must carry the same (alpha-equivalent) subterm.
bool match_hole(const TermPtr& pattern, const TermPtr& a, const TermPtr& hole,
                std::optional<TermPtr>& witness);
bool match_hole(const FormulaPtr& pattern, const FormulaPtr& a, const TermPtr& hole,
                std::optional<TermPtr>& witness);

bool match_hole(const TermPtr& pattern, const TermPtr& a, const TermPtr& hole,
                std::optional<TermPtr>& witness) {
  if (alpha_eq(pattern, hole)) {
    if (has_dangling_refs(a)) return false; // a binder cut through the witness
    if (witness && !alpha_eq(*witness, a)) return false;
    witness = a;
    return true;
  }
  if (pattern->kind != a->kind) return false;
  switch (pattern->kind) {
    case Term::Kind::Var: return pattern->name == a->name;
    case Term::Kind::Bound: return pattern->index == a->index;
    case Term::Kind::Fun: {
      if (pattern->name != a->name || pattern->args.size() != a->args.size()) return false;
      for (std::size_t i = 0; i < pattern->args.size(); ++i)
        if (!match_hole(pattern->args[i], a->args[i], hole, witness)) return false;
      return true;
    }
    case Term::Kind::Eps:
      return match_hole(pattern->body, a->body, hole, witness);
  }
  return false;
}

bool match_hole(const FormulaPtr& pattern, const FormulaPtr& a, const TermPtr& hole,
                std::optional<TermPtr>& witness) {
  if (pattern->kind != a->kind) return false;
  switch (pattern->kind) {
    case Formula::Kind::Atom: {
      if (pattern->name != a->name || pattern->args.size() != a->args.size()) return false;
      for (std::size_t i = 0; i < pattern->args.size(); ++i)
        if (!match_hole(pattern->args[i], a->args[i], hole, witness)) return false;
      return true;
    }
    case Formula::Kind::Not:
      return match_hole(pattern->lhs, a->lhs, hole, witness);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return match_hole(pattern->lhs, a->lhs, hole, witness) &&
             match_hole(pattern->rhs, a->rhs, hole, witness);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return match_hole(pattern->body, a->body, hole, witness);
  }
  return false;
}

} // namespace

Decomposition recognize_critical(const FormulaPtr& f) {
  Decomposition out;
  if (f->kind != Formula::Kind::Implies) return out;
  if (!quantifier_free(f)) return out;
  const FormulaPtr& antecedent = f->lhs;
  const FormulaPtr& consequent = f->rhs;

  // Candidate eps terms of the consequent, leftmost-outermost, distinct up to
  // alpha-equivalence. Occurrences that reach out to an enclosing binder are
  // context-dependent patterns, not terms, and cannot own a critical formula.
  std::vector<TermPtr> candidates;
  for (const auto& occ : epsilon_subterms(consequent)) {
    if (has_dangling_refs(occ.term)) continue;
    bool seen = false;
    for (const auto& c : candidates)
      if (alpha_eq(c, occ.term)) { seen = true; break; }
    if (!seen) candidates.push_back(occ.term);
  }

  for (const auto& e : candidates) {
    // The hole marker cannot collide with source identifiers.
    TermPtr hole = var("$hole");
    FormulaPtr consequent_holed = replace_subterm(consequent, e, hole);
    FormulaPtr body_holed = instantiate(e->body, hole);
    if (!alpha_eq(consequent_holed, body_holed)) continue;
    std::optional<TermPtr> witness;
    if (!match_hole(body_holed, antecedent, hole, witness)) continue;
    if (!witness) continue; // no hole position: nothing determines t
    out.push_back(DecompositionEntry{e, *witness, Matrix{e->name, e->body}});
  }
  return out;
}

// ---------- systems ----------

void push_dedup(SystemE& system, SystemE::Member member) {
  for (const auto& m : system.members)
    if (alpha_eq(m.cf.formula, member.cf.formula)) return;
  system.members.push_back(std::move(member));
}

SystemE build_system(const std::vector<FormulaPtr>& formulas) {
  SystemE out;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    const auto& f = formulas[i];
    if (!quantifier_free(f))
      throw NotCriticalError(i, f, "formula is not quantifier-free (translate it first)");
    Decomposition d = recognize_critical(f);
    if (d.empty())
      throw NotCriticalError(i, f, "no decomposition of the shape F[t] -> F[eps x. F]");
    CriticalFormula cf{f, d.front().epsilon_term, d.front().witness, d.front().mat};
    push_dedup(out, SystemE::Member{std::move(cf), std::move(d)});
  }
  return out;
}

} // namespace epsub
