#include "epsub/ast.hpp"

namespace epsub {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_string(const std::string& s) {
  return std::hash<std::string>{}(s);
}

std::size_t term_hash(const Term& t) {
  std::size_t h = hash_combine(0x7e, static_cast<std::size_t>(t.kind));
  switch (t.kind) {
    case Term::Kind::Var: h = hash_combine(h, hash_string(t.name)); break;
    case Term::Kind::Bound: h = hash_combine(h, t.index); break;
    case Term::Kind::Fun:
      h = hash_combine(h, hash_string(t.name));
      for (const auto& a : t.args) h = hash_combine(h, a->hash);
      break;
    case Term::Kind::Eps: h = hash_combine(h, t.body->hash); break;
  }
  return h;
}

std::size_t formula_hash(const Formula& f) {
  std::size_t h = hash_combine(0xf0, static_cast<std::size_t>(f.kind));
  switch (f.kind) {
    case Formula::Kind::Atom:
      h = hash_combine(h, hash_string(f.name));
      for (const auto& a : f.args) h = hash_combine(h, a->hash);
      break;
    case Formula::Kind::Not: h = hash_combine(h, f.lhs->hash); break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      h = hash_combine(h, f.lhs->hash);
      h = hash_combine(h, f.rhs->hash);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      h = hash_combine(h, f.body->hash);
      break;
  }
  return h;
}

TermPtr finish(Term t) {
  t.hash = term_hash(t);
  return std::make_shared<const Term>(std::move(t));
}

FormulaPtr finish(Formula f) {
  f.hash = formula_hash(f);
  return std::make_shared<const Formula>(std::move(f));
}

// Closes free occurrences of `name` at binder depth `depth`.
TermPtr close_term(const TermPtr& t, const std::string& name, unsigned depth);
FormulaPtr close_formula(const FormulaPtr& f, const std::string& name, unsigned depth);

TermPtr close_term(const TermPtr& t, const std::string& name, unsigned depth) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (t->name == name) return bound(depth);
      return t;
    case Term::Kind::Bound:
      return t;
    case Term::Kind::Fun: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = close_term(a, name, depth);
        changed = changed || na != a;
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return fun(t->name, std::move(args));
    }
    case Term::Kind::Eps: {
      auto nb = close_formula(t->body, name, depth + 1);
      if (nb == t->body) return t;
      return eps_raw(t->name, nb);
    }
  }
  throw AstError("close_term: bad kind");
}

FormulaPtr close_formula(const FormulaPtr& f, const std::string& name, unsigned depth) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::vector<TermPtr> args;
      args.reserve(f->args.size());
      bool changed = false;
      for (const auto& a : f->args) {
        auto na = close_term(a, name, depth);
        changed = changed || na != a;
        args.push_back(std::move(na));
      }
      if (!changed) return f;
      return atom(f->name, std::move(args));
    }
    case Formula::Kind::Not: {
      auto nl = close_formula(f->lhs, name, depth);
      if (nl == f->lhs) return f;
      return neg(nl);
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      auto nl = close_formula(f->lhs, name, depth);
      auto nr = close_formula(f->rhs, name, depth);
      if (nl == f->lhs && nr == f->rhs) return f;
      Formula g;
      g.kind = f->kind;
      g.lhs = nl;
      g.rhs = nr;
      return finish(std::move(g));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      auto nb = close_formula(f->body, name, depth + 1);
      if (nb == f->body) return f;
      Formula g;
      g.kind = f->kind;
      g.name = f->name;
      g.body = nb;
      return finish(std::move(g));
    }
  }
  throw AstError("close_formula: bad kind");
}

} // namespace

// ---------- construction ----------

TermPtr var(const std::string& name) {
  Term t;
  t.kind = Term::Kind::Var;
  t.name = name;
  return finish(std::move(t));
}

TermPtr bound(unsigned index) {
  Term t;
  t.kind = Term::Kind::Bound;
  t.index = index;
  return finish(std::move(t));
}

TermPtr fun(const std::string& symbol, std::vector<TermPtr> args) {
  Term t;
  t.kind = Term::Kind::Fun;
  t.name = symbol;
  t.args = std::move(args);
  return finish(std::move(t));
}

TermPtr eps_raw(const std::string& hint, const FormulaPtr& body) {
  Term t;
  t.kind = Term::Kind::Eps;
  t.name = hint;
  t.body = body;
  return finish(std::move(t));
}

TermPtr eps(const std::string& name, const FormulaPtr& body) {
  return eps_raw(name, close_formula(body, name, 0));
}

FormulaPtr atom(const std::string& pred, std::vector<TermPtr> args) {
  Formula f;
  f.kind = Formula::Kind::Atom;
  f.name = pred;
  f.args = std::move(args);
  return finish(std::move(f));
}

FormulaPtr neg(const FormulaPtr& a) {
  Formula f;
  f.kind = Formula::Kind::Not;
  f.lhs = a;
  return finish(std::move(f));
}

static FormulaPtr binop(Formula::Kind k, const FormulaPtr& a, const FormulaPtr& b) {
  Formula f;
  f.kind = k;
  f.lhs = a;
  f.rhs = b;
  return finish(std::move(f));
}

FormulaPtr conj(const FormulaPtr& a, const FormulaPtr& b) { return binop(Formula::Kind::And, a, b); }
FormulaPtr disj(const FormulaPtr& a, const FormulaPtr& b) { return binop(Formula::Kind::Or, a, b); }
FormulaPtr implies(const FormulaPtr& a, const FormulaPtr& b) { return binop(Formula::Kind::Implies, a, b); }

static FormulaPtr quant_raw(Formula::Kind k, const std::string& hint, const FormulaPtr& body) {
  Formula f;
  f.kind = k;
  f.name = hint;
  f.body = body;
  return finish(std::move(f));
}

FormulaPtr exists_raw(const std::string& hint, const FormulaPtr& body) {
  return quant_raw(Formula::Kind::Exists, hint, body);
}
FormulaPtr forall_raw(const std::string& hint, const FormulaPtr& body) {
  return quant_raw(Formula::Kind::Forall, hint, body);
}

FormulaPtr exists(const std::string& name, const FormulaPtr& body) {
  return exists_raw(name, close_formula(body, name, 0));
}
FormulaPtr forall(const std::string& name, const FormulaPtr& body) {
  return forall_raw(name, close_formula(body, name, 0));
}

// ---------- alpha equivalence ----------

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var: return a->name == b->name;
    case Term::Kind::Bound: return a->index == b->index;
    case Term::Kind::Fun: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_eq(a->args[i], b->args[i])) return false;
      return true;
    }
    case Term::Kind::Eps: return alpha_eq(a->body, b->body);
  }
  return false;
}

bool alpha_eq(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::Atom: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_eq(a->args[i], b->args[i])) return false;
      return true;
    }
    case Formula::Kind::Not: return alpha_eq(a->lhs, b->lhs);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return alpha_eq(a->lhs, b->lhs) && alpha_eq(a->rhs, b->rhs);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return alpha_eq(a->body, b->body);
  }
  return false;
}

// ---------- queries ----------

namespace {

void collect_free_formula(const FormulaPtr& f, std::set<std::string>& out);

void collect_free(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Var: out.insert(t->name); return;
    case Term::Kind::Bound: return;
    case Term::Kind::Fun:
      for (const auto& a : t->args) collect_free(a, out);
      return;
    case Term::Kind::Eps:
      collect_free_formula(t->body, out);
      return;
  }
}

void collect_free_formula(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const auto& a : f->args) collect_free(a, out);
      return;
    case Formula::Kind::Not: collect_free_formula(f->lhs, out); return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      collect_free_formula(f->lhs, out);
      collect_free_formula(f->rhs, out);
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      collect_free_formula(f->body, out);
      return;
  }
}

} // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> out;
  collect_free(t, out);
  return out;
}

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_free_formula(f, out);
  return out;
}

namespace {

// quantifiers inside epsilon bodies count too
bool qf_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Bound:
      return true;
    case Term::Kind::Fun:
      for (const auto& a : t->args)
        if (!qf_term(a)) return false;
      return true;
    case Term::Kind::Eps:
      return quantifier_free(t->body);
  }
  return true;
}

} // namespace

bool quantifier_free(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const auto& a : f->args)
        if (!qf_term(a)) return false;
      return true;
    case Formula::Kind::Not: return quantifier_free(f->lhs);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return quantifier_free(f->lhs) && quantifier_free(f->rhs);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return false;
  }
  return true;
}

namespace {

bool refs_at_or_above(const TermPtr& t, unsigned depth, unsigned level, bool exact);
bool refs_at_or_above(const FormulaPtr& f, unsigned depth, unsigned level, bool exact);

bool refs_at_or_above(const TermPtr& t, unsigned depth, unsigned level, bool exact) {
  switch (t->kind) {
    case Term::Kind::Var: return false;
    case Term::Kind::Bound:
      if (t->index < depth) return false;
      return exact ? (t->index - depth == level) : (t->index - depth >= level);
    case Term::Kind::Fun:
      for (const auto& a : t->args)
        if (refs_at_or_above(a, depth, level, exact)) return true;
      return false;
    case Term::Kind::Eps:
      return refs_at_or_above(t->body, depth + 1, level, exact);
  }
  return false;
}

bool refs_at_or_above(const FormulaPtr& f, unsigned depth, unsigned level, bool exact) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const auto& a : f->args)
        if (refs_at_or_above(a, depth, level, exact)) return true;
      return false;
    case Formula::Kind::Not: return refs_at_or_above(f->lhs, depth, level, exact);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return refs_at_or_above(f->lhs, depth, level, exact) ||
             refs_at_or_above(f->rhs, depth, level, exact);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return refs_at_or_above(f->body, depth + 1, level, exact);
  }
  return false;
}

} // namespace

bool has_dangling_refs(const TermPtr& t) { return refs_at_or_above(t, 0, 0, false); }
bool has_dangling_refs(const FormulaPtr& f) { return refs_at_or_above(f, 0, 0, false); }
bool references_level(const TermPtr& t, unsigned level) { return refs_at_or_above(t, 0, level, true); }
bool references_level(const FormulaPtr& f, unsigned level) { return refs_at_or_above(f, 0, level, true); }

// ---------- epsilon occurrences ----------

namespace {

void collect_eps(const TermPtr& t, Position& path, unsigned depth, unsigned eps_depth,
                 std::vector<EpsOccurrence>& out);
void collect_eps(const FormulaPtr& f, Position& path, unsigned depth, unsigned eps_depth,
                 std::vector<EpsOccurrence>& out);

void collect_eps(const TermPtr& t, Position& path, unsigned depth, unsigned eps_depth,
                 std::vector<EpsOccurrence>& out) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Bound:
      return;
    case Term::Kind::Fun:
      for (unsigned i = 0; i < t->args.size(); ++i) {
        path.push_back(i);
        collect_eps(t->args[i], path, depth, eps_depth, out);
        path.pop_back();
      }
      return;
    case Term::Kind::Eps:
      out.push_back(EpsOccurrence{t, path, depth, eps_depth});
      path.push_back(0);
      collect_eps(t->body, path, depth + 1, eps_depth + 1, out);
      path.pop_back();
      return;
  }
}

void collect_eps(const FormulaPtr& f, Position& path, unsigned depth, unsigned eps_depth,
                 std::vector<EpsOccurrence>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (unsigned i = 0; i < f->args.size(); ++i) {
        path.push_back(i);
        collect_eps(f->args[i], path, depth, eps_depth, out);
        path.pop_back();
      }
      return;
    case Formula::Kind::Not:
      path.push_back(0);
      collect_eps(f->lhs, path, depth, eps_depth, out);
      path.pop_back();
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      path.push_back(0);
      collect_eps(f->lhs, path, depth, eps_depth, out);
      path.back() = 1;
      collect_eps(f->rhs, path, depth, eps_depth, out);
      path.pop_back();
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      path.push_back(0);
      collect_eps(f->body, path, depth + 1, eps_depth, out);
      path.pop_back();
      return;
  }
}

} // namespace

std::vector<EpsOccurrence> epsilon_subterms(const TermPtr& t) {
  std::vector<EpsOccurrence> out;
  Position path;
  collect_eps(t, path, 0, 0, out);
  return out;
}

std::vector<EpsOccurrence> epsilon_subterms(const FormulaPtr& f) {
  std::vector<EpsOccurrence> out;
  Position path;
  collect_eps(f, path, 0, 0, out);
  return out;
}

namespace {

TermPtr term_at_term(const TermPtr& t, const Position& pos, std::size_t i);

TermPtr term_at_formula(const FormulaPtr& f, const Position& pos, std::size_t i) {
  if (i == pos.size()) throw AstError("term_at: position ends on a formula node");
  unsigned c = pos[i];
  switch (f->kind) {
    case Formula::Kind::Atom:
      if (c >= f->args.size()) throw AstError("term_at: bad atom child");
      return term_at_term(f->args[c], pos, i + 1);
    case Formula::Kind::Not:
      if (c != 0) throw AstError("term_at: bad child of negation");
      return term_at_formula(f->lhs, pos, i + 1);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      if (c == 0) return term_at_formula(f->lhs, pos, i + 1);
      if (c == 1) return term_at_formula(f->rhs, pos, i + 1);
      throw AstError("term_at: bad child of connective");
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (c != 0) throw AstError("term_at: bad child of quantifier");
      return term_at_formula(f->body, pos, i + 1);
  }
  throw AstError("term_at: bad formula kind");
}

TermPtr term_at_term(const TermPtr& t, const Position& pos, std::size_t i) {
  if (i == pos.size()) return t;
  unsigned c = pos[i];
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Bound:
      throw AstError("term_at: leaf has no children");
    case Term::Kind::Fun:
      if (c >= t->args.size()) throw AstError("term_at: bad function child");
      return term_at_term(t->args[c], pos, i + 1);
    case Term::Kind::Eps:
      if (c != 0) throw AstError("term_at: bad child of epsilon term");
      return term_at_formula(t->body, pos, i + 1);
  }
  throw AstError("term_at: bad term kind");
}

} // namespace

TermPtr term_at(const FormulaPtr& root, const Position& pos) { return term_at_formula(root, pos, 0); }
TermPtr term_at(const TermPtr& root, const Position& pos) { return term_at_term(root, pos, 0); }

// ---------- substitution ----------

namespace {

TermPtr replace_in_term(const TermPtr& t, const TermPtr& target, const TermPtr& repl);
FormulaPtr replace_in_formula(const FormulaPtr& f, const TermPtr& target, const TermPtr& repl);

TermPtr replace_in_term(const TermPtr& t, const TermPtr& target, const TermPtr& repl) {
  if (alpha_eq(t, target)) return repl;
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Bound:
      return t;
    case Term::Kind::Fun: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = replace_in_term(a, target, repl);
        changed = changed || na != a;
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return fun(t->name, std::move(args));
    }
    case Term::Kind::Eps: {
      auto nb = replace_in_formula(t->body, target, repl);
      if (nb == t->body) return t;
      return eps_raw(t->name, nb);
    }
  }
  throw AstError("replace_in_term: bad kind");
}

FormulaPtr replace_in_formula(const FormulaPtr& f, const TermPtr& target, const TermPtr& repl) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::vector<TermPtr> args;
      args.reserve(f->args.size());
      bool changed = false;
      for (const auto& a : f->args) {
        auto na = replace_in_term(a, target, repl);
        changed = changed || na != a;
        args.push_back(std::move(na));
      }
      if (!changed) return f;
      return atom(f->name, std::move(args));
    }
    case Formula::Kind::Not: {
      auto nl = replace_in_formula(f->lhs, target, repl);
      if (nl == f->lhs) return f;
      return neg(nl);
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      auto nl = replace_in_formula(f->lhs, target, repl);
      auto nr = replace_in_formula(f->rhs, target, repl);
      if (nl == f->lhs && nr == f->rhs) return f;
      return f->kind == Formula::Kind::And   ? conj(nl, nr)
             : f->kind == Formula::Kind::Or  ? disj(nl, nr)
                                             : implies(nl, nr);
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      auto nb = replace_in_formula(f->body, target, repl);
      if (nb == f->body) return f;
      return f->kind == Formula::Kind::Exists ? exists_raw(f->name, nb) : forall_raw(f->name, nb);
    }
  }
  throw AstError("replace_in_formula: bad kind");
}

} // namespace

TermPtr replace_subterm(const TermPtr& host, const TermPtr& target, const TermPtr& repl) {
  if (has_dangling_refs(target)) throw AstError("replace_subterm: target is not self-contained");
  return replace_in_term(host, target, repl);
}

FormulaPtr replace_subterm(const FormulaPtr& host, const TermPtr& target, const TermPtr& repl) {
  if (has_dangling_refs(target)) throw AstError("replace_subterm: target is not self-contained");
  return replace_in_formula(host, target, repl);
}

TermPtr substitute(const TermPtr& host, const TermPtr& target, const TermPtr& repl) {
  if (!target->is_eps()) throw AstError("substitute: target must be an epsilon term");
  return replace_subterm(host, target, repl);
}

FormulaPtr substitute(const FormulaPtr& host, const TermPtr& target, const TermPtr& repl) {
  if (!target->is_eps()) throw AstError("substitute: target must be an epsilon term");
  return replace_subterm(host, target, repl);
}

TermPtr subst_free_var(const TermPtr& host, const std::string& name, const TermPtr& repl) {
  return replace_in_term(host, var(name), repl);
}

FormulaPtr subst_free_var(const FormulaPtr& host, const std::string& name, const TermPtr& repl) {
  return replace_in_formula(host, var(name), repl);
}

// ---------- binder instantiation ----------

namespace {

TermPtr open_term(const TermPtr& t, const TermPtr& repl, unsigned depth);
FormulaPtr open_formula(const FormulaPtr& f, const TermPtr& repl, unsigned depth);

TermPtr open_term(const TermPtr& t, const TermPtr& repl, unsigned depth) {
  switch (t->kind) {
    case Term::Kind::Var: return t;
    case Term::Kind::Bound:
      if (t->index == depth) return repl;
      if (t->index > depth) return bound(t->index - 1);
      return t;
    case Term::Kind::Fun: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = open_term(a, repl, depth);
        changed = changed || na != a;
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return fun(t->name, std::move(args));
    }
    case Term::Kind::Eps: {
      auto nb = open_formula(t->body, repl, depth + 1);
      if (nb == t->body) return t;
      return eps_raw(t->name, nb);
    }
  }
  throw AstError("open_term: bad kind");
}

FormulaPtr open_formula(const FormulaPtr& f, const TermPtr& repl, unsigned depth) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::vector<TermPtr> args;
      args.reserve(f->args.size());
      bool changed = false;
      for (const auto& a : f->args) {
        auto na = open_term(a, repl, depth);
        changed = changed || na != a;
        args.push_back(std::move(na));
      }
      if (!changed) return f;
      return atom(f->name, std::move(args));
    }
    case Formula::Kind::Not: {
      auto nl = open_formula(f->lhs, repl, depth);
      if (nl == f->lhs) return f;
      return neg(nl);
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      auto nl = open_formula(f->lhs, repl, depth);
      auto nr = open_formula(f->rhs, repl, depth);
      if (nl == f->lhs && nr == f->rhs) return f;
      return f->kind == Formula::Kind::And   ? conj(nl, nr)
             : f->kind == Formula::Kind::Or  ? disj(nl, nr)
                                             : implies(nl, nr);
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      auto nb = open_formula(f->body, repl, depth + 1);
      if (nb == f->body) return f;
      return f->kind == Formula::Kind::Exists ? exists_raw(f->name, nb) : forall_raw(f->name, nb);
    }
  }
  throw AstError("open_formula: bad kind");
}

} // namespace

FormulaPtr instantiate(const FormulaPtr& body, const TermPtr& repl) {
  if (has_dangling_refs(repl)) throw AstError("instantiate: replacement is not self-contained");
  return open_formula(body, repl, 0);
}

} // namespace epsub
