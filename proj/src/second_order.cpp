#include "epsub/second_order.hpp"

#include "epsub/detail/lexer.hpp"
#include "epsub/print.hpp"

#include <algorithm>
#include <sstream>

namespace epsub::so {

namespace {

std::size_t hcomb(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}
std::size_t hstr(const std::string& s) { return std::hash<std::string>{}(s); }

std::size_t hash_of(const SOTerm& t) {
  std::size_t h = hcomb(0x51, static_cast<std::size_t>(t.kind));
  switch (t.kind) {
    case SOTerm::Kind::Var: return hcomb(h, hstr(t.name));
    case SOTerm::Kind::Bound: return hcomb(h, t.index);
    case SOTerm::Kind::Fun:
      h = hcomb(h, hstr(t.name));
      for (const auto& a : t.args) h = hcomb(h, a->hash);
      return h;
    case SOTerm::Kind::Eps: return hcomb(h, t.body->hash);
  }
  return h;
}

std::size_t hash_of(const PredTerm& p) {
  std::size_t h = hcomb(0x52, static_cast<std::size_t>(p.kind));
  switch (p.kind) {
    case PredTerm::Kind::Free: return hcomb(hcomb(h, hstr(p.name)), p.arity);
    case PredTerm::Kind::Bound: return hcomb(h, p.index);
    case PredTerm::Kind::Eps: return hcomb(hcomb(h, p.arity), p.body->hash);
    case PredTerm::Kind::Lambda: return hcomb(hcomb(h, p.params.size()), p.body->hash);
  }
  return h;
}

std::size_t hash_of(const SOFormula& f) {
  std::size_t h = hcomb(0x53, static_cast<std::size_t>(f.kind));
  switch (f.kind) {
    case SOFormula::Kind::Atom:
      h = hcomb(h, hstr(f.name));
      for (const auto& a : f.args) h = hcomb(h, a->hash);
      return h;
    case SOFormula::Kind::PredApp:
      h = hcomb(h, f.head->hash);
      for (const auto& a : f.args) h = hcomb(h, a->hash);
      return h;
    case SOFormula::Kind::Not: return hcomb(h, f.lhs->hash);
    case SOFormula::Kind::And:
    case SOFormula::Kind::Or:
    case SOFormula::Kind::Implies:
      return hcomb(hcomb(h, f.lhs->hash), f.rhs->hash);
    case SOFormula::Kind::Exists:
    case SOFormula::Kind::Forall:
      return hcomb(h, f.body->hash);
    case SOFormula::Kind::PredExists:
      return hcomb(hcomb(h, f.arity), f.body->hash);
  }
  return h;
}

SOTermPtr finish(SOTerm t) {
  t.hash = hash_of(t);
  return std::make_shared<const SOTerm>(std::move(t));
}
PredTermPtr finish(PredTerm p) {
  p.hash = hash_of(p);
  return std::make_shared<const PredTerm>(std::move(p));
}
SOFormulaPtr finish(SOFormula f) {
  f.hash = hash_of(f);
  return std::make_shared<const SOFormula>(std::move(f));
}

} // namespace

// ---------- construction ----------

SOTermPtr var(const std::string& name) {
  SOTerm t;
  t.kind = SOTerm::Kind::Var;
  t.name = name;
  return finish(std::move(t));
}
SOTermPtr ibound(unsigned index) {
  SOTerm t;
  t.kind = SOTerm::Kind::Bound;
  t.index = index;
  return finish(std::move(t));
}
SOTermPtr fun(const std::string& symbol, std::vector<SOTermPtr> args) {
  SOTerm t;
  t.kind = SOTerm::Kind::Fun;
  t.name = symbol;
  t.args = std::move(args);
  return finish(std::move(t));
}
SOTermPtr eps_raw(const std::string& hint, const SOFormulaPtr& body) {
  SOTerm t;
  t.kind = SOTerm::Kind::Eps;
  t.name = hint;
  t.body = body;
  return finish(std::move(t));
}

PredTermPtr pred_free(const std::string& name, unsigned arity) {
  PredTerm p;
  p.kind = PredTerm::Kind::Free;
  p.name = name;
  p.arity = arity;
  return finish(std::move(p));
}
PredTermPtr pred_bound(unsigned index) {
  PredTerm p;
  p.kind = PredTerm::Kind::Bound;
  p.index = index;
  return finish(std::move(p));
}
PredTermPtr so_eps_raw(const std::string& hint, unsigned arity, const SOFormulaPtr& body) {
  PredTerm p;
  p.kind = PredTerm::Kind::Eps;
  p.name = hint;
  p.arity = arity;
  p.body = body;
  return finish(std::move(p));
}
PredTermPtr lambda_raw(std::vector<std::string> hints, const SOFormulaPtr& body) {
  PredTerm p;
  p.kind = PredTerm::Kind::Lambda;
  p.params = std::move(hints);
  p.body = body;
  return finish(std::move(p));
}

SOFormulaPtr atom(const std::string& pred, std::vector<SOTermPtr> args) {
  SOFormula f;
  f.kind = SOFormula::Kind::Atom;
  f.name = pred;
  f.args = std::move(args);
  return finish(std::move(f));
}
SOFormulaPtr pred_app(const PredTermPtr& head, std::vector<SOTermPtr> args) {
  SOFormula f;
  f.kind = SOFormula::Kind::PredApp;
  f.head = head;
  f.args = std::move(args);
  return finish(std::move(f));
}
SOFormulaPtr neg(const SOFormulaPtr& a) {
  SOFormula f;
  f.kind = SOFormula::Kind::Not;
  f.lhs = a;
  return finish(std::move(f));
}
static SOFormulaPtr binop(SOFormula::Kind k, const SOFormulaPtr& a, const SOFormulaPtr& b) {
  SOFormula f;
  f.kind = k;
  f.lhs = a;
  f.rhs = b;
  return finish(std::move(f));
}
SOFormulaPtr conj(const SOFormulaPtr& a, const SOFormulaPtr& b) { return binop(SOFormula::Kind::And, a, b); }
SOFormulaPtr disj(const SOFormulaPtr& a, const SOFormulaPtr& b) { return binop(SOFormula::Kind::Or, a, b); }
SOFormulaPtr implies(const SOFormulaPtr& a, const SOFormulaPtr& b) {
  return binop(SOFormula::Kind::Implies, a, b);
}
static SOFormulaPtr quant_raw(SOFormula::Kind k, const std::string& hint, unsigned arity,
                              const SOFormulaPtr& body) {
  SOFormula f;
  f.kind = k;
  f.name = hint;
  f.arity = arity;
  f.body = body;
  return finish(std::move(f));
}

// ---------- closing traversals ----------

namespace {

// Closes named individual variables: names[j] becomes index d + (n-1-j) at
// traversal depth d. Later names shadow earlier equal ones.
struct CloseInd {
  const std::vector<std::string>& names;

  SOTermPtr term(const SOTermPtr& t, unsigned d) {
    switch (t->kind) {
      case SOTerm::Kind::Var: {
        for (std::size_t j = names.size(); j-- > 0;)
          if (names[j] == t->name)
            return ibound(d + static_cast<unsigned>(names.size() - 1 - j));
        return t;
      }
      case SOTerm::Kind::Bound: return t;
      case SOTerm::Kind::Fun: {
        std::vector<SOTermPtr> args;
        for (const auto& a : t->args) args.push_back(term(a, d));
        return fun(t->name, std::move(args));
      }
      case SOTerm::Kind::Eps: return eps_raw(t->name, formula(t->body, d + 1));
    }
    throw SOError("close: bad term kind");
  }

  PredTermPtr pred(const PredTermPtr& p, unsigned d) {
    switch (p->kind) {
      case PredTerm::Kind::Free:
      case PredTerm::Kind::Bound:
        return p;
      case PredTerm::Kind::Eps: return so_eps_raw(p->name, p->arity, formula(p->body, d));
      case PredTerm::Kind::Lambda:
        return lambda_raw(p->params, formula(p->body, d + static_cast<unsigned>(p->params.size())));
    }
    throw SOError("close: bad pred kind");
  }

  SOFormulaPtr formula(const SOFormulaPtr& f, unsigned d) {
    switch (f->kind) {
      case SOFormula::Kind::Atom: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, d));
        return atom(f->name, std::move(args));
      }
      case SOFormula::Kind::PredApp: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, d));
        return pred_app(pred(f->head, d), std::move(args));
      }
      case SOFormula::Kind::Not: return neg(formula(f->lhs, d));
      case SOFormula::Kind::And: return conj(formula(f->lhs, d), formula(f->rhs, d));
      case SOFormula::Kind::Or: return disj(formula(f->lhs, d), formula(f->rhs, d));
      case SOFormula::Kind::Implies: return implies(formula(f->lhs, d), formula(f->rhs, d));
      case SOFormula::Kind::Exists:
      case SOFormula::Kind::Forall:
        return quant_raw(f->kind, f->name, 0, formula(f->body, d + 1));
      case SOFormula::Kind::PredExists:
        return quant_raw(f->kind, f->name, f->arity, formula(f->body, d));
    }
    throw SOError("close: bad formula kind");
  }
};

// Closes a named free predicate variable, both at application heads and on
// atoms carrying the name (parsed formulas use the atom form).
struct ClosePred {
  const std::string& name;
  unsigned arity;

  SOTermPtr term(const SOTermPtr& t, unsigned d) {
    switch (t->kind) {
      case SOTerm::Kind::Var:
      case SOTerm::Kind::Bound:
        return t;
      case SOTerm::Kind::Fun: {
        std::vector<SOTermPtr> args;
        for (const auto& a : t->args) args.push_back(term(a, d));
        return fun(t->name, std::move(args));
      }
      case SOTerm::Kind::Eps: return eps_raw(t->name, formula(t->body, d));
    }
    throw SOError("close: bad term kind");
  }

  PredTermPtr pred(const PredTermPtr& p, unsigned d) {
    switch (p->kind) {
      case PredTerm::Kind::Free:
        if (p->name == name) {
          if (p->arity != arity)
            throw SOError("predicate variable " + name + " used with mismatched arity");
          return pred_bound(d);
        }
        return p;
      case PredTerm::Kind::Bound: return p;
      case PredTerm::Kind::Eps: return so_eps_raw(p->name, p->arity, formula(p->body, d + 1));
      case PredTerm::Kind::Lambda: return lambda_raw(p->params, formula(p->body, d));
    }
    throw SOError("close: bad pred kind");
  }

  SOFormulaPtr formula(const SOFormulaPtr& f, unsigned d) {
    switch (f->kind) {
      case SOFormula::Kind::Atom: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, d));
        if (f->name == name) {
          if (args.size() != arity)
            throw SOError("predicate variable " + name + " used with mismatched arity");
          return pred_app(pred_bound(d), std::move(args));
        }
        return atom(f->name, std::move(args));
      }
      case SOFormula::Kind::PredApp: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, d));
        return pred_app(pred(f->head, d), std::move(args));
      }
      case SOFormula::Kind::Not: return neg(formula(f->lhs, d));
      case SOFormula::Kind::And: return conj(formula(f->lhs, d), formula(f->rhs, d));
      case SOFormula::Kind::Or: return disj(formula(f->lhs, d), formula(f->rhs, d));
      case SOFormula::Kind::Implies: return implies(formula(f->lhs, d), formula(f->rhs, d));
      case SOFormula::Kind::Exists:
      case SOFormula::Kind::Forall:
        return quant_raw(f->kind, f->name, 0, formula(f->body, d));
      case SOFormula::Kind::PredExists:
        return quant_raw(f->kind, f->name, f->arity, formula(f->body, d + 1));
    }
    throw SOError("close: bad formula kind");
  }
};

} // namespace

SOTermPtr eps(const std::string& name, const SOFormulaPtr& body) {
  std::vector<std::string> names{name};
  return eps_raw(name, CloseInd{names}.formula(body, 0));
}

PredTermPtr so_eps(const std::string& name, unsigned arity, const SOFormulaPtr& body) {
  return so_eps_raw(name, arity, ClosePred{name, arity}.formula(body, 0));
}

PredTermPtr lambda(const std::vector<std::string>& names, const SOFormulaPtr& body) {
  return lambda_raw(names, CloseInd{names}.formula(body, 0));
}

SOFormulaPtr exists(const std::string& name, const SOFormulaPtr& body) {
  std::vector<std::string> names{name};
  return quant_raw(SOFormula::Kind::Exists, name, 0, CloseInd{names}.formula(body, 0));
}
SOFormulaPtr forall(const std::string& name, const SOFormulaPtr& body) {
  std::vector<std::string> names{name};
  return quant_raw(SOFormula::Kind::Forall, name, 0, CloseInd{names}.formula(body, 0));
}
SOFormulaPtr pred_exists(const std::string& name, unsigned arity, const SOFormulaPtr& body) {
  return quant_raw(SOFormula::Kind::PredExists, name, arity,
                   ClosePred{name, arity}.formula(body, 0));
}

// ---------- alpha equivalence ----------

bool alpha_eq(const SOTermPtr& a, const SOTermPtr& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  switch (a->kind) {
    case SOTerm::Kind::Var: return a->name == b->name;
    case SOTerm::Kind::Bound: return a->index == b->index;
    case SOTerm::Kind::Fun: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_eq(a->args[i], b->args[i])) return false;
      return true;
    }
    case SOTerm::Kind::Eps: return alpha_eq(a->body, b->body);
  }
  return false;
}

bool alpha_eq(const PredTermPtr& a, const PredTermPtr& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  switch (a->kind) {
    case PredTerm::Kind::Free: return a->name == b->name && a->arity == b->arity;
    case PredTerm::Kind::Bound: return a->index == b->index;
    case PredTerm::Kind::Eps: return a->arity == b->arity && alpha_eq(a->body, b->body);
    case PredTerm::Kind::Lambda:
      return a->params.size() == b->params.size() && alpha_eq(a->body, b->body);
  }
  return false;
}

bool alpha_eq(const SOFormulaPtr& a, const SOFormulaPtr& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  switch (a->kind) {
    case SOFormula::Kind::Atom: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_eq(a->args[i], b->args[i])) return false;
      return true;
    }
    case SOFormula::Kind::PredApp: {
      if (!alpha_eq(a->head, b->head) || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_eq(a->args[i], b->args[i])) return false;
      return true;
    }
    case SOFormula::Kind::Not: return alpha_eq(a->lhs, b->lhs);
    case SOFormula::Kind::And:
    case SOFormula::Kind::Or:
    case SOFormula::Kind::Implies:
      return alpha_eq(a->lhs, b->lhs) && alpha_eq(a->rhs, b->rhs);
    case SOFormula::Kind::Exists:
    case SOFormula::Kind::Forall:
      return alpha_eq(a->body, b->body);
    case SOFormula::Kind::PredExists:
      return a->arity == b->arity && alpha_eq(a->body, b->body);
  }
  return false;
}

// ---------- dangling-reference checks ----------

namespace {

// exact=false: any reference at or above `level`; exact=true: exactly `level`.
struct Refs {
  bool pred_space;
  unsigned level;
  bool exact;

  bool term(const SOTermPtr& t, unsigned di, unsigned dp) const {
    switch (t->kind) {
      case SOTerm::Kind::Var: return false;
      case SOTerm::Kind::Bound: {
        if (pred_space || t->index < di) return false;
        unsigned rel = t->index - di;
        return exact ? rel == level : rel >= level;
      }
      case SOTerm::Kind::Fun:
        for (const auto& a : t->args)
          if (term(a, di, dp)) return true;
        return false;
      case SOTerm::Kind::Eps: return formula(t->body, di + 1, dp);
    }
    return false;
  }

  bool pred(const PredTermPtr& p, unsigned di, unsigned dp) const {
    switch (p->kind) {
      case PredTerm::Kind::Free: return false;
      case PredTerm::Kind::Bound: {
        if (!pred_space || p->index < dp) return false;
        unsigned rel = p->index - dp;
        return exact ? rel == level : rel >= level;
      }
      case PredTerm::Kind::Eps: return formula(p->body, di, dp + 1);
      case PredTerm::Kind::Lambda:
        return formula(p->body, di + static_cast<unsigned>(p->params.size()), dp);
    }
    return false;
  }

  bool formula(const SOFormulaPtr& f, unsigned di, unsigned dp) const {
    switch (f->kind) {
      case SOFormula::Kind::Atom:
        for (const auto& a : f->args)
          if (term(a, di, dp)) return true;
        return false;
      case SOFormula::Kind::PredApp: {
        if (pred(f->head, di, dp)) return true;
        for (const auto& a : f->args)
          if (term(a, di, dp)) return true;
        return false;
      }
      case SOFormula::Kind::Not: return formula(f->lhs, di, dp);
      case SOFormula::Kind::And:
      case SOFormula::Kind::Or:
      case SOFormula::Kind::Implies:
        return formula(f->lhs, di, dp) || formula(f->rhs, di, dp);
      case SOFormula::Kind::Exists:
      case SOFormula::Kind::Forall:
        return formula(f->body, di + 1, dp);
      case SOFormula::Kind::PredExists:
        return formula(f->body, di, dp + 1);
    }
    return false;
  }
};

bool dangling(const SOFormulaPtr& f) {
  return Refs{false, 0, false}.formula(f, 0, 0) || Refs{true, 0, false}.formula(f, 0, 0);
}
bool dangling(const SOTermPtr& t) {
  return Refs{false, 0, false}.term(t, 0, 0) || Refs{true, 0, false}.term(t, 0, 0);
}
bool dangling(const PredTermPtr& p) {
  return Refs{false, 0, false}.pred(p, 0, 0) || Refs{true, 0, false}.pred(p, 0, 0);
}

} // namespace

bool self_contained(const SOTermPtr& t) { return !dangling(t); }
bool self_contained(const SOFormulaPtr& f) { return !dangling(f); }
bool self_contained(const PredTermPtr& p) { return !dangling(p); }

// ---------- opening (instantiation) ----------

namespace {

// Adds `by_ind`/`by_pred` to references reaching above the subtree root, used
// when a replacement is inserted under binders.
struct Shift {
  unsigned by_ind = 0;
  unsigned by_pred = 0;

  SOTermPtr term(const SOTermPtr& t, unsigned di, unsigned dp) const {
    switch (t->kind) {
      case SOTerm::Kind::Var: return t;
      case SOTerm::Kind::Bound:
        return t->index >= di ? ibound(t->index + by_ind) : t;
      case SOTerm::Kind::Fun: {
        std::vector<SOTermPtr> args;
        for (const auto& a : t->args) args.push_back(term(a, di, dp));
        return fun(t->name, std::move(args));
      }
      case SOTerm::Kind::Eps: return eps_raw(t->name, formula(t->body, di + 1, dp));
    }
    throw SOError("shift: bad term kind");
  }

  PredTermPtr pred(const PredTermPtr& p, unsigned di, unsigned dp) const {
    switch (p->kind) {
      case PredTerm::Kind::Free: return p;
      case PredTerm::Kind::Bound:
        return p->index >= dp ? pred_bound(p->index + by_pred) : p;
      case PredTerm::Kind::Eps: return so_eps_raw(p->name, p->arity, formula(p->body, di, dp + 1));
      case PredTerm::Kind::Lambda:
        return lambda_raw(p->params,
                          formula(p->body, di + static_cast<unsigned>(p->params.size()), dp));
    }
    throw SOError("shift: bad pred kind");
  }

  SOFormulaPtr formula(const SOFormulaPtr& f, unsigned di, unsigned dp) const {
    switch (f->kind) {
      case SOFormula::Kind::Atom: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, di, dp));
        return atom(f->name, std::move(args));
      }
      case SOFormula::Kind::PredApp: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, di, dp));
        return pred_app(pred(f->head, di, dp), std::move(args));
      }
      case SOFormula::Kind::Not: return neg(formula(f->lhs, di, dp));
      case SOFormula::Kind::And: return conj(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Or: return disj(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Implies:
        return implies(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Exists:
      case SOFormula::Kind::Forall:
        return quant_raw(f->kind, f->name, 0, formula(f->body, di + 1, dp));
      case SOFormula::Kind::PredExists:
        return quant_raw(f->kind, f->name, f->arity, formula(f->body, di, dp + 1));
    }
    throw SOError("shift: bad formula kind");
  }
};

SOTermPtr shifted(const SOTermPtr& x, unsigned bi, unsigned bp) {
  return (bi == 0 && bp == 0) ? x : Shift{bi, bp}.term(x, 0, 0);
}
PredTermPtr shifted(const PredTermPtr& x, unsigned bi, unsigned bp) {
  return (bi == 0 && bp == 0) ? x : Shift{bi, bp}.pred(x, 0, 0);
}

// Replaces a block of individual binder references by the given terms (the
// arguments may reference enclosing binders; they are shifted by the binders
// crossed on the way down). Deeper references shift down by the block size.
struct OpenInd {
  const std::vector<SOTermPtr>& repl;

  SOTermPtr term(const SOTermPtr& t, unsigned di, unsigned dp) const {
    switch (t->kind) {
      case SOTerm::Kind::Var: return t;
      case SOTerm::Kind::Bound: {
        unsigned n = static_cast<unsigned>(repl.size());
        if (t->index < di) return t;
        unsigned rel = t->index - di;
        if (rel < n) return shifted(repl[n - 1 - rel], di, dp);
        return ibound(t->index - n);
      }
      case SOTerm::Kind::Fun: {
        std::vector<SOTermPtr> args;
        for (const auto& a : t->args) args.push_back(term(a, di, dp));
        return fun(t->name, std::move(args));
      }
      case SOTerm::Kind::Eps: return eps_raw(t->name, formula(t->body, di + 1, dp));
    }
    throw SOError("open: bad term kind");
  }

  PredTermPtr pred(const PredTermPtr& p, unsigned di, unsigned dp) const {
    switch (p->kind) {
      case PredTerm::Kind::Free:
      case PredTerm::Kind::Bound:
        return p;
      case PredTerm::Kind::Eps: return so_eps_raw(p->name, p->arity, formula(p->body, di, dp + 1));
      case PredTerm::Kind::Lambda:
        return lambda_raw(p->params,
                          formula(p->body, di + static_cast<unsigned>(p->params.size()), dp));
    }
    throw SOError("open: bad pred kind");
  }

  SOFormulaPtr formula(const SOFormulaPtr& f, unsigned di, unsigned dp) const {
    switch (f->kind) {
      case SOFormula::Kind::Atom: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, di, dp));
        return atom(f->name, std::move(args));
      }
      case SOFormula::Kind::PredApp: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, di, dp));
        return pred_app(pred(f->head, di, dp), std::move(args));
      }
      case SOFormula::Kind::Not: return neg(formula(f->lhs, di, dp));
      case SOFormula::Kind::And: return conj(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Or: return disj(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Implies:
        return implies(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Exists:
      case SOFormula::Kind::Forall:
        return quant_raw(f->kind, f->name, 0, formula(f->body, di + 1, dp));
      case SOFormula::Kind::PredExists:
        return quant_raw(f->kind, f->name, f->arity, formula(f->body, di, dp + 1));
    }
    throw SOError("open: bad formula kind");
  }
};

SOFormulaPtr open_ind(const SOFormulaPtr& body, const SOTermPtr& repl) {
  std::vector<SOTermPtr> r{repl};
  return OpenInd{r}.formula(body, 0, 0);
}

SOFormulaPtr open_lambda(const SOFormulaPtr& body, const std::vector<SOTermPtr>& args) {
  return OpenInd{args}.formula(body, 0, 0);
}

// Replaces predicate binder references by a predicate term.
struct OpenPred {
  const PredTermPtr& repl;

  SOTermPtr term(const SOTermPtr& t, unsigned di, unsigned dp) const {
    switch (t->kind) {
      case SOTerm::Kind::Var:
      case SOTerm::Kind::Bound:
        return t;
      case SOTerm::Kind::Fun: {
        std::vector<SOTermPtr> args;
        for (const auto& a : t->args) args.push_back(term(a, di, dp));
        return fun(t->name, std::move(args));
      }
      case SOTerm::Kind::Eps: return eps_raw(t->name, formula(t->body, di + 1, dp));
    }
    throw SOError("open: bad term kind");
  }

  PredTermPtr pred(const PredTermPtr& p, unsigned di, unsigned dp) const {
    switch (p->kind) {
      case PredTerm::Kind::Free: return p;
      case PredTerm::Kind::Bound:
        if (p->index == dp) return shifted(repl, di, dp);
        if (p->index > dp) return pred_bound(p->index - 1);
        return p;
      case PredTerm::Kind::Eps: return so_eps_raw(p->name, p->arity, formula(p->body, di, dp + 1));
      case PredTerm::Kind::Lambda:
        return lambda_raw(p->params,
                          formula(p->body, di + static_cast<unsigned>(p->params.size()), dp));
    }
    throw SOError("open: bad pred kind");
  }

  SOFormulaPtr formula(const SOFormulaPtr& f, unsigned di, unsigned dp) const {
    switch (f->kind) {
      case SOFormula::Kind::Atom: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, di, dp));
        return atom(f->name, std::move(args));
      }
      case SOFormula::Kind::PredApp: {
        std::vector<SOTermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, di, dp));
        return pred_app(pred(f->head, di, dp), std::move(args));
      }
      case SOFormula::Kind::Not: return neg(formula(f->lhs, di, dp));
      case SOFormula::Kind::And: return conj(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Or: return disj(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Implies:
        return implies(formula(f->lhs, di, dp), formula(f->rhs, di, dp));
      case SOFormula::Kind::Exists:
      case SOFormula::Kind::Forall:
        return quant_raw(f->kind, f->name, 0, formula(f->body, di + 1, dp));
      case SOFormula::Kind::PredExists:
        return quant_raw(f->kind, f->name, f->arity, formula(f->body, di, dp + 1));
    }
    throw SOError("open: bad formula kind");
  }
};

SOFormulaPtr open_pred(const SOFormulaPtr& body, const PredTermPtr& repl) {
  return OpenPred{repl}.formula(body, 0, 0);
}

} // namespace

// ---------- beta reduction ----------

SOFormulaPtr apply_lambda(const PredTermPtr& lam, const std::vector<SOTermPtr>& args) {
  if (!lam->is_lambda()) throw SOError("apply_lambda: head is not a lambda abstraction");
  if (lam->params.size() != args.size())
    throw SOError("application arity mismatch: head expects " +
                  std::to_string(lam->params.size()) + " arguments, got " +
                  std::to_string(args.size()));
  return open_lambda(lam->body, args);
}

PredTermPtr beta_reduce(const PredTermPtr& p) {
  switch (p->kind) {
    case PredTerm::Kind::Free:
    case PredTerm::Kind::Bound:
      return p;
    case PredTerm::Kind::Eps: return so_eps_raw(p->name, p->arity, beta_reduce(p->body));
    case PredTerm::Kind::Lambda: return lambda_raw(p->params, beta_reduce(p->body));
  }
  throw SOError("beta: bad pred kind");
}

SOTermPtr beta_reduce(const SOTermPtr& t) {
  switch (t->kind) {
    case SOTerm::Kind::Var:
    case SOTerm::Kind::Bound:
      return t;
    case SOTerm::Kind::Fun: {
      std::vector<SOTermPtr> args;
      for (const auto& a : t->args) args.push_back(beta_reduce(a));
      return fun(t->name, std::move(args));
    }
    case SOTerm::Kind::Eps: return eps_raw(t->name, beta_reduce(t->body));
  }
  throw SOError("beta: bad term kind");
}

SOFormulaPtr beta_reduce(const SOFormulaPtr& f) {
  switch (f->kind) {
    case SOFormula::Kind::Atom: {
      std::vector<SOTermPtr> args;
      for (const auto& a : f->args) args.push_back(beta_reduce(a));
      return atom(f->name, std::move(args));
    }
    case SOFormula::Kind::PredApp: {
      PredTermPtr head = beta_reduce(f->head);
      std::vector<SOTermPtr> args;
      for (const auto& a : f->args) args.push_back(beta_reduce(a));
      if (head->kind != PredTerm::Kind::Bound && head->get_arity() != args.size())
        throw SOError("application arity mismatch: head expects " +
                      std::to_string(head->get_arity()) + " arguments, got " +
                      std::to_string(args.size()));
      if (head->is_lambda()) return beta_reduce(open_lambda(head->body, args));
      return pred_app(head, std::move(args));
    }
    case SOFormula::Kind::Not: return neg(beta_reduce(f->lhs));
    case SOFormula::Kind::And: return conj(beta_reduce(f->lhs), beta_reduce(f->rhs));
    case SOFormula::Kind::Or: return disj(beta_reduce(f->lhs), beta_reduce(f->rhs));
    case SOFormula::Kind::Implies: return implies(beta_reduce(f->lhs), beta_reduce(f->rhs));
    case SOFormula::Kind::Exists:
    case SOFormula::Kind::Forall:
      return quant_raw(f->kind, f->name, 0, beta_reduce(f->body));
    case SOFormula::Kind::PredExists:
      return quant_raw(f->kind, f->name, f->arity, beta_reduce(f->body));
  }
  throw SOError("beta: bad formula kind");
}

// ---------- substitution ----------

SOTermPtr subst_eps_term(const SOTermPtr& host, const SOTermPtr& target, const SOTermPtr& repl) {
  if (alpha_eq(host, target)) return repl;
  switch (host->kind) {
    case SOTerm::Kind::Var:
    case SOTerm::Kind::Bound:
      return host;
    case SOTerm::Kind::Fun: {
      std::vector<SOTermPtr> args;
      for (const auto& a : host->args) args.push_back(subst_eps_term(a, target, repl));
      return fun(host->name, std::move(args));
    }
    case SOTerm::Kind::Eps:
      return eps_raw(host->name, subst_eps_term(host->body, target, repl));
  }
  throw SOError("subst: bad term kind");
}

static PredTermPtr subst_eps_term_pred(const PredTermPtr& host, const SOTermPtr& target,
                                       const SOTermPtr& repl) {
  switch (host->kind) {
    case PredTerm::Kind::Free:
    case PredTerm::Kind::Bound:
      return host;
    case PredTerm::Kind::Eps:
      return so_eps_raw(host->name, host->arity, subst_eps_term(host->body, target, repl));
    case PredTerm::Kind::Lambda:
      return lambda_raw(host->params, subst_eps_term(host->body, target, repl));
  }
  throw SOError("subst: bad pred kind");
}

SOFormulaPtr subst_eps_term(const SOFormulaPtr& host, const SOTermPtr& target, const SOTermPtr& repl) {
  switch (host->kind) {
    case SOFormula::Kind::Atom: {
      std::vector<SOTermPtr> args;
      for (const auto& a : host->args) args.push_back(subst_eps_term(a, target, repl));
      return atom(host->name, std::move(args));
    }
    case SOFormula::Kind::PredApp: {
      std::vector<SOTermPtr> args;
      for (const auto& a : host->args) args.push_back(subst_eps_term(a, target, repl));
      return pred_app(subst_eps_term_pred(host->head, target, repl), std::move(args));
    }
    case SOFormula::Kind::Not: return neg(subst_eps_term(host->lhs, target, repl));
    case SOFormula::Kind::And:
      return conj(subst_eps_term(host->lhs, target, repl), subst_eps_term(host->rhs, target, repl));
    case SOFormula::Kind::Or:
      return disj(subst_eps_term(host->lhs, target, repl), subst_eps_term(host->rhs, target, repl));
    case SOFormula::Kind::Implies:
      return implies(subst_eps_term(host->lhs, target, repl),
                     subst_eps_term(host->rhs, target, repl));
    case SOFormula::Kind::Exists:
    case SOFormula::Kind::Forall:
      return quant_raw(host->kind, host->name, 0, subst_eps_term(host->body, target, repl));
    case SOFormula::Kind::PredExists:
      return quant_raw(host->kind, host->name, host->arity,
                       subst_eps_term(host->body, target, repl));
  }
  throw SOError("subst: bad formula kind");
}

PredTermPtr subst_pred_term(const PredTermPtr& host, const PredTermPtr& target,
                            const PredTermPtr& repl) {
  if (alpha_eq(host, target)) return repl;
  switch (host->kind) {
    case PredTerm::Kind::Free:
    case PredTerm::Kind::Bound:
      return host;
    case PredTerm::Kind::Eps:
      return so_eps_raw(host->name, host->arity, subst_pred_term(host->body, target, repl));
    case PredTerm::Kind::Lambda:
      return lambda_raw(host->params, subst_pred_term(host->body, target, repl));
  }
  throw SOError("subst: bad pred kind");
}

SOTermPtr subst_pred_term(const SOTermPtr& host, const PredTermPtr& target, const PredTermPtr& repl) {
  switch (host->kind) {
    case SOTerm::Kind::Var:
    case SOTerm::Kind::Bound:
      return host;
    case SOTerm::Kind::Fun: {
      std::vector<SOTermPtr> args;
      for (const auto& a : host->args) args.push_back(subst_pred_term(a, target, repl));
      return fun(host->name, std::move(args));
    }
    case SOTerm::Kind::Eps:
      return eps_raw(host->name, subst_pred_term(host->body, target, repl));
  }
  throw SOError("subst: bad term kind");
}

SOFormulaPtr subst_pred_term(const SOFormulaPtr& host, const PredTermPtr& target,
                             const PredTermPtr& repl) {
  switch (host->kind) {
    case SOFormula::Kind::Atom: {
      std::vector<SOTermPtr> args;
      for (const auto& a : host->args) args.push_back(subst_pred_term(a, target, repl));
      return atom(host->name, std::move(args));
    }
    case SOFormula::Kind::PredApp: {
      std::vector<SOTermPtr> args;
      for (const auto& a : host->args) args.push_back(subst_pred_term(a, target, repl));
      return pred_app(subst_pred_term(host->head, target, repl), std::move(args));
    }
    case SOFormula::Kind::Not: return neg(subst_pred_term(host->lhs, target, repl));
    case SOFormula::Kind::And:
      return conj(subst_pred_term(host->lhs, target, repl),
                  subst_pred_term(host->rhs, target, repl));
    case SOFormula::Kind::Or:
      return disj(subst_pred_term(host->lhs, target, repl),
                  subst_pred_term(host->rhs, target, repl));
    case SOFormula::Kind::Implies:
      return implies(subst_pred_term(host->lhs, target, repl),
                     subst_pred_term(host->rhs, target, repl));
    case SOFormula::Kind::Exists:
    case SOFormula::Kind::Forall:
      return quant_raw(host->kind, host->name, 0, subst_pred_term(host->body, target, repl));
    case SOFormula::Kind::PredExists:
      return quant_raw(host->kind, host->name, host->arity,
                       subst_pred_term(host->body, target, repl));
  }
  throw SOError("subst: bad formula kind");
}

// ---------- embedding ----------

SOTermPtr embed(const epsub::TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return var(t->name);
    case Term::Kind::Bound: return ibound(t->index);
    case Term::Kind::Fun: {
      std::vector<SOTermPtr> args;
      for (const auto& a : t->args) args.push_back(embed(a));
      return fun(t->name, std::move(args));
    }
    case Term::Kind::Eps: return eps_raw(t->name, embed(t->body));
  }
  throw SOError("embed: bad term kind");
}

SOFormulaPtr embed(const epsub::FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::vector<SOTermPtr> args;
      for (const auto& a : f->args) args.push_back(embed(a));
      return atom(f->name, std::move(args));
    }
    case Formula::Kind::Not: return neg(embed(f->lhs));
    case Formula::Kind::And: return conj(embed(f->lhs), embed(f->rhs));
    case Formula::Kind::Or: return disj(embed(f->lhs), embed(f->rhs));
    case Formula::Kind::Implies: return implies(embed(f->lhs), embed(f->rhs));
    case Formula::Kind::Exists: return quant_raw(SOFormula::Kind::Exists, f->name, 0, embed(f->body));
    case Formula::Kind::Forall: return quant_raw(SOFormula::Kind::Forall, f->name, 0, embed(f->body));
  }
  throw SOError("embed: bad formula kind");
}

// ---------- complexity ----------

namespace {

struct EpsLike {
  SOTermPtr term;   // exactly one of term/pred is set
  PredTermPtr pred;
  unsigned ind_depth = 0;
  unsigned pred_depth = 0;
  unsigned eps_nesting = 0;
};

struct CollectEps {
  std::vector<EpsLike>& out;

  void term(const SOTermPtr& t, unsigned di, unsigned dp, unsigned nest) {
    switch (t->kind) {
      case SOTerm::Kind::Var:
      case SOTerm::Kind::Bound:
        return;
      case SOTerm::Kind::Fun:
        for (const auto& a : t->args) term(a, di, dp, nest);
        return;
      case SOTerm::Kind::Eps:
        out.push_back(EpsLike{t, nullptr, di, dp, nest});
        formula(t->body, di + 1, dp, nest + 1);
        return;
    }
  }

  void pred(const PredTermPtr& p, unsigned di, unsigned dp, unsigned nest) {
    switch (p->kind) {
      case PredTerm::Kind::Free:
      case PredTerm::Kind::Bound:
        return;
      case PredTerm::Kind::Eps:
        out.push_back(EpsLike{nullptr, p, di, dp, nest});
        formula(p->body, di, dp + 1, nest + 1);
        return;
      case PredTerm::Kind::Lambda:
        formula(p->body, di + static_cast<unsigned>(p->params.size()), dp, nest);
        return;
    }
  }

  void formula(const SOFormulaPtr& f, unsigned di, unsigned dp, unsigned nest) {
    switch (f->kind) {
      case SOFormula::Kind::Atom:
        for (const auto& a : f->args) term(a, di, dp, nest);
        return;
      case SOFormula::Kind::PredApp:
        pred(f->head, di, dp, nest);
        for (const auto& a : f->args) term(a, di, dp, nest);
        return;
      case SOFormula::Kind::Not: formula(f->lhs, di, dp, nest); return;
      case SOFormula::Kind::And:
      case SOFormula::Kind::Or:
      case SOFormula::Kind::Implies:
        formula(f->lhs, di, dp, nest);
        formula(f->rhs, di, dp, nest);
        return;
      case SOFormula::Kind::Exists:
      case SOFormula::Kind::Forall:
        formula(f->body, di + 1, dp, nest);
        return;
      case SOFormula::Kind::PredExists:
        formula(f->body, di, dp + 1, nest);
        return;
    }
  }
};

std::vector<EpsLike> eps_like_occurrences(const SOFormulaPtr& body) {
  std::vector<EpsLike> out;
  CollectEps{out}.formula(body, 0, 0, 0);
  return out;
}

bool occ_references(const EpsLike& occ, bool pred_space, unsigned level) {
  Refs r{pred_space, level, true};
  if (occ.term) return r.term(occ.term, 0, 0);
  return r.pred(occ.pred, 0, 0);
}

unsigned rank_of(const EpsLike& occ);

unsigned rank_of_body(const SOFormulaPtr& body, bool pred_owner) {
  unsigned best = 0;
  for (const auto& occ : eps_like_occurrences(body)) {
    unsigned level = pred_owner ? occ.pred_depth : occ.ind_depth;
    if (occ_references(occ, pred_owner, level)) best = std::max(best, rank_of(occ));
  }
  return 1 + best;
}

unsigned rank_of(const EpsLike& occ) {
  if (occ.term) return rank_of_body(occ.term->body, false);
  return rank_of_body(occ.pred->body, true);
}

unsigned degree_of(const EpsLike& occ);

unsigned degree_of_body(const SOFormulaPtr& body) {
  unsigned best = 0;
  for (const auto& occ : eps_like_occurrences(body))
    if (occ.eps_nesting == 0) best = std::max(best, degree_of(occ));
  return 1 + best;
}

unsigned degree_of(const EpsLike& occ) {
  return degree_of_body(occ.term ? occ.term->body : occ.pred->body);
}

} // namespace

unsigned so_rank(const SOTermPtr& e) {
  if (!e->is_eps()) throw SOError("so_rank: not an epsilon term");
  return rank_of_body(e->body, false);
}
unsigned so_rank(const PredTermPtr& e) {
  if (!e->is_eps()) throw SOError("so_rank: not a second-order epsilon term");
  return rank_of_body(e->body, true);
}
unsigned so_degree(const SOTermPtr& e) {
  if (!e->is_eps()) throw SOError("so_degree: not an epsilon term");
  return degree_of_body(e->body);
}
unsigned so_degree(const PredTermPtr& e) {
  if (!e->is_eps()) throw SOError("so_degree: not a second-order epsilon term");
  return degree_of_body(e->body);
}
Complexity so_complexity(const SOTermPtr& e) { return Complexity{so_rank(e), so_degree(e)}; }
Complexity so_complexity(const PredTermPtr& e) { return Complexity{so_rank(e), so_degree(e)}; }

// ---------- systems ----------

SOCriticalFormula make_critical_ind(const std::string& var_name,
                                    const SOFormulaPtr& body_with_free_var,
                                    const SOTermPtr& witness) {
  auto e = eps(var_name, body_with_free_var);
  auto f = implies(beta_reduce(open_ind(e->body, witness)), beta_reduce(open_ind(e->body, e)));
  return SOCriticalFormula{f, IndOwner{e, witness}};
}

SOCriticalFormula make_critical_pred(const std::string& pred_name, unsigned arity,
                                     const SOFormulaPtr& body_with_free_pred,
                                     const PredTermPtr& witness) {
  if (witness->get_arity() != arity)
    throw SOError("witness arity " + std::to_string(witness->get_arity()) +
                  " does not match the bound predicate variable arity " + std::to_string(arity));
  auto e = so_eps(pred_name, arity, body_with_free_pred);
  auto f =
      implies(beta_reduce(open_pred(e->body, witness)), beta_reduce(open_pred(e->body, e)));
  return SOCriticalFormula{f, PredOwner{e, witness}};
}

bool validate(const SOCriticalFormula& cf) {
  if (const auto* o = std::get_if<IndOwner>(&cf.owner)) {
    if (!o->epsilon->is_eps()) return false;
    auto want = implies(beta_reduce(open_ind(o->epsilon->body, o->witness)),
                        beta_reduce(open_ind(o->epsilon->body, o->epsilon)));
    return alpha_eq(cf.formula, want);
  }
  const auto& o = std::get<PredOwner>(cf.owner);
  if (!o.epsilon->is_eps()) return false;
  auto want = implies(beta_reduce(open_pred(o.epsilon->body, o.witness)),
                      beta_reduce(open_pred(o.epsilon->body, o.epsilon)));
  return alpha_eq(cf.formula, want);
}

namespace {

void so_push_dedup(SOSystem& sys, SOCriticalFormula cf) {
  for (const auto& m : sys.members)
    if (alpha_eq(m.formula, cf.formula)) return;
  sys.members.push_back(std::move(cf));
}

bool owner_matches(const SOCriticalFormula& m, const SOOwnerRef& e) {
  if (const auto* t = std::get_if<SOTermPtr>(&e)) {
    const auto* o = std::get_if<IndOwner>(&m.owner);
    return o && alpha_eq(o->epsilon, *t);
  }
  const auto& p = std::get<PredTermPtr>(e);
  const auto* o = std::get_if<PredOwner>(&m.owner);
  return o && alpha_eq(o->epsilon, p);
}

SOCriticalFormula transform_member(const SOCriticalFormula& m, const SOOwnerRef& e,
                                   const SOOwnerRef& w) {
  SOCriticalFormula out = m;
  if (const auto* t = std::get_if<SOTermPtr>(&e)) {
    const auto& wt = std::get<SOTermPtr>(w);
    out.formula = beta_reduce(subst_eps_term(m.formula, *t, wt));
    if (const auto* io = std::get_if<IndOwner>(&m.owner)) {
      out.owner = IndOwner{beta_reduce(subst_eps_term(io->epsilon, *t, wt)),
                           beta_reduce(subst_eps_term(io->witness, *t, wt))};
    } else {
      const auto& po = std::get<PredOwner>(m.owner);
      out.owner = PredOwner{beta_reduce(subst_eps_term_pred(po.epsilon, *t, wt)),
                            beta_reduce(subst_eps_term_pred(po.witness, *t, wt))};
    }
  } else {
    const auto& p = std::get<PredTermPtr>(e);
    const auto& wp = std::get<PredTermPtr>(w);
    out.formula = beta_reduce(subst_pred_term(m.formula, p, wp));
    if (const auto* io = std::get_if<IndOwner>(&m.owner)) {
      out.owner = IndOwner{beta_reduce(subst_pred_term(io->epsilon, p, wp)),
                           beta_reduce(subst_pred_term(io->witness, p, wp))};
    } else {
      const auto& po = std::get<PredOwner>(m.owner);
      out.owner = PredOwner{beta_reduce(subst_pred_term(po.epsilon, p, wp)),
                            beta_reduce(subst_pred_term(po.witness, p, wp))};
    }
  }
  return out;
}

std::string owner_str(const SOOwnerRef& e) {
  if (const auto* t = std::get_if<SOTermPtr>(&e)) return to_string(*t);
  return to_string(std::get<PredTermPtr>(e));
}

} // namespace

std::vector<SOBranch> so_principal_step(const SOSystem& system, const SOOwnerRef& e, Mode mode) {
  SOSystem remainder;
  std::vector<SOOwnerRef> witnesses;
  bool owns = false;
  for (const auto& m : system.members) {
    if (owner_matches(m, e)) {
      owns = true;
      SOOwnerRef w = m.predicate_owner() ? SOOwnerRef{std::get<PredOwner>(m.owner).witness}
                                         : SOOwnerRef{std::get<IndOwner>(m.owner).witness};
      bool seen = false;
      for (const auto& x : witnesses) {
        if (x.index() == w.index() &&
            ((x.index() == 0 && alpha_eq(std::get<0>(x), std::get<0>(w))) ||
             (x.index() == 1 && alpha_eq(std::get<1>(x), std::get<1>(w)))))
          seen = true;
      }
      if (!seen) witnesses.push_back(std::move(w));
    } else {
      remainder.members.push_back(m);
    }
  }
  if (!owns)
    throw SOError("so_principal_step: " + owner_str(e) + " owns no formula in the system");

  std::vector<SOBranch> out;
  SOBranch keep;
  keep.keep = true;
  keep.label = "keep";
  keep.system = remainder;
  out.push_back(std::move(keep));

  for (const auto& w : witnesses) {
    SOBranch b;
    b.label = owner_str(w);
    for (const auto& m : remainder.members) {
      SOCriticalFormula nm = transform_member(m, e, w);
      if (!validate(nm)) {
        if (mode == Mode::Strict)
          throw DestroyedError(nullptr, b.label, to_string(nm.formula));
        b.destroyed.push_back(nm.formula);
        continue;
      }
      so_push_dedup(b.system, std::move(nm));
    }
    out.push_back(std::move(b));
  }
  return out;
}

SystemMeasure so_measure(const SOSystem& system) {
  std::vector<SOOwnerRef> owners;
  SystemMeasure out;
  for (const auto& m : system.members) {
    SOOwnerRef o = m.predicate_owner() ? SOOwnerRef{std::get<PredOwner>(m.owner).epsilon}
                                       : SOOwnerRef{std::get<IndOwner>(m.owner).epsilon};
    bool seen = false;
    for (const auto& x : owners) {
      if (x.index() == o.index() &&
          ((x.index() == 0 && alpha_eq(std::get<0>(x), std::get<0>(o))) ||
           (x.index() == 1 && alpha_eq(std::get<1>(x), std::get<1>(o)))))
        seen = true;
    }
    if (seen) continue;
    owners.push_back(o);
    out.entries.push_back(o.index() == 0 ? so_complexity(std::get<0>(o))
                                         : so_complexity(std::get<1>(o)));
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const Complexity& a, const Complexity& b) { return b < a; });
  return out;
}

ComplexityReport complexity_report(const SOSystem& parent, const std::vector<SOBranch>& children) {
  ComplexityReport rep;
  rep.parent = so_measure(parent);
  for (const auto& b : children) {
    BranchReport br;
    br.label = b.label;
    br.measure = so_measure(b.system);
    br.smaller = measure_less(br.measure, rep.parent);
    if (!br.smaller) rep.any_not_smaller = true;
    rep.branches.push_back(std::move(br));
  }
  return rep;
}

// ---------- printing ----------

namespace {

struct SOPrinter {
  std::vector<std::string> ienv; // individual binder names, outermost first
  std::vector<std::string> penv; // predicate binder names

  std::string iname(unsigned index) const {
    if (index < ienv.size()) return ienv[ienv.size() - 1 - index];
    return "$" + std::to_string(index - ienv.size());
  }
  std::string pname(unsigned index) const {
    if (index < penv.size()) return penv[penv.size() - 1 - index];
    return "$P" + std::to_string(index - penv.size());
  }

  void term(std::ostringstream& os, const SOTermPtr& t) {
    switch (t->kind) {
      case SOTerm::Kind::Var: os << t->name; return;
      case SOTerm::Kind::Bound: os << iname(t->index); return;
      case SOTerm::Kind::Fun:
        os << t->name;
        if (!t->args.empty()) {
          os << "(";
          for (std::size_t i = 0; i < t->args.size(); ++i) {
            if (i) os << ", ";
            term(os, t->args[i]);
          }
          os << ")";
        }
        return;
      case SOTerm::Kind::Eps:
        os << "eps " << t->name << ". ";
        ienv.push_back(t->name);
        formula(os, t->body, 0);
        ienv.pop_back();
        return;
    }
  }

  void pred(std::ostringstream& os, const PredTermPtr& p) {
    switch (p->kind) {
      case PredTerm::Kind::Free: os << p->name; return;
      case PredTerm::Kind::Bound: os << pname(p->index); return;
      case PredTerm::Kind::Eps:
        os << "(EPS " << p->name << ". ";
        penv.push_back(p->name);
        formula(os, p->body, 0);
        penv.pop_back();
        os << ")";
        return;
      case PredTerm::Kind::Lambda: {
        os << "(lam";
        for (const auto& n : p->params) os << " " << n;
        os << ". ";
        for (const auto& n : p->params) ienv.push_back(n);
        formula(os, p->body, 0);
        for (std::size_t i = 0; i < p->params.size(); ++i) ienv.pop_back();
        os << ")";
        return;
      }
    }
  }

  void formula(std::ostringstream& os, const SOFormulaPtr& f, int prec) {
    switch (f->kind) {
      case SOFormula::Kind::Atom:
      case SOFormula::Kind::PredApp:
        if (f->kind == SOFormula::Kind::Atom) os << f->name;
        else pred(os, f->head);
        if (!f->args.empty()) {
          os << "(";
          for (std::size_t i = 0; i < f->args.size(); ++i) {
            if (i) os << ", ";
            term(os, f->args[i]);
          }
          os << ")";
        }
        return;
      case SOFormula::Kind::Not:
        os << "~";
        formula(os, f->lhs, 4);
        return;
      case SOFormula::Kind::And:
      case SOFormula::Kind::Or: {
        int p = f->kind == SOFormula::Kind::And ? 3 : 2;
        bool paren = prec > p;
        if (paren) os << "(";
        formula(os, f->lhs, p);
        os << (f->kind == SOFormula::Kind::And ? " & " : " | ");
        formula(os, f->rhs, p + 1);
        if (paren) os << ")";
        return;
      }
      case SOFormula::Kind::Implies: {
        bool paren = prec > 1;
        if (paren) os << "(";
        formula(os, f->lhs, 2);
        os << " -> ";
        formula(os, f->rhs, 1);
        if (paren) os << ")";
        return;
      }
      case SOFormula::Kind::Exists:
      case SOFormula::Kind::Forall: {
        bool paren = prec > 1;
        if (paren) os << "(";
        os << (f->kind == SOFormula::Kind::Exists ? "exists " : "forall ") << f->name << ". ";
        ienv.push_back(f->name);
        formula(os, f->body, 0);
        ienv.pop_back();
        if (paren) os << ")";
        return;
      }
      case SOFormula::Kind::PredExists: {
        bool paren = prec > 1;
        if (paren) os << "(";
        os << "existsP " << f->name << ". ";
        penv.push_back(f->name);
        formula(os, f->body, 0);
        penv.pop_back();
        if (paren) os << ")";
        return;
      }
    }
  }
};

} // namespace

std::string to_string(const SOTermPtr& t) {
  SOPrinter p;
  std::ostringstream os;
  p.term(os, t);
  return os.str();
}
std::string to_string(const SOFormulaPtr& f) {
  SOPrinter p;
  std::ostringstream os;
  p.formula(os, f, 0);
  return os.str();
}
std::string to_string(const PredTermPtr& p) {
  SOPrinter pr;
  std::ostringstream os;
  pr.pred(os, p);
  return os.str();
}

// ---------- parsing ----------

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

class SoParser {
public:
  SoParser(const std::string& text, ParseContext& ctx) : lex_(text), ctx_(ctx) {}

  SOFormulaPtr formula_entry() {
    auto f = formula();
    lex_.expect(Tok::End, "end of input");
    return f;
  }
  SOTermPtr term_entry() {
    auto t = term();
    lex_.expect(Tok::End, "end of input");
    return t;
  }
  PredTermPtr pred_entry() {
    auto p = pred_term();
    lex_.expect(Tok::End, "end of input");
    return p;
  }

private:
  Lexer lex_;
  ParseContext& ctx_;
  std::vector<std::string> ibinders_;
  struct PredBinder {
    std::string name;
    std::optional<unsigned> arity;
  };
  std::vector<PredBinder> pbinders_;
  std::set<std::string> warned_;

  void declare_symbol(std::map<std::string, unsigned>& table, const Token& name, unsigned arity,
                      const char* what) {
    auto it = table.find(name.text);
    if (it == table.end()) {
      table.emplace(name.text, arity);
    } else if (it->second != arity) {
      throw ParseError(std::string(what) + " '" + name.text + "' used with arity " +
                           std::to_string(arity) + " but declared with arity " +
                           std::to_string(it->second),
                       name.pos);
    }
  }

  int pred_binder_index(const std::string& name) {
    for (std::size_t k = 0; k < pbinders_.size(); ++k) {
      std::size_t i = pbinders_.size() - 1 - k;
      if (pbinders_[i].name == name) return static_cast<int>(k);
    }
    return -1;
  }

  void fix_pred_arity(int depth_index, unsigned arity, const Token& where) {
    auto& b = pbinders_[pbinders_.size() - 1 - depth_index];
    if (!b.arity) {
      b.arity = arity;
    } else if (*b.arity != arity) {
      throw ParseError("predicate variable '" + b.name + "' used with arity " +
                           std::to_string(arity) + " but previously with arity " +
                           std::to_string(*b.arity),
                       where.pos);
    }
  }

  SOFormulaPtr formula() { return implication(); }

  SOFormulaPtr implication() {
    auto lhs = or_chain();
    if (lex_.accept(Tok::Arrow)) return implies(lhs, implication());
    return lhs;
  }
  SOFormulaPtr or_chain() {
    auto f = and_chain();
    while (lex_.accept(Tok::Pipe)) f = disj(f, and_chain());
    return f;
  }
  SOFormulaPtr and_chain() {
    auto f = negation();
    while (lex_.accept(Tok::Amp)) f = conj(f, negation());
    return f;
  }
  SOFormulaPtr negation() {
    if (lex_.accept(Tok::Tilde)) return neg(negation());
    return primary();
  }

  std::vector<SOTermPtr> arg_list() {
    std::vector<SOTermPtr> args;
    args.push_back(term());
    while (lex_.accept(Tok::Comma)) args.push_back(term());
    lex_.expect(Tok::RParen, "')'");
    return args;
  }

  SOFormulaPtr primary() {
    if (lex_.at(Tok::LParen)) {
      // (EPS X. F)(args) / (lam x. F)(args) or a parenthesized formula
      if (lex_.peek(1).kind == Tok::KwEPS || lex_.peek(1).kind == Tok::KwLam) {
        Token open = lex_.next();
        auto head = pred_term();
        lex_.expect(Tok::RParen, "')'");
        if (!lex_.accept(Tok::LParen)) {
          if (head->get_arity() == 0) return pred_app(head, {});
          throw ParseError("a predicate term must be applied to arguments", open.pos);
        }
        auto args = arg_list();
        if (head->get_arity() != args.size())
          throw ParseError("application expects " + std::to_string(head->get_arity()) +
                               " arguments, got " + std::to_string(args.size()),
                           open.pos);
        return pred_app(head, std::move(args));
      }
      lex_.next();
      auto f = formula();
      lex_.expect(Tok::RParen, "')'");
      return f;
    }
    if (lex_.at(Tok::KwExists) || lex_.at(Tok::KwForall)) {
      bool ex = lex_.next().kind == Tok::KwExists;
      Token v = lex_.expect(Tok::Ident, "bound variable");
      lex_.expect(Tok::Dot, "'.'");
      ibinders_.push_back(v.text);
      auto body = formula();
      ibinders_.pop_back();
      return quant_raw(ex ? SOFormula::Kind::Exists : SOFormula::Kind::Forall, v.text, 0, body);
    }
    if (lex_.at(Tok::Ident)) {
      Token name = lex_.next();
      int pidx = pred_binder_index(name.text);
      std::vector<SOTermPtr> args;
      if (lex_.accept(Tok::LParen)) args = arg_list();
      if (pidx >= 0) {
        fix_pred_arity(pidx, static_cast<unsigned>(args.size()), name);
        return pred_app(pred_bound(static_cast<unsigned>(pidx)), std::move(args));
      }
      declare_symbol(ctx_.symbols.predicates, name, static_cast<unsigned>(args.size()),
                     "predicate");
      return atom(name.text, std::move(args));
    }
    throw ParseError("expected a formula, found '" + Lexer::describe(lex_.peek()) + "'",
                     lex_.peek().pos);
  }

  PredTermPtr pred_term() {
    if (lex_.accept(Tok::KwEPS)) {
      Token v = lex_.expect(Tok::Ident, "bound predicate variable");
      lex_.expect(Tok::Dot, "'.'");
      pbinders_.push_back(PredBinder{v.text, std::nullopt});
      auto body = formula();
      unsigned arity = pbinders_.back().arity.value_or(0);
      pbinders_.pop_back();
      return so_eps_raw(v.text, arity, body);
    }
    if (lex_.accept(Tok::KwLam)) {
      std::vector<std::string> params;
      while (lex_.at(Tok::Ident)) params.push_back(lex_.next().text);
      if (params.empty())
        throw ParseError("lambda abstraction needs at least one variable", lex_.peek().pos);
      lex_.expect(Tok::Dot, "'.'");
      for (const auto& p : params) ibinders_.push_back(p);
      auto body = formula();
      for (std::size_t i = 0; i < params.size(); ++i) ibinders_.pop_back();
      return lambda_raw(std::move(params), body);
    }
    throw ParseError("expected 'EPS' or 'lam', found '" + Lexer::describe(lex_.peek()) + "'",
                     lex_.peek().pos);
  }

  SOTermPtr term() {
    if (lex_.at(Tok::Number)) return fun(lex_.next().text, {});
    if (lex_.at(Tok::KwEps)) {
      lex_.next();
      Token v = lex_.expect(Tok::Ident, "bound variable");
      lex_.expect(Tok::Dot, "'.'");
      ibinders_.push_back(v.text);
      auto body = formula();
      ibinders_.pop_back();
      return eps_raw(v.text, body);
    }
    if (lex_.accept(Tok::LParen)) {
      auto t = term();
      lex_.expect(Tok::RParen, "')'");
      return t;
    }
    if (lex_.at(Tok::Ident)) {
      Token name = lex_.next();
      if (lex_.accept(Tok::LParen)) {
        std::vector<SOTermPtr> args = arg_list();
        declare_symbol(ctx_.symbols.functions, name, static_cast<unsigned>(args.size()),
                       "function");
        return fun(name.text, std::move(args));
      }
      for (std::size_t k = 0; k < ibinders_.size(); ++k) {
        std::size_t i = ibinders_.size() - 1 - k;
        if (ibinders_[i] == name.text) return ibound(static_cast<unsigned>(k));
      }
      if (warned_.insert(name.text).second)
        ctx_.warnings.push_back(Warning{name.pos, "free variable '" + name.text + "'"});
      return var(name.text);
    }
    throw ParseError("expected a term, found '" + Lexer::describe(lex_.peek()) + "'",
                     lex_.peek().pos);
  }
};

} // namespace

SOFormulaPtr parse_so_formula(const std::string& text, ParseContext* ctx) {
  ParseContext local;
  SoParser p(text, ctx ? *ctx : local);
  return p.formula_entry();
}

PredTermPtr parse_pred_term(const std::string& text, ParseContext* ctx) {
  ParseContext local;
  SoParser p(text, ctx ? *ctx : local);
  return p.pred_entry();
}

SOTermPtr parse_so_term(const std::string& text, ParseContext* ctx) {
  ParseContext local;
  SoParser p(text, ctx ? *ctx : local);
  return p.term_entry();
}

} // namespace epsub::so
