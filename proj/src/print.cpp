#include "epsub/print.hpp"

#include <sstream>

namespace epsub {

namespace {

// Precedence levels: -> is 1 (right assoc), | is 2, & is 3 (both left assoc),
// ~ is 4. Quantifier bodies extend maximally to the right, so a quantifier is
// parenthesized anywhere but implication-rhs/top-level position.

struct Printer {
  std::vector<std::string> env; // binder display names, outermost first
  bool canonical = false;

  std::string bound_name(unsigned index) const {
    if (index < env.size()) return env[env.size() - 1 - index];
    // dangling reference: diagnostics-only rendering
    return "$" + std::to_string(index - env.size());
  }

  std::string pick_name(const std::string& hint, const FormulaPtr& body) {
    if (canonical) return "#" + std::to_string(env.size());
    std::string base = hint.empty() ? "x" : hint;
    auto taken = [&](const std::string& cand) {
      if (free_vars(body).count(cand)) return true;
      for (std::size_t k = 0; k < env.size(); ++k) {
        if (env[env.size() - 1 - k] == cand && references_level(body, static_cast<unsigned>(k) + 1))
          return true;
      }
      return false;
    };
    std::string cand = base;
    for (int i = 2; taken(cand); ++i) cand = base + "_" + std::to_string(i);
    return cand;
  }

  void term(std::ostringstream& os, const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Var:
        os << t->name;
        return;
      case Term::Kind::Bound:
        os << bound_name(t->index);
        return;
      case Term::Kind::Fun:
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
      case Term::Kind::Eps: {
        std::string n = pick_name(t->name, t->body);
        os << "eps " << n << ". ";
        env.push_back(n);
        formula(os, t->body, 0);
        env.pop_back();
        return;
      }
    }
  }

  void atom_like(std::ostringstream& os, const FormulaPtr& f) {
    os << f->name;
    if (!f->args.empty()) {
      os << "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) os << ", ";
        term(os, f->args[i]);
      }
      os << ")";
    }
  }

  void formula(std::ostringstream& os, const FormulaPtr& f, int prec) {
    switch (f->kind) {
      case Formula::Kind::Atom:
        atom_like(os, f);
        return;
      case Formula::Kind::Not:
        os << "~";
        formula(os, f->lhs, 4);
        return;
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        int p = f->kind == Formula::Kind::And ? 3 : 2;
        const char* op = f->kind == Formula::Kind::And ? " & " : " | ";
        bool paren = prec > p;
        if (paren) os << "(";
        formula(os, f->lhs, p);
        os << op;
        formula(os, f->rhs, p + 1);
        if (paren) os << ")";
        return;
      }
      case Formula::Kind::Implies: {
        bool paren = prec > 1;
        if (paren) os << "(";
        formula(os, f->lhs, 2);
        os << " -> ";
        formula(os, f->rhs, 1);
        if (paren) os << ")";
        return;
      }
      case Formula::Kind::Exists:
      case Formula::Kind::Forall: {
        bool paren = prec > 1;
        if (paren) os << "(";
        std::string n = pick_name(f->name, f->body);
        os << (f->kind == Formula::Kind::Exists ? "exists " : "forall ") << n << ". ";
        env.push_back(n);
        formula(os, f->body, 0);
        env.pop_back();
        if (paren) os << ")";
        return;
      }
    }
  }
};

std::string render_term(const TermPtr& t, bool canonical) {
  Printer p;
  p.canonical = canonical;
  std::ostringstream os;
  p.term(os, t);
  return os.str();
}

std::string render_formula(const FormulaPtr& f, bool canonical) {
  Printer p;
  p.canonical = canonical;
  std::ostringstream os;
  p.formula(os, f, 0);
  return os.str();
}

} // namespace

std::string to_string(const TermPtr& t) { return render_term(t, false); }
std::string to_string(const FormulaPtr& f) { return render_formula(f, false); }
std::string canonical_str(const TermPtr& t) { return render_term(t, true); }
std::string canonical_str(const FormulaPtr& f) { return render_formula(f, true); }

} // namespace epsub
