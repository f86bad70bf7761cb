#include "doctest.h"

#include "epsub/demos.hpp"
#include "epsub/print.hpp"
#include "epsub/second_order.hpp"

#include "support/gen.hpp"

#include <functional>
#include <random>

using namespace epsub;
using namespace epsub::so;

TEST_CASE("beta_reduce: single redex, normal input, predicate quantifier body") {
  // (lam x. Q(x, c))(d) -> Q(d, c)
  auto lam = parse_pred_term("lam x. Q(x, c)");
  auto app = pred_app(lam, {so::var("d")});
  CHECK(alpha_eq(beta_reduce(app), parse_so_formula("Q(d, c)")));

  auto normal = parse_so_formula("Q(d, c) & R(d)");
  CHECK(alpha_eq(beta_reduce(normal), normal));

  // (lam x. existsP Y. Y(x))(c) -> existsP Y. Y(c)
  auto body = pred_exists("Y", 1, pred_app(pred_free("Y", 1), {so::var("x")}));
  auto lam2 = lambda({"x"}, body);
  auto red = beta_reduce(pred_app(lam2, {so::var("c")}));
  auto want = pred_exists("Y", 1, pred_app(pred_free("Y", 1), {so::var("c")}));
  CHECK(alpha_eq(red, want));
}

TEST_CASE("beta_reduce: arity mismatch raises") {
  auto lam = parse_pred_term("lam x y. Q(x, y)");
  CHECK_THROWS_AS(beta_reduce(pred_app(lam, {so::var("c")})), SOError);
}

namespace {

// Contracts exactly one redex per pass, outermost-leftmost first, with the
// arguments *not* pre-reduced -- a genuinely different reduction order.
SOFormulaPtr contract_one(const SOFormulaPtr& f, bool& changed);

PredTermPtr contract_one(const PredTermPtr& p, bool& changed) {
  if (changed) return p;
  switch (p->kind) {
    case PredTerm::Kind::Free:
    case PredTerm::Kind::Bound:
      return p;
    case PredTerm::Kind::Eps: {
      auto b = contract_one(p->body, changed);
      return changed ? so_eps_raw(p->name, p->arity, b) : p;
    }
    case PredTerm::Kind::Lambda: {
      auto b = contract_one(p->body, changed);
      return changed ? lambda_raw(p->params, b) : p;
    }
  }
  return p;
}

SOTermPtr contract_one(const SOTermPtr& t, bool& changed) {
  if (changed) return t;
  switch (t->kind) {
    case SOTerm::Kind::Var:
    case SOTerm::Kind::Bound:
      return t;
    case SOTerm::Kind::Fun: {
      std::vector<SOTermPtr> args;
      bool any = false;
      for (const auto& a : t->args) {
        auto na = contract_one(a, changed);
        any = any || na != a;
        args.push_back(na);
      }
      return any ? so::fun(t->name, std::move(args)) : t;
    }
    case SOTerm::Kind::Eps: {
      auto b = contract_one(t->body, changed);
      return changed ? so::eps_raw(t->name, b) : t;
    }
  }
  return t;
}

SOFormulaPtr contract_one(const SOFormulaPtr& f, bool& changed) {
  if (changed) return f;
  switch (f->kind) {
    case SOFormula::Kind::Atom: {
      std::vector<SOTermPtr> args;
      bool any = false;
      for (const auto& a : f->args) {
        auto na = contract_one(a, changed);
        any = any || na != a;
        args.push_back(na);
      }
      return any ? so::atom(f->name, std::move(args)) : f;
    }
    case SOFormula::Kind::PredApp: {
      if (f->head->is_lambda()) {
        changed = true;
        std::vector<SOTermPtr> args(f->args.begin(), f->args.end());
        return apply_lambda(f->head, args); // raw contraction, arguments untouched
      }
      auto h = contract_one(f->head, changed);
      if (changed) return pred_app(h, f->args);
      std::vector<SOTermPtr> args;
      bool any = false;
      for (const auto& a : f->args) {
        auto na = contract_one(a, changed);
        any = any || na != a;
        args.push_back(na);
      }
      return any ? pred_app(f->head, std::move(args)) : f;
    }
    case SOFormula::Kind::Not: {
      auto l = contract_one(f->lhs, changed);
      return changed ? so::neg(l) : f;
    }
    case SOFormula::Kind::And:
    case SOFormula::Kind::Or:
    case SOFormula::Kind::Implies: {
      auto l = contract_one(f->lhs, changed);
      auto r = contract_one(f->rhs, changed);
      if (l == f->lhs && r == f->rhs) return f;
      if (f->kind == SOFormula::Kind::And) return so::conj(l, r);
      if (f->kind == SOFormula::Kind::Or) return so::disj(l, r);
      return so::implies(l, r);
    }
    case SOFormula::Kind::Exists: {
      auto b = contract_one(f->body, changed);
      return changed ? so::exists(f->name, b) : f; // hint-only rebuild is fine here
    }
    case SOFormula::Kind::Forall: {
      auto b = contract_one(f->body, changed);
      return changed ? so::forall(f->name, b) : f;
    }
    case SOFormula::Kind::PredExists: {
      auto b = contract_one(f->body, changed);
      return changed ? pred_exists(f->name, f->arity, b) : f;
    }
  }
  return f;
}

SOFormulaPtr outermost_normalize(SOFormulaPtr f) {
  for (int guard = 0; guard < 500; ++guard) {
    bool changed = false;
    f = contract_one(f, changed);
    if (!changed) return f;
  }
  throw std::runtime_error("no normal form within the step guard");
}

} // namespace

TEST_CASE("beta confluence at desk scale: reduction order does not matter") {
  std::mt19937_64 rng(7);
  auto pick = [&](unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng); };

  // random small formulas with nested applications
  std::function<SOFormulaPtr(unsigned)> gen = [&](unsigned depth) -> SOFormulaPtr {
    if (depth == 0 || pick(3) == 0) {
      switch (pick(3)) {
        case 0: return parse_so_formula("P(c)");
        case 1: return pred_app(lambda({"x"}, so::atom("Q", {so::var("x"), so::var("c")})),
                                {so::fun(std::to_string(pick(2)), {})});
        default: return so::atom("R", {so::var("d")});
      }
    }
    switch (pick(4)) {
      case 0: return so::neg(gen(depth - 1));
      case 1: return so::conj(gen(depth - 1), gen(depth - 1));
      case 2: return so::implies(gen(depth - 1), gen(depth - 1));
      default: {
        // apply a lambda whose body embeds a generated formula
        auto body = so::conj(so::atom("P", {so::var("x")}), gen(depth - 1));
        return pred_app(lambda({"x"}, body), {so::var("c")});
      }
    }
  };

  for (int i = 0; i < 200; ++i) {
    auto f = gen(3);
    auto a = beta_reduce(f);
    auto b = outermost_normalize(f);
    CAPTURE(to_string(f));
    CHECK(alpha_eq(a, b));
  }
}

TEST_CASE("embedding is lossless and preserves alpha equivalence") {
  test::Gen g(13);
  for (int i = 0; i < 200; ++i) {
    auto f = g.formula(3);
    auto e1 = embed(f);
    auto e2 = embed(parse_formula(epsub::to_string(f)));
    CHECK(alpha_eq(e1, e2));
  }
}

TEST_CASE("so complexity agrees with first-order complexity on embedded terms") {
  test::Gen g(37);
  int seen = 0;
  for (int i = 0; i < 300; ++i) {
    auto t = g.term(4);
    if (!t->is_eps()) continue;
    ++seen;
    auto et = embed(t);
    CHECK(so_rank(et) == rank(t));
    CHECK(so_degree(et) == degree(t));
  }
  CHECK(seen > 40);
}

TEST_CASE("so parser: grammar extensions") {
  auto om = parse_pred_term("EPS X. ( X(c) & (EPS Y. ( Y(c) & X(c) ))(c) )");
  CHECK(om->is_eps());
  CHECK(om->arity == 1);
  CHECK(so_rank(om) == 2);
  CHECK(so_degree(om) == 2);

  auto lam = parse_pred_term("lam x y. Q(x, y)");
  CHECK(lam->is_lambda());
  CHECK(lam->get_arity() == 2);

  // the lambda argument order: (lam x y. Q(x,y))(a, b) -> Q(a, b)
  auto red = beta_reduce(pred_app(lam, {so::var("a"), so::var("b")}));
  CHECK(alpha_eq(red, parse_so_formula("Q(a, b)")));

  CHECK_THROWS_AS(parse_so_formula("(EPS X. X(c) & X(c, d))(c)"), ParseError);
  CHECK_THROWS_AS(epsub::parse_formula("EPS X. X(c)"), ParseError); // not first-order syntax
}

TEST_CASE("make/validate second-order critical formulas") {
  auto witness = parse_pred_term("lam x. Q(x, c)");
  auto cf = make_critical_pred("X", 1, parse_so_formula("X(d)"), witness);
  // antecedent is beta-reduced: Q(d, c)
  CHECK(alpha_eq(cf.formula->lhs, parse_so_formula("Q(d, c)")));
  CHECK(validate(cf));

  auto ind = make_critical_ind("y", parse_so_formula("R(y)"), so::var("d"));
  CHECK(validate(ind));
  CHECK(alpha_eq(ind.formula->lhs, parse_so_formula("R(d)")));

  CHECK_THROWS_AS(make_critical_pred("X", 2, parse_so_formula("X(c, d)"),
                                     parse_pred_term("lam x. P(x)")),
                  SOError);
}

TEST_CASE("so_principal_step mirrors the first-order step structure") {
  // single SO critical formula plus eps-free remainder
  auto witness = parse_pred_term("lam x. Q(x, c)");
  auto f1 = make_critical_pred("X", 1, parse_so_formula("X(d)"), witness);
  auto f2 = make_critical_ind("y", parse_so_formula("R(y)"), so::var("d"));
  SOSystem sys;
  sys.members = {f1, f2};

  auto branches = so_principal_step(sys, SOOwnerRef{std::get<PredOwner>(f1.owner).epsilon});
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].keep);
  REQUIRE(branches[0].system.size() == 1);
  REQUIRE(branches[1].system.size() == 1);
  // the remainder does not mention the SO term, so both branches agree
  CHECK(alpha_eq(branches[0].system.members[0].formula, branches[1].system.members[0].formula));

  // empty remainder: all branches empty
  SOSystem solo;
  solo.members = {f1};
  auto b2 = so_principal_step(solo, SOOwnerRef{std::get<PredOwner>(f1.owner).epsilon});
  for (const auto& b : b2) CHECK(b.system.empty());
}

TEST_CASE("so_principal_step agrees with the first-order engine on embedded systems") {
  test::Gen g(2718);
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    SystemE E;
    try {
      E = build_system(g.system_formulas());
    } catch (const NotCriticalError&) {
      continue;
    }
    if (E.empty()) continue;
    ++compared;

    // embed with the tracked decompositions
    SOSystem S;
    for (const auto& m : E.members) {
      SOCriticalFormula cf{embed(m.cf.formula),
                           IndOwner{embed(m.cf.epsilon_term), embed(m.cf.witness)}};
      REQUIRE(validate(cf));
      S.members.push_back(std::move(cf));
    }

    auto e = select_maximal(E);
    auto fo = principal_step(E, e, Mode::Permissive);
    auto so_branches = so_principal_step(S, SOOwnerRef{embed(e)}, Mode::Permissive);

    REQUIRE(fo.size() == so_branches.size());
    for (std::size_t b = 0; b < fo.size(); ++b) {
      REQUIRE(fo[b].system.size() == so_branches[b].system.size());
      CHECK(fo[b].destroyed.empty());
      CHECK(so_branches[b].destroyed.empty());
      for (std::size_t k = 0; k < fo[b].system.size(); ++k)
        CHECK(alpha_eq(embed(fo[b].system.members[k].cf.formula),
                       so_branches[b].system.members[k].formula));
    }
  }
  CHECK(compared >= 80);
}

TEST_CASE("complexity_report: embedded first-order steps always shrink") {
  test::Gen g(555);
  int flagged = 0, compared = 0;
  for (int i = 0; i < 60; ++i) {
    SystemE E;
    try {
      E = build_system(g.system_formulas());
    } catch (const NotCriticalError&) {
      continue;
    }
    if (E.empty()) continue;
    ++compared;
    SOSystem S;
    for (const auto& m : E.members)
      S.members.push_back(SOCriticalFormula{
          embed(m.cf.formula), IndOwner{embed(m.cf.epsilon_term), embed(m.cf.witness)}});
    auto e = select_maximal(E);
    auto branches = so_principal_step(S, SOOwnerRef{embed(e)}, Mode::Permissive);
    auto rep = complexity_report(S, branches);
    if (rep.any_not_smaller) ++flagged;
    // cross-check against the first-order measures
    auto fo = principal_step(E, e, Mode::Permissive);
    auto parent_fo = measure(E);
    for (std::size_t b = 0; b < fo.size(); ++b) {
      CHECK(rep.branches[b].smaller == measure_less(measure(fo[b].system), parent_fo));
    }
  }
  CHECK(compared >= 40);
  CHECK(flagged == 0);
}

TEST_CASE("complexity_report never flags a decrease as an increase") {
  auto demo = demos::so_step_demo();
  for (const auto& br : demo.report.branches) {
    bool direct = measure_less(br.measure, demo.report.parent);
    CHECK(br.smaller == direct);
  }
}

TEST_CASE("the second-order demo: one step, an increase branch, revalidation holds") {
  auto demo = demos::so_step_demo();
  REQUIRE(demo.system.size() == 2);

  // the eliminated owner is the maximal one: (2,2) vs (1,3)
  auto m = so_measure(demo.system);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0] == Complexity{2, 2});
  CHECK(m.entries[1] == Complexity{1, 3});

  REQUIRE(demo.branches.size() == 2); // keep + one witness
  for (const auto& b : demo.branches) {
    CHECK(b.destroyed.empty()); // step 1: still critical formulas
    for (const auto& mem : b.system.members) CHECK(validate(mem));
  }

  // keep branch shrinks, witness branch does not
  REQUIRE(demo.report.branches.size() == 2);
  CHECK(demo.report.branches[0].smaller);
  CHECK(!demo.report.branches[1].smaller);
  CHECK(demo.report.any_not_smaller);

  // the witness branch owner climbed to (2,3)
  REQUIRE(demo.report.branches[1].measure.entries.size() == 1);
  CHECK(demo.report.branches[1].measure.entries[0] == Complexity{2, 3});

  // iterating once more still works and never claims termination
  auto again = demos::so_step_again(demo);
  REQUIRE(again.has_value());
  CHECK(!again->branches.empty());
}

TEST_CASE("single-formula system with eps-free witness body: child measure trivially smaller") {
  auto cf = make_critical_pred("X", 1, parse_so_formula("X(c)"), parse_pred_term("lam x. Q(x, d)"));
  SOSystem sys;
  sys.members = {cf};
  auto branches = so_principal_step(sys, SOOwnerRef{std::get<PredOwner>(cf.owner).epsilon});
  auto rep = complexity_report(sys, branches);
  CHECK(!rep.any_not_smaller);
  for (const auto& b : rep.branches) CHECK(b.measure.entries.empty());
}

TEST_CASE("so destruction: embedded rank-sensitive system loses a formula too") {
  // embed the first-order destruction exhibit with tracked owners
  auto sys_file = parse_system_file(
      "let s_c = eps x. S(x, c)\n"
      "let g = eps y. (Q(y) & R(eps x. S(x, y)))\n"
      "system {\n"
      "  S(d, c) -> S(s_c, c) ;\n"
      "  (Q(c) & R(s_c)) -> (Q(g) & R(eps x. S(x, g)))\n"
      "}\n");
  auto E = build_system(sys_file.formulas);
  SOSystem S;
  for (const auto& m : E.members)
    S.members.push_back(SOCriticalFormula{
        embed(m.cf.formula), IndOwner{embed(m.cf.epsilon_term), embed(m.cf.witness)}});

  auto s_c = embed(epsub::parse_term("eps x. S(x, c)"));
  auto branches = so_principal_step(S, SOOwnerRef{s_c}, Mode::Permissive);
  bool destroyed = false;
  for (const auto& b : branches) destroyed = destroyed || !b.destroyed.empty();
  CHECK(destroyed);

  CHECK_THROWS_AS(so_principal_step(S, SOOwnerRef{s_c}, Mode::Strict), DestroyedError);
}

TEST_CASE("so parser rejects an unapplied predicate term of positive arity") {
  CHECK_THROWS_AS(parse_so_formula("(EPS X. X(c))"), ParseError);
  CHECK_THROWS_AS(parse_so_formula("(lam x. P(x))(c, d)"), ParseError);
}
