#include "doctest.h"

#include "epsub/ast.hpp"
#include "epsub/parse.hpp"
#include "epsub/print.hpp"

#include "support/gen.hpp"

using namespace epsub;

namespace {

TermPtr e(unsigned n) {
  test::Gen g(0);
  return g.chain(n);
}

FormulaPtr cf2() { return parse_formula("P(eps x. P(x, eps y. P(y, eps z. P(z,0))), eps w. P(w,0))"
                                        " -> P(eps x. P(x, eps y. P(y,0)), eps w. P(w,0))"); }

} // namespace

TEST_CASE("parsing the loop chain terms") {
  auto t = parse_term("eps x. P(x,0)");
  REQUIRE(t->is_eps());
  CHECK(alpha_eq(t, e(0)));

  auto f = parse_formula("P(c) -> P(c)");
  CHECK(f->kind == Formula::Kind::Implies);
  CHECK(alpha_eq(f->lhs, f->rhs));

  auto t1 = parse_term("eps x. P(x, eps y. P(y,0))");
  CHECK(alpha_eq(t1, e(1)));
  CHECK(!alpha_eq(t1, e(0)));
}

TEST_CASE("parse_any hits both categories") {
  auto a = parse_any("eps x. P(x,0)");
  CHECK(std::holds_alternative<TermPtr>(a));
  auto b = parse_any("P(c) -> P(c)");
  CHECK(std::holds_alternative<FormulaPtr>(b));
}

TEST_CASE("free variables are warned once, numerals are constants") {
  ParseContext ctx;
  auto f = parse_formula("Q(c, 0) & Q(c, 1)", &ctx);
  REQUIRE(ctx.warnings.size() == 1);
  CHECK(ctx.warnings[0].message.find("'c'") != std::string::npos);
  CHECK(f->lhs->args[0]->kind == Term::Kind::Var);
  CHECK(f->lhs->args[1]->kind == Term::Kind::Fun);
}

TEST_CASE("arity mismatches are parse errors with positions") {
  CHECK_THROWS_AS(parse_formula("P(c) & P(c, d)"), ParseError);
  CHECK_THROWS_AS(parse_formula("Q(f(c), f(c, d))"), ParseError);
  try {
    parse_formula("P(c)\n & P(c, d)");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.pos.line == 2);
  }
}

TEST_CASE("syntax errors carry positions") {
  CHECK_THROWS_AS(parse_formula("P(c"), ParseError);
  CHECK_THROWS_AS(parse_formula("-> P(c)"), ParseError);
  CHECK_THROWS_AS(parse_term("eps . P(x)"), ParseError);
}

TEST_CASE("alpha equivalence: renaming, distinct bodies, loop terms") {
  CHECK(alpha_eq(parse_term("eps x. P(x,0)"), parse_term("eps y. P(y,0)")));
  CHECK(!alpha_eq(parse_term("eps x. P(x,0)"), parse_term("eps x. P(x,1)")));
  CHECK(!alpha_eq(e(1), e(2)));
}

TEST_CASE("alpha equivalence is an equivalence relation on random trees") {
  test::Gen g(42);
  for (int i = 0; i < 200; ++i) {
    auto a = g.formula(3);
    auto b = g.formula(3);
    auto c = g.formula(3);
    CHECK(alpha_eq(a, a));
    CHECK(alpha_eq(b, b));
    if (alpha_eq(a, b)) CHECK(alpha_eq(b, a));
    if (alpha_eq(a, b) && alpha_eq(b, c)) CHECK(alpha_eq(a, c));
  }
}

TEST_CASE("substitution: the naive first elimination on the loop system") {
  // substitute(P(e2,e0) -> P(e1,e0), e0, e1) = P(e3,e1) -> P(e2,e1)
  auto host = implies(atom("P", {e(2), e(0)}), atom("P", {e(1), e(0)}));
  auto got = substitute(host, e(0), e(1));
  auto want = implies(atom("P", {e(3), e(1)}), atom("P", {e(2), e(1)}));
  CHECK(alpha_eq(got, want));
}

TEST_CASE("substitution: identity and vacuous") {
  auto f = implies(atom("P", {e(1)}), atom("P", {e(0)}));
  CHECK(alpha_eq(substitute(f, e(0), e(0)), f));
  auto g = atom("P", {var("c")});
  CHECK(alpha_eq(substitute(g, e(0), var("c")), g));
}

TEST_CASE("substitute rejects non-epsilon targets") {
  CHECK_THROWS_AS(substitute(atom("P", {var("c")}), var("c"), var("d")), AstError);
}

TEST_CASE("occurrences under binders that capture are not occurrences") {
  // target eps y. R(y, x) with x free; the alpha-equal-looking subtree inside
  // eps x. Q(eps y. R(y, x), x) has its x bound and must not be replaced
  auto target = eps("y", atom("R", {var("y"), var("x")}));
  auto host = eps("x", atom("Q", {eps("y", atom("R", {var("y"), var("x")})), var("x")}));
  auto got = substitute(host, target, var("c"));
  CHECK(alpha_eq(got, host));
}

TEST_CASE("epsilon_subterms: loop term, eps-free, CF2 occurrence count") {
  auto occ1 = epsilon_subterms(e(1));
  REQUIRE(occ1.size() == 2);
  CHECK(alpha_eq(occ1[0].term, e(1)));
  CHECK(occ1[0].pos.empty());
  CHECK(alpha_eq(occ1[1].term, e(0)));

  CHECK(epsilon_subterms(atom("P", {var("c"), fun("0", {})})).empty());

  // P(e2,e0) -> P(e1,e0): e2, its inner e1, that one's inner e0, the two
  // argument e0's, the consequent e1 and its inner e0 -- 7 occurrences.
  auto occs = epsilon_subterms(cf2());
  CHECK(occs.size() == 7);
  for (const auto& o : occs) CHECK(alpha_eq(term_at(cf2(), o.pos), o.term));
}

TEST_CASE("positions always dereference") {
  test::Gen g(7);
  for (int i = 0; i < 100; ++i) {
    auto f = g.formula(4);
    for (const auto& o : epsilon_subterms(f)) {
      auto t = term_at(f, o.pos);
      CHECK(t == o.term);
    }
  }
}

TEST_CASE("round trip: print then parse is alpha-equivalent (1000 random trees)") {
  test::Gen g(2024);
  for (int i = 0; i < 1000; ++i) {
    if (i % 2 == 0) {
      auto f = g.formula(4);
      CAPTURE(to_string(f));
      auto back = parse_formula(to_string(f));
      CHECK(alpha_eq(back, f));
    } else {
      auto t = g.term(4);
      CAPTURE(to_string(t));
      auto back = parse_term(to_string(t));
      CHECK(alpha_eq(back, t));
    }
  }
}

TEST_CASE("printer avoids capturing free variables") {
  // binder hint x over a body with a *free* x
  auto f = eps("y", atom("Q", {var("y"), var("x")}));
  auto renamed = eps_raw("x", f->body); // hint collides with the free x
  auto back = parse_term(to_string(renamed));
  CHECK(alpha_eq(back, renamed));
}

TEST_CASE("capture freedom: free variables of the replacement stay free") {
  test::Gen g(99);
  for (int i = 0; i < 200; ++i) {
    auto host = g.formula(3);
    auto occs = epsilon_subterms(host);
    TermPtr target;
    for (const auto& o : occs)
      if (!has_dangling_refs(o.term)) { target = o.term; break; }
    if (!target) continue;
    auto replacement = fun("f", {var("fresh_free")});
    auto out = substitute(host, target, replacement);
    // reparsing the printed result must preserve the free variable
    auto back = parse_formula(to_string(out));
    CHECK(alpha_eq(back, out));
    if (free_vars(out).count("fresh_free")) {
      auto fv = free_vars(back);
      CHECK(fv.count("fresh_free"));
    }
  }
}

TEST_CASE("system files: lets expand before validation") {
  auto sys = parse_system_file(
      "# the loop system\n"
      "let e0 = eps x. P(x, 0)\n"
      "let e1 = eps x. P(x, e0)\n"
      "let e2 = eps x. P(x, e1)\n"
      "system {\n"
      "  P(e1, 0) -> P(e0, 0) ;\n"
      "  P(e2, e0) -> P(e1, e0)\n"
      "}\n");
  REQUIRE(sys.formulas.size() == 2);
  CHECK(alpha_eq(sys.formulas[0], implies(atom("P", {e(1), fun("0", {})}),
                                          atom("P", {e(0), fun("0", {})}))));
  CHECK(alpha_eq(sys.formulas[1], implies(atom("P", {e(2), e(0)}), atom("P", {e(1), e(0)}))));
}

TEST_CASE("quantifier_free predicate") {
  CHECK(quantifier_free(parse_formula("P(c) -> Q(c, d)")));
  CHECK(!quantifier_free(parse_formula("exists x. P(x)")));
  CHECK(!quantifier_free(atom("P", {eps("x", exists("y", atom("Q", {var("x"), var("y")})))})));
}

TEST_CASE("vacuous substitution returns an alpha-equal tree (property)") {
  test::Gen g(808);
  auto absent = eps("q", atom("Absent", {var("q")}));
  for (int i = 0; i < 200; ++i) {
    auto host = g.formula(3);
    CHECK(alpha_eq(substitute(host, absent, var("c")), host));
  }
}
