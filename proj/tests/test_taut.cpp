#include "doctest.h"

#include "epsub/parse.hpp"
#include "epsub/taut.hpp"

#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace epsub;

TEST_CASE("abstract: identity, distinct loop atoms, alpha-equivalent atoms") {
  auto a = abstract(parse_formula("P(c) -> P(c)"));
  CHECK(a.atoms.size() == 1);

  auto b = abstract(parse_formula("P(eps x. P(x, eps y. P(y,0)), 0) -> P(eps x. P(x,0), 0)"));
  CHECK(b.atoms.size() == 2);

  auto c = abstract(disj(parse_formula("P(eps x. P(x,0), 0)"), parse_formula("P(eps y. P(y,0), 0)")));
  CHECK(c.atoms.size() == 1);

  CHECK_THROWS_AS(abstract(parse_formula("exists x. P(x)")), TautError);
}

TEST_CASE("is_tautology on small shapes") {
  CHECK(is_tautology(parse_formula("P(c) -> P(c)")).tautology);

  auto r = is_tautology(parse_formula("P(eps x. P(x, eps y. P(y,0)), 0) -> P(eps x. P(x,0), 0)"));
  REQUIRE(!r.tautology);
  REQUIRE(r.countermodel.size() == 2);
  // the antecedent atom true, the consequent atom false
  bool saw_true = false, saw_false = false;
  for (const auto& [k, v] : r.countermodel) (v ? saw_true : saw_false) = true;
  CHECK(saw_true);
  CHECK(saw_false);

  CHECK(is_tautology(parse_formula("(P(c) -> P(e)) | (P(c) -> P(c))")).tautology);
}

TEST_CASE("countermodels evaluate to false under the independent evaluator") {
  test::Gen g(17);
  int countermodels = 0;
  for (int i = 0; i < 500; ++i) {
    auto f = g.prop_formula(4, 6);
    auto r = is_tautology(f);
    if (!r.tautology) {
      ++countermodels;
      CHECK(!evaluate(f, r.countermodel));
    }
  }
  CHECK(countermodels > 100);
}

TEST_CASE("backtracking search agrees with truth tables (1000 formulas, <= 12 atoms)") {
  test::Gen g(23);
  for (int i = 0; i < 1000; ++i) {
    auto f = g.prop_formula(5, 12);
    auto table = is_tautology(f, /*table_threshold=*/20);
    auto search = is_tautology(f, /*table_threshold=*/0); // force the backtracking path
    CHECK(table.tautology == search.tautology);
    CHECK(table.tautology == test::tt_tautology(f));
    if (!search.tautology) CHECK(!evaluate(f, search.countermodel));
    if (!table.tautology) CHECK(!evaluate(f, table.countermodel));
  }
}

TEST_CASE("threshold boundary: both paths handle the same formula") {
  test::Gen g(29);
  auto f = g.prop_formula(5, 3);
  CHECK(is_tautology(f, 0).tautology == is_tautology(f, 20).tautology);
}
