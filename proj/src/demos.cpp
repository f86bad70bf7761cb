#include "epsub/demos.hpp"

#include "epsub/parse.hpp"

namespace epsub::demos {

std::string ackermann_loop_source() {
  return "# two critical formulas over the chain e(n+1) = eps x. P(x, e(n))\n"
         "let e0 = eps x. P(x, 0)\n"
         "let e1 = eps x. P(x, e0)\n"
         "let e2 = eps x. P(x, e1)\n"
         "system {\n"
         "  P(e1, 0) -> P(e0, 0) ;\n"
         "  P(e2, e0) -> P(e1, e0)\n"
         "}\n";
}

SystemE ackermann_loop_system() {
  return build_system(parse_system_file(ackermann_loop_source()).formulas);
}

std::string identity_source() {
  return "system { P(c) -> P(eps x. P(x)) }\n";
}

SystemE identity_system() {
  return build_system(parse_system_file(identity_source()).formulas);
}

SoStepDemo so_step_demo() {
  using namespace so;

  // OMEGA: rank 2 (the inner EPS Y mentions X), degree 2 -- the maximal owner.
  PredTermPtr omega = parse_pred_term("EPS X. ( X(c) & (EPS Y. ( Y(c) & X(c) ))(c) )");

  // Witness whose body nests two second-order eps terms around the argument;
  // beta reduction drags any bound argument under fresh eps binders, which is
  // what lets the remaining owner's complexity grow.
  PredTermPtr witness = parse_pred_term("lam x. ( EPS Z. ( Z(x) & (EPS W. W(x))(x) ) )(x)");

  // Formula 1 belongs to OMEGA, so its matrix is OMEGA's own body.
  SOCriticalFormula f1 = make_critical_pred(
      "X", 1, parse_so_formula("X(c) & (EPS Y. ( Y(c) & X(c) ))(c)"), witness);

  // Formula 2, first-order owner h = eps y. (R(y) & OMEGA(g(y))), witness d.
  SOFormulaPtr h_body = so::conj(so::atom("R", {so::var("y")}),
                                 so::pred_app(omega, {so::fun("g", {so::var("y")})}));
  SOCriticalFormula f2 = make_critical_ind("y", h_body, so::var("d"));

  SoStepDemo demo;
  demo.system.members = {f1, f2};
  demo.eliminated = SOOwnerRef{std::get<PredOwner>(f1.owner).epsilon};
  demo.branches = so_principal_step(demo.system, demo.eliminated, Mode::Permissive);
  demo.report = complexity_report(demo.system, demo.branches);
  return demo;
}

std::optional<SoStepDemo> so_step_again(const SoStepDemo& prev) {
  using namespace so;
  for (const auto& b : prev.branches) {
    if (b.system.empty()) continue;
    SoStepDemo next;
    next.system = b.system;
    const auto& m = b.system.members.front();
    next.eliminated = m.predicate_owner() ? SOOwnerRef{std::get<PredOwner>(m.owner).epsilon}
                                          : SOOwnerRef{std::get<IndOwner>(m.owner).epsilon};
    next.branches = so_principal_step(next.system, next.eliminated, Mode::Permissive);
    next.report = complexity_report(next.system, next.branches);
    return next;
  }
  return std::nullopt;
}

} // namespace epsub::demos
