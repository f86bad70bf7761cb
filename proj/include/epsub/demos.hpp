#pragma once

// Built-in scenarios shared by the CLI and the acceptance suite.

#include "epsub/engine.hpp"
#include "epsub/second_order.hpp"

#include <optional>
#include <string>

namespace epsub::demos {

// The two-formula system P(e1,0) -> P(e0,0), P(e2,e0) -> P(e1,e0) over the
// chain e0 = eps x. P(x,0), e(n+1) = eps x. P(x,en). Eliminating e0 first
// walks into a loop; eliminating by maximal complexity terminates.
std::string ackermann_loop_source();
SystemE ackermann_loop_system();

// {P(c) -> P(eps x. P(x))}
std::string identity_source();
SystemE identity_system();

// One second-order principal step on a system whose maximal owner is the
// second-order term OMEGA = EPS X. (X(c) & (EPS Y. (Y(c) & X(c)))(c)), with
// the lambda witness built so that substituting it pumps the remaining
// owner's nesting: at least one branch measure fails to shrink.
struct SoStepDemo {
  so::SOSystem system;
  so::SOOwnerRef eliminated;
  std::vector<so::SOBranch> branches;
  so::ComplexityReport report;
};

SoStepDemo so_step_demo();

// One more step on the first branch that still has an owner. Returns nothing
// when every branch system is empty.
std::optional<SoStepDemo> so_step_again(const SoStepDemo& prev);

} // namespace epsub::demos
