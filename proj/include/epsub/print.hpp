#pragma once

// Concrete-syntax printing. `to_string` emits reparseable text using binder
// hints (renamed where a hint would capture a free variable); `canonical_str`
// emits an alpha-normal form keyed by binder depth, used wherever two trees
// must compare equal exactly when alpha-equivalent.

#include "epsub/ast.hpp"

#include <string>

namespace epsub {

std::string to_string(const TermPtr& t);
std::string to_string(const FormulaPtr& f);

std::string canonical_str(const TermPtr& t);
std::string canonical_str(const FormulaPtr& f);

} // namespace epsub
