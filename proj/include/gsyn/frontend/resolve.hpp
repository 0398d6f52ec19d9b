#pragma once

#include <map>
#include <string>

#include "gsyn/frontend/ast.hpp"

namespace gsyn::frontend {

// Evaluates every constant (overrides win over in-file values), substitutes
// constants into all expressions and folds closed subexpressions to literals.
// Loop bounds that are literals after folding are range-checked; empty loops
// are dropped with a warning.
Checked<Ast> resolve_constants(Ast ast, const std::map<std::string, long long>& overrides);

}  // namespace gsyn::frontend
