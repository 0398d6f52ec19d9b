#pragma once

#include <string>

#include "gsyn/frontend/ast.hpp"

namespace gsyn::frontend {

// Parses `.tpt` model source. Only the frozen grammar subset is accepted:
// constants, Param/Var/Input/Output declarations, single-expression `def`s,
// `set_to`, `for ... in range`, compile-time `if`, and `with ... as` gates.
Checked<Ast> parse(const ModelSource& src);

// Inverse of parse up to spans and declaration order: constants, then
// declarations, then functions, then the body.
std::string pretty_print(const Ast& ast);
std::string pretty_print(const Expr& e);

}  // namespace gsyn::frontend
