#pragma once

#include <functional>
#include <optional>
#include <string>

#include "gsyn/frontend/ast.hpp"

namespace gsyn::frontend {

struct EvalError {
    Span span;
    std::string code;
    std::string message;
};

// Resolves a bare identifier to a compile-time value. Returning nullopt makes
// evaluation fail with `EvalError`; a lookup may also throw its own EvalError
// to explain why a name is not compile-time (e.g. it names a runtime variable).
using NameLookup = std::function<std::optional<long long>(const Expr& name)>;

// Integer evaluation with Python semantics: floor division and modulo follow
// the sign of the divisor, comparisons yield 0/1, `and`/`or` short-circuit and
// return an operand. Throws EvalError on division by zero, overflow, calls,
// array reads, or unknown names.
long long evaluate(const Expr& e, const NameLookup& lookup);

long long floor_div(long long a, long long b);
long long floor_mod(long long a, long long b);

}  // namespace gsyn::frontend
