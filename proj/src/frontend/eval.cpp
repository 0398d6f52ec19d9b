#include "gsyn/frontend/eval.hpp"

namespace gsyn::frontend {

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long long floor_mod(long long a, long long b) {
    long long r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) r += b;
    return r;
}

namespace {

[[noreturn]] void fail(const Expr& e, std::string code, std::string msg) {
    throw EvalError{e.span, std::move(code), std::move(msg)};
}

template <class Op>
long long checked(const Expr& e, Op op) {
    long long r = 0;
    if (op(&r)) fail(e, "overflow", "integer overflow in constant expression");
    return r;
}

}  // namespace

long long evaluate(const Expr& e, const NameLookup& lookup) {
    switch (e.kind) {
    case ExprKind::Int:
        return e.value;
    case ExprKind::Name: {
        if (auto v = lookup(e)) return *v;
        fail(e, "undeclared", "undeclared identifier '" + e.name + "'");
    }
    case ExprKind::Index:
        fail(e, "runtime-value", "array element '" + e.name + "[...]' is not a compile-time value");
    case ExprKind::Call:
        fail(e, "runtime-value", "call to '" + e.name + "' is not a compile-time value");
    case ExprKind::Unary: {
        long long v = evaluate(e.args[0], lookup);
        if (e.unary_op == UnaryOp::Not) return v == 0 ? 1 : 0;
        return checked(e, [&](long long* r) { return __builtin_sub_overflow(0LL, v, r); });
    }
    case ExprKind::Ternary: {
        long long c = evaluate(e.args[1], lookup);
        return c != 0 ? evaluate(e.args[0], lookup) : evaluate(e.args[2], lookup);
    }
    case ExprKind::Binary:
        break;
    }
    if (e.binary_op == BinaryOp::And) {
        long long l = evaluate(e.args[0], lookup);
        return l == 0 ? l : evaluate(e.args[1], lookup);
    }
    if (e.binary_op == BinaryOp::Or) {
        long long l = evaluate(e.args[0], lookup);
        return l != 0 ? l : evaluate(e.args[1], lookup);
    }
    long long a = evaluate(e.args[0], lookup);
    long long b = evaluate(e.args[1], lookup);
    switch (e.binary_op) {
    case BinaryOp::Add: return checked(e, [&](long long* r) { return __builtin_add_overflow(a, b, r); });
    case BinaryOp::Sub: return checked(e, [&](long long* r) { return __builtin_sub_overflow(a, b, r); });
    case BinaryOp::Mul: return checked(e, [&](long long* r) { return __builtin_mul_overflow(a, b, r); });
    case BinaryOp::FloorDiv:
        if (b == 0) fail(e, "div-zero", "integer division by zero");
        return floor_div(a, b);
    case BinaryOp::Mod:
        if (b == 0) fail(e, "div-zero", "modulo by zero");
        return floor_mod(a, b);
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Gt: return a > b;
    case BinaryOp::Ge: return a >= b;
    default: break;
    }
    fail(e, "internal", "unknown operator");
}

}  // namespace gsyn::frontend
