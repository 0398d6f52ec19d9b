#include "gsyn/frontend/ast.hpp"

#include <sstream>

namespace gsyn {

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
    os << d.span.line << ':' << d.span.col_begin << ": "
       << (d.is_error() ? "error" : "warning") << " [" << d.code << "] " << d.message;
    return os;
}

std::string format_diagnostics(const Diagnostics& ds, const std::string& file) {
    std::ostringstream out;
    for (const auto& d : ds) {
        if (!file.empty()) out << file << ':';
        out << d << '\n';
    }
    return out.str();
}

}  // namespace gsyn

namespace gsyn::frontend {

Expr Expr::integer(long long v, Span s) {
    Expr e;
    e.kind = ExprKind::Int;
    e.value = v;
    e.span = s;
    return e;
}

Expr Expr::identifier(std::string n, Span s) {
    Expr e;
    e.kind = ExprKind::Name;
    e.name = std::move(n);
    e.span = s;
    return e;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case ExprKind::Int:
        return a.value == b.value;
    case ExprKind::Name:
        return a.name == b.name;
    case ExprKind::Index:
    case ExprKind::Call:
        return a.name == b.name && a.args == b.args;
    case ExprKind::Unary:
        return a.unary_op == b.unary_op && a.args == b.args;
    case ExprKind::Binary:
        return a.binary_op == b.binary_op && a.args == b.args;
    case ExprKind::Ternary:
        return a.args == b.args;
    }
    return false;
}

const char* to_string(VarKind k) {
    switch (k) {
    case VarKind::Param: return "Param";
    case VarKind::Var: return "Var";
    case VarKind::Input: return "Input";
    case VarKind::Output: return "Output";
    }
    return "?";
}

bool operator==(const VarDecl& a, const VarDecl& b) {
    return a.name == b.name && a.kind == b.kind && a.domain == b.domain && a.shape == b.shape;
}

bool operator==(const ConstDecl& a, const ConstDecl& b) {
    return a.name == b.name && a.value == b.value;
}

bool operator==(const FnDef& a, const FnDef& b) {
    return a.name == b.name && a.params == b.params && a.arg_domains == b.arg_domains &&
           a.out_domain == b.out_domain && a.body == b.body;
}

bool operator==(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case StmtKind::SetTo:
        return a.target == b.target && a.value == b.value;
    case StmtKind::For:
        return a.name == b.name && a.lower == b.lower && a.upper == b.upper && a.body == b.body;
    case StmtKind::If:
        return a.cond == b.cond && a.body == b.body && a.else_body == b.else_body;
    case StmtKind::With:
        return a.target == b.target && a.name == b.name && a.body == b.body;
    }
    return false;
}

bool operator==(const Ast& a, const Ast& b) {
    return a.constants == b.constants && a.decls == b.decls && a.functions == b.functions &&
           a.body == b.body;
}

}  // namespace gsyn::frontend
