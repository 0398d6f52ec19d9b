#include <sstream>

#include "gsyn/frontend/parser.hpp"

namespace gsyn::frontend {
namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Ternary: return 1;
    case ExprKind::Binary:
        switch (e.binary_op) {
        case BinaryOp::Or: return 2;
        case BinaryOp::And: return 3;
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 5;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 6;
        case BinaryOp::Mul:
        case BinaryOp::FloorDiv:
        case BinaryOp::Mod: return 7;
        }
        return 0;
    case ExprKind::Unary: return e.unary_op == UnaryOp::Not ? 4 : 8;
    default: return 9;
    }
}

const char* op_text(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::FloorDiv: return "//";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
    }
    return "?";
}

void print_list(std::ostream& os, const std::vector<Expr>& xs);

void print_expr(std::ostream& os, const Expr& e, int min_prec) {
    const int p = precedence(e);
    const bool parens = p < min_prec;
    if (parens) os << '(';
    switch (e.kind) {
    case ExprKind::Int:
        os << e.value;
        break;
    case ExprKind::Name:
        os << e.name;
        break;
    case ExprKind::Index:
        os << e.name << '[';
        print_list(os, e.args);
        os << ']';
        break;
    case ExprKind::Call:
        os << e.name << '(';
        print_list(os, e.args);
        os << ')';
        break;
    case ExprKind::Unary:
        if (e.unary_op == UnaryOp::Not) {
            os << "not ";
            print_expr(os, e.args[0], 4);
        } else {
            os << '-';
            print_expr(os, e.args[0], 8);
        }
        break;
    case ExprKind::Binary: {
        const bool cmp = p == 5;
        print_expr(os, e.args[0], cmp ? 6 : p);
        os << ' ' << op_text(e.binary_op) << ' ';
        print_expr(os, e.args[1], p + 1);
        break;
    }
    case ExprKind::Ternary:
        print_expr(os, e.args[0], 2);
        os << " if ";
        print_expr(os, e.args[1], 2);
        os << " else ";
        print_expr(os, e.args[2], 1);
        break;
    }
    if (parens) os << ')';
}

void print_list(std::ostream& os, const std::vector<Expr>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, xs[i], 0);
    }
}

void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent);

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    switch (s.kind) {
    case StmtKind::SetTo:
        os << pad;
        print_expr(os, s.target, 0);
        os << ".set_to(";
        print_expr(os, s.value, 0);
        os << ")\n";
        break;
    case StmtKind::For:
        os << pad << "for " << s.name << " in range(";
        print_expr(os, s.lower, 0);
        os << ", ";
        print_expr(os, s.upper, 0);
        os << "):\n";
        print_block(os, s.body, indent + 1);
        break;
    case StmtKind::If: {
        os << pad << "if ";
        print_expr(os, s.cond, 0);
        os << ":\n";
        print_block(os, s.body, indent + 1);
        const Stmt* cur = &s;
        while (cur->else_body.size() == 1 && cur->else_body[0].kind == StmtKind::If) {
            cur = &cur->else_body[0];
            os << pad << "elif ";
            print_expr(os, cur->cond, 0);
            os << ":\n";
            print_block(os, cur->body, indent + 1);
        }
        if (!cur->else_body.empty()) {
            os << pad << "else:\n";
            print_block(os, cur->else_body, indent + 1);
        }
        break;
    }
    case StmtKind::With:
        os << pad << "with ";
        print_expr(os, s.target, 0);
        os << " as " << s.name << ":\n";
        print_block(os, s.body, indent + 1);
        break;
    }
}

void print_block(std::ostream& os, const std::vector<Stmt>& body, int indent) {
    for (const auto& s : body) print_stmt(os, s, indent);
}

}  // namespace

std::string pretty_print(const Expr& e) {
    std::ostringstream os;
    print_expr(os, e, 0);
    return os.str();
}

std::string pretty_print(const Ast& ast) {
    std::ostringstream os;
    for (const auto& c : ast.constants) {
        os << c.name << " = ";
        print_expr(os, c.value, 0);
        os << '\n';
    }
    for (const auto& d : ast.decls) {
        os << d.name << " = " << to_string(d.kind) << '(';
        print_expr(os, d.domain, 0);
        os << ')';
        if (!d.shape.empty()) {
            os << '[';
            print_list(os, d.shape);
            os << ']';
        }
        os << '\n';
    }
    for (const auto& f : ast.functions) {
        os << "def " << f.name << '(';
        for (std::size_t i = 0; i < f.params.size(); ++i) os << (i ? ", " : "") << f.params[i];
        os << ") -> ";
        print_expr(os, f.out_domain, 0);
        os << " over (";
        print_list(os, f.arg_domains);
        os << "): return ";
        print_expr(os, f.body, 0);
        os << '\n';
    }
    print_block(os, ast.body, 0);
    return os.str();
}

}  // namespace gsyn::frontend
