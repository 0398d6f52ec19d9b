#pragma once

#include <map>
#include <string>
#include <vector>

#include "gsyn/diagnostics.hpp"

namespace gsyn::frontend {

struct ModelSource {
    std::string text;
    std::string name;
    std::map<std::string, long long> const_overrides;
};

enum class ExprKind { Int, Name, Index, Call, Unary, Binary, Ternary };
enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, FloorDiv, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

// Expression tree node. Children live in `args`:
//   Index   - the index expressions of `name[...]`
//   Call    - call arguments of `name(...)`
//   Unary   - [operand]
//   Binary  - [lhs, rhs]
//   Ternary - [then, cond, else]  (`then if cond else else`)
struct Expr {
    ExprKind kind = ExprKind::Int;
    long long value = 0;
    std::string name;
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;
    std::vector<Expr> args;
    Span span;

    static Expr integer(long long v, Span s = {});
    static Expr identifier(std::string n, Span s = {});

    bool is_int() const { return kind == ExprKind::Int; }
    bool is_ref() const { return kind == ExprKind::Name || kind == ExprKind::Index; }
};

// Structural equality; spans are ignored.
bool operator==(const Expr& a, const Expr& b);

enum class VarKind { Param, Var, Input, Output };

const char* to_string(VarKind k);

struct VarDecl {
    std::string name;
    VarKind kind = VarKind::Var;
    Expr domain;
    std::vector<Expr> shape;
    Span span;
};

struct ConstDecl {
    std::string name;
    Expr value;
    Span span;
};

struct FnDef {
    std::string name;
    std::vector<std::string> params;
    std::vector<Expr> arg_domains;
    Expr out_domain;
    Expr body;
    Span span;
};

enum class StmtKind { SetTo, For, If, With };

// SetTo: target.set_to(value)
// For:   for name in range(lower, upper): body
// If:    if cond: body else: else_body
// With:  with target as name: body
struct Stmt {
    StmtKind kind = StmtKind::SetTo;
    Expr target;
    Expr value;
    Expr cond;
    Expr lower;
    Expr upper;
    std::string name;
    std::vector<Stmt> body;
    std::vector<Stmt> else_body;
    Span span;
};

struct Ast {
    std::string name;
    std::vector<ConstDecl> constants;
    std::vector<VarDecl> decls;
    std::vector<FnDef> functions;
    std::vector<Stmt> body;
};

bool operator==(const VarDecl& a, const VarDecl& b);
bool operator==(const ConstDecl& a, const ConstDecl& b);
bool operator==(const FnDef& a, const FnDef& b);
bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const Ast& a, const Ast& b);

}  // namespace gsyn::frontend
