#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsyn/frontend/ast.hpp"

namespace gsyn::frontend {

struct DeclInfo {
    std::string name;
    VarKind kind = VarKind::Var;
    int domain = 1;
    std::vector<int> shape;
    int first_cell = 0;
    int cell_count = 1;
    Span span;
};

// One scalar cell of a declared variable; arrays contribute one cell per
// element in row-major order, declarations in source order.
struct CellInfo {
    int decl = 0;
    std::vector<int> index;
};

struct FunctionInfo {
    std::string name;
    std::vector<int> arg_domains;
    int out_domain = 1;
    // Row-major over arg_domains.
    std::vector<int> entries;
    Span span;
};

// A reference to a cell, or a compile-time literal (cell < 0).
struct Operand {
    int cell = -1;
    int literal = 0;

    bool is_literal() const { return cell < 0; }
    static Operand of_cell(int c) { return Operand{c, 0}; }
    static Operand of_literal(int v) { return Operand{-1, v}; }
    friend bool operator==(const Operand&, const Operand&) = default;
};

enum class RhsKind { Literal, Copy, Call };

// Fully unrolled statement: loops and compile-time ifs are gone, gate-bound
// names are substituted by their branch value.
struct ElabStmt {
    enum class Kind { Assign, Gate };
    Kind kind = Kind::Assign;
    int cell = -1;  // Assign: destination; Gate: scrutinee
    RhsKind rhs = RhsKind::Literal;
    int fn = -1;
    std::vector<Operand> args;  // Literal: [value]; Copy: [source]; Call: call arguments
    std::vector<std::vector<ElabStmt>> branches;
    int line = 0;
};

struct TypedModel {
    std::string name;
    Ast ast;
    std::vector<std::pair<std::string, long long>> constants;
    std::vector<DeclInfo> decls;
    std::vector<CellInfo> cells;
    std::vector<FunctionInfo> functions;
    std::vector<ElabStmt> body;

    const DeclInfo& decl_of(int cell) const { return decls[cells[cell].decl]; }
    int domain(int cell) const { return decl_of(cell).domain; }
    VarKind kind(int cell) const { return decl_of(cell).kind; }
    // "tape[3]", "ruleTable[0, 1]", "out"
    std::string cell_name(int cell) const;
    std::optional<int> find_decl(const std::string& name) const;
    std::optional<int> find_cell(const std::string& name, std::span<const int> index) const;
};

std::string format_cell_name(const std::string& name, std::span<const int> index);

struct CheckOptions {
    // Bound on elaborated statements; guards against runaway unrolling.
    std::size_t max_statements = 5'000'000;
    // Bound on a single function table.
    std::size_t max_table_entries = 1'000'000;
};

// Type/domain/scope checks plus full elaboration. Pre: constants resolved.
Checked<TypedModel> check(const Ast& ast, const CheckOptions& opts = {});

// parse + resolve_constants + check.
Checked<TypedModel> compile(const ModelSource& src, const CheckOptions& opts = {});

}  // namespace gsyn::frontend
