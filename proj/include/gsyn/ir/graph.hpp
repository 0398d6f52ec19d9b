#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsyn/diagnostics.hpp"
#include "gsyn/frontend/typed_model.hpp"

namespace gsyn::ir {

using frontend::Operand;
using frontend::VarKind;

struct VarNode {
    int id = 0;
    int domain = 1;
    VarKind kind = VarKind::Var;
    std::string name;
    std::vector<int> index;
};

enum class FactorKind { Copy, Const, Table };

// Copy:  dst <- inputs[0]
// Const: dst <- value
// Table: dst <- tables[table](inputs...)
// Operands are cells or literals (gate-bound names substituted per branch).
struct Factor {
    FactorKind kind = FactorKind::Const;
    int dst = -1;
    int value = 0;
    int table = -1;
    std::vector<Operand> inputs;
    int block = 0;
    int line = 0;
};

struct GateNode {
    int cond = -1;
    std::vector<int> branches;  // one block per value of cond's domain
    int block = 0;              // parent block
    int line = 0;
};

struct BlockItem {
    enum class Kind { Factor, Gate };
    Kind kind = Kind::Factor;
    int index = 0;
};

// Blocks form a tree rooted at block 0 (the global block); every other block
// is one branch of a gate.
struct Block {
    int parent_gate = -1;
    int branch = -1;
    std::vector<BlockItem> items;
};

struct FunctionTable {
    int id = 0;
    std::string name;
    std::vector<int> input_domains;
    int output_domain = 1;
    std::vector<int> entries;  // row-major over input_domains

    std::size_t index_of(std::span<const int> tuple) const {
        std::size_t k = 0;
        for (std::size_t i = 0; i < tuple.size(); ++i)
            k = k * static_cast<std::size_t>(input_domains[i]) + static_cast<std::size_t>(tuple[i]);
        return k;
    }
    int lookup(std::span<const int> tuple) const { return entries[index_of(tuple)]; }
};

// Contiguous var-id range of one declaration, cells in row-major order.
struct DeclRange {
    std::string name;
    VarKind kind = VarKind::Var;
    int domain = 1;
    std::vector<int> shape;
    int first = 0;
    int count = 1;
};

struct Graph {
    std::string model_name;
    std::vector<DeclRange> decls;
    std::vector<std::pair<std::string, long long>> constants;
    std::vector<VarNode> vars;
    std::vector<Factor> factors;
    std::vector<GateNode> gates;
    std::vector<Block> blocks;
    std::vector<FunctionTable> tables;
    std::vector<int> param_ids;
    std::vector<int> input_ids;
    std::vector<int> output_ids;

    std::string var_name(int v) const { return frontend::format_cell_name(vars[v].name, vars[v].index); }
    std::string operand_name(const Operand& o) const {
        return o.is_literal() ? std::to_string(o.literal) : var_name(o.cell);
    }
    int find_var(const std::string& name, std::span<const int> index) const;
    const DeclRange* find_decl(const std::string& name) const;
};

struct LowerOptions {
    std::size_t max_vars = 200'000;
    std::size_t max_factors = 1'000'000;
};

// Loops are already unrolled by the checker; lowering assigns blocks, turns
// each elaborated gate into a GateNode and each assignment into a factor.
// Var ids equal the TypedModel's cell ids (declaration order, row-major).
Checked<Graph> lower(const frontend::TypedModel& m, const LowerOptions& opts = {});

// Single-assignment check over every root-to-leaf gate path. Also verifies
// structural invariants (branch counts, table arity, operand ranges).
Diagnostics validate_ssa(const Graph& g);

struct ParamSpaceSize {
    boost::multiprecision::cpp_int value;
    double log10 = 0.0;
};

ParamSpaceSize param_space_size(const Graph& g);

// Deterministic textual listing used for golden files and `export ir`.
std::string dump(const Graph& g);

}  // namespace gsyn::ir
