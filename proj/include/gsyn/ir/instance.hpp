#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gsyn/diagnostics.hpp"
#include "gsyn/ir/graph.hpp"

namespace gsyn::ir {

struct CellValue {
    int var = -1;
    int value = 0;
    bool operator==(const CellValue&) const = default;
};

// One input/output example: values for every Input cell and every Output cell
// of the base graph, given as (var id, value) pairs.
struct IOExample {
    std::vector<CellValue> inputs;
    std::vector<CellValue> outputs;
};

using IOExamples = std::vector<IOExample>;

// N examples bound to one base graph. Params are shared; every other cell is
// replicated per example. Example 0 uses the base ids unchanged, so binding a
// single example adds no nodes.
struct InstanceGraph {
    std::shared_ptr<const Graph> base;
    IOExamples examples;
    std::vector<CellValue> clamps;        // instance node ids
    std::vector<CellValue> observations;  // instance node ids

    int num_examples() const { return static_cast<int>(examples.size()); }
    int num_nodes() const;
    int node(int example, int var) const;

    std::vector<int> local_;  // var -> ordinal among non-param vars, -1 for params
};

Checked<InstanceGraph> bind_examples(std::shared_ptr<const Graph> base, IOExamples examples,
                                     const LowerOptions& budget = {});

// Solver symbols shared by the SMT and ILP encodings. Params are
// `p_<name>[_<i>...]` (suffixed `__<id>` on collision), aligned with
// Graph::param_ids; other cells are `v_<example>_<var id>`.
std::vector<std::string> param_symbols(const Graph& g);
std::string cell_symbol(int example, int var);

inline ParamSpaceSize param_space_size(const InstanceGraph& ig) { return param_space_size(*ig.base); }

}  // namespace gsyn::ir
