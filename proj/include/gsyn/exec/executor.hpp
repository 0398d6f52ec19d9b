#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsyn/ir/graph.hpp"
#include "gsyn/ir/instance.hpp"

namespace gsyn::exec {

using ir::CellValue;
using ir::Graph;
using ir::InstanceGraph;
using ir::IOExample;
using ir::IOExamples;

// Concrete value of every Param cell, ordered like Graph::param_ids.
struct ParamAssignment {
    std::vector<int> values;

    bool operator==(const ParamAssignment&) const = default;
    int value_of(const Graph& g, int cell) const;
};

// Throws std::invalid_argument unless `p` covers every Param with in-domain values.
void require_valid(const Graph& g, const ParamAssignment& p);

struct ExecutionTrace {
    std::vector<int> values;  // per var id; -1 for cells never written
    std::vector<int> branch;  // per gate; -1 for gates on untaken paths
};

struct ExecutionResult {
    std::vector<int> outputs;  // aligned with Graph::output_ids
    ExecutionTrace trace;
};

ExecutionResult execute(const Graph& g, const ParamAssignment& p, std::span<const CellValue> inputs);

// Index of the first example whose outputs differ, or nullopt if all match.
std::optional<std::size_t> first_failing_example(const Graph& g, const ParamAssignment& p,
                                                 const IOExamples& io);

bool check_consistency(const Graph& g, const ParamAssignment& p, const IOExamples& io);

// Reusable evaluation state; avoids per-call allocation in search loops.
class Machine {
public:
    explicit Machine(const Graph& g);

    // Loads param values (aligned with param_ids) and runs one example.
    // Returns true iff every output matches.
    bool matches(std::span<const int> params, const IOExample& ex);
    void run(std::span<const int> params, std::span<const CellValue> inputs);

    std::span<const int> values() const { return values_; }
    std::span<const int> branches() const { return branches_; }

private:
    void run_block(int b);

    const Graph& g_;
    std::vector<int> values_;
    std::vector<int> branches_;
    std::vector<int> args_;
};

enum class RenderStyle { Auto, Generic, Turing };

// Generic: one "name[i,j] = v" line per Param cell, grouped by declaration.
// Turing: "(state,symbol) -> (write,move,next)" per rule; selected by Auto
// when the graph declares write/move/next_state Params of equal 2-D shape.
std::string render_program(const Graph& g, const ParamAssignment& p,
                           RenderStyle style = RenderStyle::Auto);

}  // namespace gsyn::exec
