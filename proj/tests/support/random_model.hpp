#pragma once

#include <memory>
#include <random>
#include <string>

#include "gsyn/exec/executor.hpp"
#include "gsyn/ir/instance.hpp"

namespace gsyn::testing {

struct RandomModelOptions {
    int max_cells = 6;
    int max_domain = 4;
    int max_params = 3;
    int max_gate_depth = 2;
    bool require_gate = true;
};

// Random well-formed model source: a few Params, at most one Input, optional
// Vars and 1-2 Outputs, written through gates, copies, literals and small
// tabulated functions.
std::string random_model_source(std::mt19937_64& rng, const RandomModelOptions& opts = {});

exec::ParamAssignment random_assignment(const ir::Graph& g, std::mt19937_64& rng);
std::vector<ir::CellValue> random_inputs(const ir::Graph& g, std::mt19937_64& rng);

// Examples produced by running a hidden random program (always satisfiable).
ir::IOExamples planted_examples(const ir::Graph& g, int n, std::mt19937_64& rng,
                                exec::ParamAssignment* hidden = nullptr);

// Examples with random outputs (may be unsatisfiable).
ir::IOExamples random_examples(const ir::Graph& g, int n, std::mt19937_64& rng);

}  // namespace gsyn::testing
