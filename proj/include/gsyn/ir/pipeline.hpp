#pragma once

#include "gsyn/frontend/typed_model.hpp"
#include "gsyn/ir/graph.hpp"

namespace gsyn::ir {

// parse + resolve + check + lower + validate_ssa.
Checked<Graph> build_graph(const frontend::ModelSource& src, const frontend::CheckOptions& check_opts = {},
                           const LowerOptions& lower_opts = {});

}  // namespace gsyn::ir
