#include "gsyn/ir/pipeline.hpp"

namespace gsyn::ir {

Checked<Graph> build_graph(const frontend::ModelSource& src, const frontend::CheckOptions& check_opts,
                           const LowerOptions& lower_opts) {
    Checked<Graph> r;
    auto typed = frontend::compile(src, check_opts);
    r.diagnostics = std::move(typed.diagnostics);
    if (!typed.ok()) return r;
    auto g = lower(*typed, lower_opts);
    r.diagnostics.insert(r.diagnostics.end(), g.diagnostics.begin(), g.diagnostics.end());
    if (!g.ok()) return r;
    auto ssa = validate_ssa(*g);
    r.diagnostics.insert(r.diagnostics.end(), ssa.begin(), ssa.end());
    if (has_errors(ssa)) return r;
    r.value = std::move(*g);
    return r;
}

}  // namespace gsyn::ir
