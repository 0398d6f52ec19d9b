#include <algorithm>
#include <set>
#include <string>
#include <tuple>

#include "gsyn/ir/instance.hpp"

namespace gsyn::ir {

int InstanceGraph::num_nodes() const {
    const int v = static_cast<int>(base->vars.size());
    const int p = static_cast<int>(base->param_ids.size());
    const int n = std::max(1, num_examples());
    return v + (n - 1) * (v - p);
}

int InstanceGraph::node(int example, int var) const {
    const int l = local_[static_cast<std::size_t>(var)];
    if (example == 0 || l < 0) return var;
    const int v = static_cast<int>(base->vars.size());
    const int p = static_cast<int>(base->param_ids.size());
    return v + (example - 1) * (v - p) + l;
}

namespace {

std::string check_side(const Graph& g, std::vector<CellValue>& cells, const std::vector<int>& ids,
                       VarKind kind, int example) {
    const char* what = kind == VarKind::Input ? "input" : "output";
    std::set<int> expected(ids.begin(), ids.end());
    std::set<int> seen;
    for (const auto& c : cells) {
        if (!expected.count(c.var))
            return "example " + std::to_string(example) + ": cell " +
                   (c.var >= 0 && c.var < static_cast<int>(g.vars.size()) ? g.var_name(c.var)
                                                                           : std::to_string(c.var)) +
                   " is not an " + what;
        if (!seen.insert(c.var).second)
            return "example " + std::to_string(example) + ": " + what + " " + g.var_name(c.var) +
                   " given twice";
        const int dom = g.vars[static_cast<std::size_t>(c.var)].domain;
        if (c.value < 0 || c.value >= dom)
            return "example " + std::to_string(example) + ": " + what + " " + g.var_name(c.var) +
                   " = " + std::to_string(c.value) + " outside domain " + std::to_string(dom);
    }
    for (int id : ids)
        if (!seen.count(id))
            return "example " + std::to_string(example) + ": missing " + what + " " + g.var_name(id);
    std::sort(cells.begin(), cells.end(), [](const CellValue& a, const CellValue& b) { return a.var < b.var; });
    return {};
}

}  // namespace

Checked<InstanceGraph> bind_examples(std::shared_ptr<const Graph> base, IOExamples examples,
                                     const LowerOptions& budget) {
    Checked<InstanceGraph> result;
    const Graph& g = *base;
    if (examples.empty()) {
        result.diagnostics.push_back(make_error({}, "io", "at least one example is required"));
        return result;
    }
    for (std::size_t e = 0; e < examples.size(); ++e) {
        for (auto [cells, ids, kind] :
             {std::tuple{&examples[e].inputs, &g.input_ids, VarKind::Input},
              std::tuple{&examples[e].outputs, &g.output_ids, VarKind::Output}}) {
            auto msg = check_side(g, *cells, *ids, kind, static_cast<int>(e));
            if (!msg.empty()) result.diagnostics.push_back(make_error({}, "io", msg));
        }
    }
    if (has_errors(result.diagnostics)) return result;

    const std::size_t n = examples.size();
    const std::size_t nonparam = g.vars.size() - g.param_ids.size();
    const std::size_t cells = g.param_ids.size() + n * nonparam;
    const std::size_t factors = n * g.factors.size();
    if (cells > budget.max_vars || factors > budget.max_factors) {
        result.diagnostics.push_back(make_error(
            {}, "too-large",
            "instance graph exceeds size budget: " + std::to_string(cells) + " cells, " +
                std::to_string(factors) + " factors for " + std::to_string(n) + " examples"));
        return result;
    }

    InstanceGraph ig;
    ig.base = std::move(base);
    ig.local_.assign(g.vars.size(), -1);
    int next = 0;
    for (const auto& v : g.vars)
        if (v.kind != VarKind::Param) ig.local_[static_cast<std::size_t>(v.id)] = next++;
    ig.examples = std::move(examples);
    for (int e = 0; e < ig.num_examples(); ++e) {
        for (const auto& c : ig.examples[static_cast<std::size_t>(e)].inputs)
            ig.clamps.push_back({ig.node(e, c.var), c.value});
        for (const auto& c : ig.examples[static_cast<std::size_t>(e)].outputs)
            ig.observations.push_back({ig.node(e, c.var), c.value});
    }
    result.value = std::move(ig);
    return result;
}

std::vector<std::string> param_symbols(const Graph& g) {
    std::vector<std::string> out;
    std::set<std::string> used;
    for (int p : g.param_ids) {
        const auto& v = g.vars[static_cast<std::size_t>(p)];
        std::string s = "p_" + v.name;
        for (int i : v.index) s += "_" + std::to_string(i);
        if (!used.insert(s).second) {
            s += "__" + std::to_string(p);
            used.insert(s);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string cell_symbol(int example, int var) { return "v_" + std::to_string(example) + "_" + std::to_string(var); }

}  // namespace gsyn::ir
