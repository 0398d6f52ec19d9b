#include "gsyn/exec/executor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gsyn::exec {

int ParamAssignment::value_of(const Graph& g, int cell) const {
    auto it = std::lower_bound(g.param_ids.begin(), g.param_ids.end(), cell);
    if (it == g.param_ids.end() || *it != cell) throw std::invalid_argument("not a Param cell");
    return values.at(static_cast<std::size_t>(it - g.param_ids.begin()));
}

void require_valid(const Graph& g, const ParamAssignment& p) {
    if (p.values.size() != g.param_ids.size())
        throw std::invalid_argument("assignment has " + std::to_string(p.values.size()) +
                                    " values for " + std::to_string(g.param_ids.size()) + " params");
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        const int dom = g.vars[static_cast<std::size_t>(g.param_ids[i])].domain;
        if (p.values[i] < 0 || p.values[i] >= dom)
            throw std::invalid_argument("value " + std::to_string(p.values[i]) + " outside domain of " +
                                        g.var_name(g.param_ids[i]));
    }
}

Machine::Machine(const Graph& g) : g_(g), values_(g.vars.size(), -1), branches_(g.gates.size(), -1) {}

void Machine::run(std::span<const int> params, std::span<const CellValue> inputs) {
    std::fill(values_.begin(), values_.end(), -1);
    std::fill(branches_.begin(), branches_.end(), -1);
    for (std::size_t i = 0; i < g_.param_ids.size(); ++i)
        values_[static_cast<std::size_t>(g_.param_ids[i])] = params[i];
    for (const auto& c : inputs) values_[static_cast<std::size_t>(c.var)] = c.value;
    if (!g_.blocks.empty()) run_block(0);
}

bool Machine::matches(std::span<const int> params, const IOExample& ex) {
    run(params, ex.inputs);
    for (const auto& o : ex.outputs)
        if (values_[static_cast<std::size_t>(o.var)] != o.value) return false;
    return true;
}

void Machine::run_block(int b) {
    for (const auto& item : g_.blocks[static_cast<std::size_t>(b)].items) {
        if (item.kind == ir::BlockItem::Kind::Gate) {
            const auto& gate = g_.gates[static_cast<std::size_t>(item.index)];
            const int c = values_[static_cast<std::size_t>(gate.cond)];
            if (c < 0 || c >= static_cast<int>(gate.branches.size()))
                throw std::logic_error("gate condition " + g_.var_name(gate.cond) + " unset");
            branches_[static_cast<std::size_t>(item.index)] = c;
            run_block(gate.branches[static_cast<std::size_t>(c)]);
            continue;
        }
        const auto& f = g_.factors[static_cast<std::size_t>(item.index)];
        auto operand = [&](const ir::Operand& o) {
            const int v = o.is_literal() ? o.literal : values_[static_cast<std::size_t>(o.cell)];
            if (v < 0) throw std::logic_error("read of unset cell " + g_.operand_name(o));
            return v;
        };
        int out = 0;
        switch (f.kind) {
        case ir::FactorKind::Const: out = f.value; break;
        case ir::FactorKind::Copy: out = operand(f.inputs[0]); break;
        case ir::FactorKind::Table:
            args_.clear();
            for (const auto& in : f.inputs) args_.push_back(operand(in));
            out = g_.tables[static_cast<std::size_t>(f.table)].lookup(args_);
            break;
        }
        values_[static_cast<std::size_t>(f.dst)] = out;
    }
}

ExecutionResult execute(const Graph& g, const ParamAssignment& p, std::span<const CellValue> inputs) {
    require_valid(g, p);
    Machine m(g);
    m.run(p.values, inputs);
    ExecutionResult r;
    r.trace.values.assign(m.values().begin(), m.values().end());
    r.trace.branch.assign(m.branches().begin(), m.branches().end());
    for (int o : g.output_ids) r.outputs.push_back(r.trace.values[static_cast<std::size_t>(o)]);
    return r;
}

std::optional<std::size_t> first_failing_example(const Graph& g, const ParamAssignment& p,
                                                 const IOExamples& io) {
    require_valid(g, p);
    Machine m(g);
    for (std::size_t e = 0; e < io.size(); ++e)
        if (!m.matches(p.values, io[e])) return e;
    return std::nullopt;
}

bool check_consistency(const Graph& g, const ParamAssignment& p, const IOExamples& io) {
    return !first_failing_example(g, p, io).has_value();
}

namespace {

std::string index_text(const std::vector<int>& index) {
    std::string s = "[";
    for (std::size_t i = 0; i < index.size(); ++i) s += (i ? "," : "") + std::to_string(index[i]);
    return s + "]";
}

const ir::DeclRange* turing_decl(const Graph& g, const char* name) {
    const auto* d = g.find_decl(name);
    if (!d || d->kind != ir::VarKind::Param || d->shape.size() != 2) return nullptr;
    return d;
}

bool is_turing(const Graph& g) {
    const auto* w = turing_decl(g, "write");
    const auto* m = turing_decl(g, "move");
    const auto* n = turing_decl(g, "next_state");
    return w && m && n && w->shape == m->shape && w->shape == n->shape && m->domain == 3;
}

std::string render_turing(const Graph& g, const ParamAssignment& p) {
    const auto* w = g.find_decl("write");
    const auto* m = g.find_decl("move");
    const auto* n = g.find_decl("next_state");
    const int states = w->shape[0];
    const int symbols = w->shape[1];
    static const char* moves = "LSR";
    std::ostringstream os;
    for (int s = 0; s < states; ++s) {
        for (int a = 0; a < symbols; ++a) {
            const int k = s * symbols + a;
            const int next = p.value_of(g, n->first + k);
            os << '(' << s << ',' << a << ") -> (" << p.value_of(g, w->first + k) << ','
               << moves[p.value_of(g, m->first + k)] << ',';
            if (next >= states)
                os << "halt";
            else
                os << next;
            os << ")\n";
        }
    }
    return os.str();
}

}  // namespace

std::string render_program(const Graph& g, const ParamAssignment& p, RenderStyle style) {
    require_valid(g, p);
    if (g.param_ids.empty()) return "(constant program)\n";
    if (style == RenderStyle::Turing || (style == RenderStyle::Auto && is_turing(g)))
        if (is_turing(g)) return render_turing(g, p);
    std::ostringstream os;
    for (const auto& d : g.decls) {
        if (d.kind != ir::VarKind::Param) continue;
        for (int c = d.first; c < d.first + d.count; ++c) {
            const auto& v = g.vars[static_cast<std::size_t>(c)];
            os << v.name << (v.index.empty() ? "" : index_text(v.index)) << " = " << p.value_of(g, c)
               << '\n';
        }
    }
    return os.str();
}

}  // namespace gsyn::exec
