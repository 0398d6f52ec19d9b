#include <cmath>
#include <functional>
#include <sstream>

#include "gsyn/frontend/write_tracker.hpp"
#include "gsyn/ir/graph.hpp"

namespace gsyn::ir {

int Graph::find_var(const std::string& name, std::span<const int> index) const {
    for (const auto& v : vars) {
        if (v.name == name && std::equal(v.index.begin(), v.index.end(), index.begin(), index.end()))
            return v.id;
    }
    return -1;
}

const DeclRange* Graph::find_decl(const std::string& name) const {
    for (const auto& d : decls)
        if (d.name == name) return &d;
    return nullptr;
}

namespace {

using frontend::ElabStmt;
using frontend::RhsKind;

struct Budget {};

class Lowerer {
public:
    Lowerer(const frontend::TypedModel& m, const LowerOptions& opts, Graph& g)
        : m_(m), opts_(opts), g_(g) {}

    void run() {
        g_.blocks.push_back(Block{});
        block(m_.body, 0);
    }

private:
    void block(const std::vector<ElabStmt>& body, int b) {
        for (const auto& s : body) {
            if (s.kind == ElabStmt::Kind::Gate) {
                const int gid = static_cast<int>(g_.gates.size());
                g_.gates.push_back(GateNode{s.cell, {}, b, s.line});
                g_.blocks[static_cast<std::size_t>(b)].items.push_back({BlockItem::Kind::Gate, gid});
                for (std::size_t v = 0; v < s.branches.size(); ++v) {
                    const int child = static_cast<int>(g_.blocks.size());
                    g_.blocks.push_back(Block{gid, static_cast<int>(v), {}});
                    g_.gates[static_cast<std::size_t>(gid)].branches.push_back(child);
                    block(s.branches[v], child);
                }
                continue;
            }
            Factor f;
            f.dst = s.cell;
            f.block = b;
            f.line = s.line;
            switch (s.rhs) {
            case RhsKind::Literal:
                f.kind = FactorKind::Const;
                f.value = s.args.at(0).literal;
                break;
            case RhsKind::Copy:
                f.kind = FactorKind::Copy;
                f.inputs = s.args;
                break;
            case RhsKind::Call:
                f.kind = FactorKind::Table;
                f.table = s.fn;
                f.inputs = s.args;
                break;
            }
            if (g_.factors.size() >= opts_.max_factors) throw Budget{};
            g_.blocks[static_cast<std::size_t>(b)].items.push_back(
                {BlockItem::Kind::Factor, static_cast<int>(g_.factors.size())});
            g_.factors.push_back(std::move(f));
        }
    }

    const frontend::TypedModel& m_;
    const LowerOptions& opts_;
    Graph& g_;
};

}  // namespace

Checked<Graph> lower(const frontend::TypedModel& m, const LowerOptions& opts) {
    Checked<Graph> result;
    if (m.cells.size() > opts.max_vars) {
        result.diagnostics.push_back(make_error(
            {}, "too-large",
            "graph exceeds size budget: " + std::to_string(m.cells.size()) + " var cells > " +
                std::to_string(opts.max_vars)));
        return result;
    }
    Graph g;
    g.model_name = m.name;
    g.constants = m.constants;
    for (const auto& d : m.decls)
        g.decls.push_back(DeclRange{d.name, d.kind, d.domain, d.shape, d.first_cell, d.cell_count});
    g.vars.reserve(m.cells.size());
    for (std::size_t c = 0; c < m.cells.size(); ++c) {
        const auto& d = m.decl_of(static_cast<int>(c));
        VarNode v{static_cast<int>(c), d.domain, d.kind, d.name, m.cells[c].index};
        switch (d.kind) {
        case VarKind::Param: g.param_ids.push_back(v.id); break;
        case VarKind::Input: g.input_ids.push_back(v.id); break;
        case VarKind::Output: g.output_ids.push_back(v.id); break;
        case VarKind::Var: break;
        }
        g.vars.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < m.functions.size(); ++i) {
        const auto& fn = m.functions[i];
        g.tables.push_back(
            FunctionTable{static_cast<int>(i), fn.name, fn.arg_domains, fn.out_domain, fn.entries});
    }
    try {
        Lowerer(m, opts, g).run();
    } catch (const Budget&) {
        result.diagnostics.push_back(make_error(
            {}, "too-large",
            "graph exceeds size budget: more than " + std::to_string(opts.max_factors) + " factors"));
        return result;
    }
    result.value = std::move(g);
    return result;
}

ParamSpaceSize param_space_size(const Graph& g) {
    ParamSpaceSize s;
    s.value = 1;
    for (int p : g.param_ids) {
        s.value *= g.vars[static_cast<std::size_t>(p)].domain;
        s.log10 += std::log10(static_cast<double>(g.vars[static_cast<std::size_t>(p)].domain));
    }
    return s;
}

namespace {

std::string factor_text(const Graph& g, const Factor& f) {
    std::ostringstream os;
    os << g.var_name(f.dst) << " <- ";
    switch (f.kind) {
    case FactorKind::Const: os << f.value; break;
    case FactorKind::Copy: os << g.operand_name(f.inputs.at(0)); break;
    case FactorKind::Table:
        os << g.tables[static_cast<std::size_t>(f.table)].name << '(';
        for (std::size_t i = 0; i < f.inputs.size(); ++i)
            os << (i ? ", " : "") << g.operand_name(f.inputs[i]);
        os << ')';
        break;
    }
    return os.str();
}

const char* kind_name(VarKind k) { return frontend::to_string(k); }

}  // namespace

Diagnostics validate_ssa(const Graph& g) {
    Diagnostics diags;
    auto err = [&](int line, std::string code, std::string msg) {
        diags.push_back(make_error({line, 0, 0}, std::move(code), std::move(msg)));
    };
    const int nvars = static_cast<int>(g.vars.size());
    auto operand_ok = [&](const Operand& o, int domain) {
        if (o.is_literal()) return o.literal >= 0 && o.literal < domain;
        return o.cell < nvars && g.vars[static_cast<std::size_t>(o.cell)].domain == domain;
    };

    frontend::WriteTracker tracker(g.vars.size());
    auto read = [&](int v, int line) {
        const auto k = g.vars[static_cast<std::size_t>(v)].kind;
        if (k == VarKind::Param || k == VarKind::Input) return;
        if (!tracker.definitely_written(v))
            err(line, "read-before-write",
                "line " + std::to_string(line) + ": read of " + g.var_name(v) +
                    " before it is written on every path");
    };

    std::function<void(int)> walk = [&](int b) {
        for (const auto& item : g.blocks[static_cast<std::size_t>(b)].items) {
            if (item.kind == BlockItem::Kind::Factor) {
                const Factor& f = g.factors[static_cast<std::size_t>(item.index)];
                if (f.dst < 0 || f.dst >= nvars) {
                    err(f.line, "internal", "factor f" + std::to_string(item.index) + " has no valid destination");
                    continue;
                }
                const int dom = g.vars[static_cast<std::size_t>(f.dst)].domain;
                switch (f.kind) {
                case FactorKind::Const:
                    if (f.value < 0 || f.value >= dom)
                        err(f.line, "domain-mismatch", "constant out of domain in " + factor_text(g, f));
                    break;
                case FactorKind::Copy:
                    if (f.inputs.size() != 1 || !operand_ok(f.inputs[0], dom))
                        err(f.line, "domain-mismatch", "ill-formed copy " + factor_text(g, f));
                    break;
                case FactorKind::Table: {
                    if (f.table < 0 || f.table >= static_cast<int>(g.tables.size())) {
                        err(f.line, "internal", "unknown table in factor f" + std::to_string(item.index));
                        break;
                    }
                    const auto& t = g.tables[static_cast<std::size_t>(f.table)];
                    if (t.input_domains.size() != f.inputs.size() || t.output_domain != dom) {
                        err(f.line, "arity", "table arity/domain mismatch in " + factor_text(g, f));
                        break;
                    }
                    for (std::size_t i = 0; i < f.inputs.size(); ++i)
                        if (!operand_ok(f.inputs[i], t.input_domains[i]))
                            err(f.line, "domain-mismatch", "table input out of domain in " + factor_text(g, f));
                    break;
                }
                }
                for (const auto& in : f.inputs)
                    if (!in.is_literal() && in.cell < nvars) read(in.cell, f.line);
                const auto dk = g.vars[static_cast<std::size_t>(f.dst)].kind;
                if (dk == VarKind::Param || dk == VarKind::Input) {
                    err(f.line, "write-" + std::string(dk == VarKind::Param ? "param" : "input"),
                        std::string(kind_name(dk)) + " " + g.var_name(f.dst) +
                            " must have no writers (line " + std::to_string(f.line) + ")");
                    continue;
                }
                if (auto prev = tracker.write(f.dst, item.index)) {
                    const auto& pf = g.factors[static_cast<std::size_t>(*prev)];
                    err(f.line, "double-write",
                        "double write to " + g.var_name(f.dst) + ": f" + std::to_string(*prev) +
                            " (line " + std::to_string(pf.line) + ": " + factor_text(g, pf) +
                            ") and f" + std::to_string(item.index) + " (line " +
                            std::to_string(f.line) + ": " + factor_text(g, f) + ")");
                }
                continue;
            }
            const GateNode& gate = g.gates[static_cast<std::size_t>(item.index)];
            if (gate.cond < 0 || gate.cond >= nvars) {
                err(gate.line, "internal", "gate g" + std::to_string(item.index) + " has no condition");
                continue;
            }
            read(gate.cond, gate.line);
            if (static_cast<int>(gate.branches.size()) != g.vars[static_cast<std::size_t>(gate.cond)].domain)
                err(gate.line, "gate-arity",
                    "gate g" + std::to_string(item.index) + " on " + g.var_name(gate.cond) + " has " +
                        std::to_string(gate.branches.size()) + " branches but domain " +
                        std::to_string(g.vars[static_cast<std::size_t>(gate.cond)].domain));
            tracker.begin_gate();
            for (int child : gate.branches) {
                tracker.begin_branch();
                walk(child);
                tracker.end_branch();
            }
            for (const auto& pw : tracker.end_gate()) {
                std::ostringstream os;
                os << "missing write: " << g.var_name(pw.cell) << " is written in branch";
                os << (pw.writing_branches.size() > 1 ? "es " : " ");
                for (std::size_t i = 0; i < pw.writing_branches.size(); ++i)
                    os << (i ? "," : "") << pw.writing_branches[i];
                os << " but not in branch" << (pw.missing_branches.size() > 1 ? "es " : " ");
                for (std::size_t i = 0; i < pw.missing_branches.size(); ++i)
                    os << (i ? "," : "") << pw.missing_branches[i];
                os << " of gate g" << item.index << " on " << g.var_name(gate.cond);
                err(gate.line, "missing-write", os.str());
            }
        }
    };
    if (!g.blocks.empty()) walk(0);
    for (int o : g.output_ids)
        if (tracker.at(o).max == 0)
            err(0, "missing-write", "output " + g.var_name(o) + " is never written");
    return diags;
}

std::string dump(const Graph& g) {
    std::ostringstream os;
    const auto d = param_space_size(g);
    os << "graph " << g.model_name << '\n';
    for (const auto& [name, value] : g.constants) os << "const " << name << " = " << value << '\n';
    os << "params " << g.param_ids.size() << " D = " << d.value.str() << '\n';
    for (const auto& v : g.vars)
        os << "var v" << v.id << ' ' << kind_name(v.kind) << ' ' << g.var_name(v.id) << " : "
           << v.domain << '\n';
    for (const auto& t : g.tables) {
        os << "table t" << t.id << ' ' << t.name << " (";
        for (std::size_t i = 0; i < t.input_domains.size(); ++i)
            os << (i ? ", " : "") << t.input_domains[i];
        os << ") -> " << t.output_domain << " :";
        for (int e : t.entries) os << ' ' << e;
        os << '\n';
    }
    std::function<void(int, int)> walk = [&](int b, int depth) {
        const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
        for (const auto& item : g.blocks[static_cast<std::size_t>(b)].items) {
            if (item.kind == BlockItem::Kind::Factor) {
                const auto& f = g.factors[static_cast<std::size_t>(item.index)];
                os << pad << 'f' << item.index << ' ' << factor_text(g, f) << "  ; line " << f.line
                   << '\n';
                continue;
            }
            const auto& gate = g.gates[static_cast<std::size_t>(item.index)];
            os << pad << 'g' << item.index << " gate on " << g.var_name(gate.cond) << "  ; line "
               << gate.line << '\n';
            for (std::size_t v = 0; v < gate.branches.size(); ++v) {
                os << pad << "  case " << v << ": b" << gate.branches[v] << '\n';
                walk(gate.branches[v], depth + 2);
            }
        }
    };
    os << "block b0\n";
    if (!g.blocks.empty()) walk(0, 1);
    return os.str();
}

}  // namespace gsyn::ir
