#include "gsyn/fmgd/diff_program.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace gsyn::fmgd {

namespace {

struct Compiler {
    const ir::Graph& g;
    DiffProgram& dp;
    std::vector<Op>& ops;
    std::function<int(int)> new_slot;

    // Compiles block b against `current` (var -> slot); returns the vars it writes.
    std::vector<int> block(int b, std::vector<int>& current) {
        std::vector<int> written;
        for (const auto& item : g.blocks[static_cast<std::size_t>(b)].items) {
            if (item.kind == ir::BlockItem::Kind::Factor) {
                const auto& f = g.factors[static_cast<std::size_t>(item.index)];
                Op op;
                op.out = new_slot(g.vars[static_cast<std::size_t>(f.dst)].domain);
                for (const auto& in : f.inputs) op.args.push_back(arg(in, current));
                switch (f.kind) {
                case ir::FactorKind::Const:
                    op.kind = OpKind::Const;
                    op.value = f.value;
                    break;
                case ir::FactorKind::Copy:
                    op.kind = op.args[0].is_literal() ? OpKind::Const : OpKind::Copy;
                    op.value = op.args[0].literal;
                    if (op.kind == OpKind::Const) op.args.clear();
                    break;
                case ir::FactorKind::Table:
                    op.kind = OpKind::Table;
                    op.table = f.table;
                    break;
                }
                current[static_cast<std::size_t>(f.dst)] = op.out;
                ops.push_back(std::move(op));
                written.push_back(f.dst);
                continue;
            }
            const auto& gate = g.gates[static_cast<std::size_t>(item.index)];
            const int cond = current[static_cast<std::size_t>(gate.cond)];
            if (cond < 0) throw std::logic_error("gate condition read before write");
            const std::vector<int> pre = current;
            std::vector<std::vector<int>> maps;
            std::vector<int> changed;
            for (int child : gate.branches) {
                std::vector<int> m = pre;
                auto w = block(child, m);
                changed.insert(changed.end(), w.begin(), w.end());
                maps.push_back(std::move(m));
            }
            std::sort(changed.begin(), changed.end());
            changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
            for (int v : changed) {
                Op op;
                op.kind = OpKind::Mix;
                op.out = new_slot(g.vars[static_cast<std::size_t>(v)].domain);
                op.args.push_back(Arg{cond, 0});
                for (const auto& m : maps) {
                    const int s = m[static_cast<std::size_t>(v)];
                    if (s < 0) throw std::logic_error("gate branch leaves " + g.var_name(v) + " unwritten");
                    op.args.push_back(Arg{s, 0});
                }
                current[static_cast<std::size_t>(v)] = op.out;
                ops.push_back(std::move(op));
                written.push_back(v);
            }
        }
        return written;
    }

    Arg arg(const ir::Operand& o, const std::vector<int>& current) const {
        if (o.is_literal()) return Arg{-1, o.literal};
        const int s = current[static_cast<std::size_t>(o.cell)];
        if (s < 0) throw std::logic_error("read of " + g.var_name(o.cell) + " before write");
        return Arg{s, 0};
    }
};

// Visits every input tuple of a table op with its slot/literal arguments.
template <class F>
void for_each_tuple(const ir::FunctionTable& t, const Op& op, std::vector<int>& tuple, F&& fn) {
    const std::size_t k = op.args.size();
    tuple.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i)
        if (op.args[i].is_literal()) tuple[i] = op.args[i].literal;
    while (true) {
        fn();
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (op.args[i].is_literal()) {
                if (i == 0) return;
                continue;
            }
            if (++tuple[i] < t.input_domains[i]) break;
            tuple[i] = 0;
            if (i == 0) return;
        }
        if (k == 0) return;
    }
}

}  // namespace

int DiffProgram::new_slot(int dim) {
    slot_offset_.push_back(slot_total_);
    slot_dim_.push_back(dim);
    slot_total_ += dim;
    return static_cast<int>(slot_offset_.size()) - 1;
}

DiffProgram DiffProgram::relax(const ir::InstanceGraph& ig) {
    DiffProgram dp;
    dp.ig_ = ig;
    const ir::Graph& g = *ig.base;
    std::vector<int> current(g.vars.size(), -1);
    dp.input_slot_.assign(g.vars.size(), -1);
    for (int p : g.param_ids) {
        const int dom = g.vars[static_cast<std::size_t>(p)].domain;
        dp.logit_offset_.push_back(dp.num_logits_);
        dp.logit_dim_.push_back(dom);
        dp.num_logits_ += dom;
        const int s = dp.new_slot(dom);
        dp.param_slot_.push_back(s);
        current[static_cast<std::size_t>(p)] = s;
    }
    for (int i : g.input_ids) {
        const int s = dp.new_slot(g.vars[static_cast<std::size_t>(i)].domain);
        dp.input_slot_[static_cast<std::size_t>(i)] = s;
        current[static_cast<std::size_t>(i)] = s;
    }
    Compiler c{g, dp, dp.ops_, [&dp](int dim) { return dp.new_slot(dim); }};
    if (!g.blocks.empty()) c.block(0, current);
    dp.final_slot_ = std::move(current);
    return dp;
}

void DiffProgram::run_forward(int example, const std::vector<double>& param_mu, std::vector<double>& mu) const {
    const ir::Graph& g = *ig_.base;
    mu.assign(static_cast<std::size_t>(slot_total_), 0.0);
    std::copy(param_mu.begin(), param_mu.end(), mu.begin());  // param slots come first
    for (const auto& c : ig_.examples[static_cast<std::size_t>(example)].inputs) {
        const int s = input_slot_[static_cast<std::size_t>(c.var)];
        mu[static_cast<std::size_t>(slot_offset(s) + c.value)] = 1.0;
    }
    std::vector<int> tuple;
    for (const auto& op : ops_) {
        double* out = mu.data() + slot_offset(op.out);
        const int n = slot_dim(op.out);
        switch (op.kind) {
        case OpKind::Const:
            out[op.value] = 1.0;
            break;
        case OpKind::Copy: {
            const double* src = mu.data() + slot_offset(op.args[0].slot);
            std::copy(src, src + n, out);
            break;
        }
        case OpKind::Table: {
            const auto& t = g.tables[static_cast<std::size_t>(op.table)];
            for_each_tuple(t, op, tuple, [&] {
                double w = 1.0;
                for (std::size_t i = 0; i < tuple.size() && w != 0.0; ++i)
                    if (!op.args[i].is_literal()) w *= mu[static_cast<std::size_t>(slot_offset(op.args[i].slot) + tuple[i])];
                if (w != 0.0) out[t.lookup(tuple)] += w;
            });
            break;
        }
        case OpKind::Mix: {
            const double* w = mu.data() + slot_offset(op.args[0].slot);
            for (std::size_t b = 1; b < op.args.size(); ++b) {
                const double wb = w[b - 1];
                if (wb == 0.0) continue;
                const double* src = mu.data() + slot_offset(op.args[b].slot);
                for (int v = 0; v < n; ++v) out[v] += wb * src[v];
            }
            break;
        }
        }
    }
}

void DiffProgram::run_backward(const std::vector<double>& mu, std::vector<double>& adj) const {
    const ir::Graph& g = *ig_.base;
    std::vector<int> tuple;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
        const Op& op = *it;
        const double* a_out = adj.data() + slot_offset(op.out);
        const int n = slot_dim(op.out);
        switch (op.kind) {
        case OpKind::Const:
            break;
        case OpKind::Copy: {
            double* a_src = adj.data() + slot_offset(op.args[0].slot);
            for (int v = 0; v < n; ++v) a_src[v] += a_out[v];
            break;
        }
        case OpKind::Table: {
            const auto& t = g.tables[static_cast<std::size_t>(op.table)];
            for_each_tuple(t, op, tuple, [&] {
                const double up = a_out[t.lookup(tuple)];
                if (up == 0.0) return;
                for (std::size_t i = 0; i < tuple.size(); ++i) {
                    if (op.args[i].is_literal()) continue;
                    double others = up;
                    for (std::size_t j = 0; j < tuple.size() && others != 0.0; ++j)
                        if (j != i && !op.args[j].is_literal())
                            others *= mu[static_cast<std::size_t>(slot_offset(op.args[j].slot) + tuple[j])];
                    adj[static_cast<std::size_t>(slot_offset(op.args[i].slot) + tuple[i])] += others;
                }
            });
            break;
        }
        case OpKind::Mix: {
            const int cond = op.args[0].slot;
            for (std::size_t b = 1; b < op.args.size(); ++b) {
                const double wb = mu[static_cast<std::size_t>(slot_offset(cond)) + b - 1];
                const int s = op.args[b].slot;
                double dot = 0.0;
                for (int v = 0; v < n; ++v) {
                    dot += mu[static_cast<std::size_t>(slot_offset(s) + v)] * a_out[v];
                    adj[static_cast<std::size_t>(slot_offset(s) + v)] += wb * a_out[v];
                }
                adj[static_cast<std::size_t>(slot_offset(cond)) + b - 1] += dot;
            }
            break;
        }
        }
    }
}

Evaluation DiffProgram::evaluate(const Logits& theta, double lambda, bool want_gradient,
                                 MarginalState* marginals) const {
    if (static_cast<int>(theta.size()) != num_logits_) throw std::invalid_argument("logit vector has wrong size");
    const ir::Graph& g = *ig_.base;
    Evaluation ev;

    // Softmax via log-sum-exp; param slots occupy the first num_logits_ entries.
    std::vector<double> param_mu(static_cast<std::size_t>(num_logits_));
    std::vector<double> log_mu(static_cast<std::size_t>(num_logits_));
    std::vector<double> cell_entropy(logit_offset_.size());
    for (std::size_t p = 0; p < logit_offset_.size(); ++p) {
        const auto o = static_cast<std::size_t>(logit_offset_[p]);
        const auto d = static_cast<std::size_t>(logit_dim_[p]);
        const double m = *std::max_element(theta.begin() + static_cast<long>(o), theta.begin() + static_cast<long>(o + d));
        double z = 0.0;
        for (std::size_t i = 0; i < d; ++i) z += std::exp(theta[o + i] - m);
        const double lse = m + std::log(z);
        double h = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            log_mu[o + i] = theta[o + i] - lse;
            param_mu[o + i] = std::exp(log_mu[o + i]);
            h -= param_mu[o + i] * log_mu[o + i];
        }
        cell_entropy[p] = h;
        ev.entropy += h;
    }

    std::vector<double> mu, adj, param_adj(static_cast<std::size_t>(num_logits_), 0.0);
    if (marginals) marginals->slots.clear();
    bool infinite = false;
    for (int e = 0; e < ig_.num_examples(); ++e) {
        run_forward(e, param_mu, mu);
        if (want_gradient) adj.assign(mu.size(), 0.0);
        for (const auto& o : ig_.examples[static_cast<std::size_t>(e)].outputs) {
            const int s = final_slot_[static_cast<std::size_t>(o.var)];
            const double p = mu[static_cast<std::size_t>(slot_offset(s) + o.value)];
            if (!(p > 0.0)) {
                infinite = true;
                continue;
            }
            ev.data_loss -= std::log(p);
            if (want_gradient) adj[static_cast<std::size_t>(slot_offset(s) + o.value)] -= 1.0 / p;
        }
        if (want_gradient && !infinite) {
            run_backward(mu, adj);
            for (std::size_t i = 0; i < param_adj.size(); ++i) param_adj[i] += adj[i];
        }
        if (marginals) marginals->slots.push_back(mu);
    }
    (void)g;
    if (infinite) {
        ev.data_loss = std::numeric_limits<double>::infinity();
        ev.loss = ev.data_loss;
        if (want_gradient) ev.gradient.assign(static_cast<std::size_t>(num_logits_), 0.0);
        return ev;
    }
    ev.loss = ev.data_loss - lambda * ev.entropy;
    if (!want_gradient) return ev;

    ev.gradient.assign(static_cast<std::size_t>(num_logits_), 0.0);
    for (std::size_t p = 0; p < logit_offset_.size(); ++p) {
        const auto o = static_cast<std::size_t>(logit_offset_[p]);
        const auto d = static_cast<std::size_t>(logit_dim_[p]);
        double mean = 0.0;
        for (std::size_t i = 0; i < d; ++i) mean += param_mu[o + i] * param_adj[o + i];
        for (std::size_t i = 0; i < d; ++i) {
            const double mu_i = param_mu[o + i];
            ev.gradient[o + i] = mu_i * (param_adj[o + i] - mean) + lambda * mu_i * (log_mu[o + i] + cell_entropy[p]);
        }
    }
    return ev;
}

double DiffProgram::forward(const Logits& theta, MarginalState* marginals, double lambda) const {
    return evaluate(theta, lambda, false, marginals).loss;
}

std::vector<double> DiffProgram::backward(const Logits& theta, double lambda) const {
    return evaluate(theta, lambda, true).gradient;
}

exec::ParamAssignment DiffProgram::discretize(const Logits& theta) const {
    exec::ParamAssignment p;
    for (std::size_t k = 0; k < logit_offset_.size(); ++k) {
        const auto begin = theta.begin() + logit_offset_[k];
        p.values.push_back(static_cast<int>(std::max_element(begin, begin + logit_dim_[k]) - begin));
    }
    return p;
}

Logits DiffProgram::point_mass(const exec::ParamAssignment& p, double high, double low) const {
    Logits theta(static_cast<std::size_t>(num_logits_), low);
    for (std::size_t k = 0; k < logit_offset_.size(); ++k)
        theta[static_cast<std::size_t>(logit_offset_[k] + p.values.at(k))] = high;
    return theta;
}

}  // namespace gsyn::fmgd
