#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gsyn/exec/executor.hpp"
#include "gsyn/ir/instance.hpp"

namespace gsyn::fmgd {

// Flat logit vector; Param cell k owns [offset(k), offset(k) + domain(k)).
using Logits = std::vector<double>;

enum class OpKind { Const, Copy, Table, Mix };

// A slot holds one probability vector. Arguments are slots or literals.
struct Arg {
    int slot = -1;
    int literal = 0;
    bool is_literal() const { return slot < 0; }
};

// Mix: args[0] is the gate condition, args[1 + b] the branch-b slot.
struct Op {
    OpKind kind = OpKind::Const;
    int out = -1;
    int value = 0;
    int table = -1;
    std::vector<Arg> args;
};

// Per-example marginals for every slot of the program.
struct MarginalState {
    std::vector<std::vector<double>> slots;  // [example][flat slot storage]
};

struct Evaluation {
    double loss = 0.0;       // data loss - lambda * entropy
    double data_loss = 0.0;  // sum of -log marginal of every observation
    double entropy = 0.0;    // sum over Param cells of H(softmax(theta))
    std::vector<double> gradient;
};

// Relaxation of an InstanceGraph: Params become softmax distributions, every
// factor propagates marginals, gates mix their branches by the condition's
// marginal. Compiled once from the base graph and run per example.
class DiffProgram {
public:
    static DiffProgram relax(const ir::InstanceGraph& ig);

    const ir::Graph& graph() const { return *ig_.base; }
    const ir::InstanceGraph& instance() const { return ig_; }

    int num_logits() const { return num_logits_; }
    int num_params() const { return static_cast<int>(logit_offset_.size()); }
    int logit_offset(int param) const { return logit_offset_[static_cast<std::size_t>(param)]; }
    int logit_dim(int param) const { return logit_dim_[static_cast<std::size_t>(param)]; }

    int num_slots() const { return static_cast<int>(slot_offset_.size()); }
    int slot_offset(int s) const { return slot_offset_[static_cast<std::size_t>(s)]; }
    int slot_dim(int s) const { return slot_dim_[static_cast<std::size_t>(s)]; }
    int slot_storage() const { return slot_total_; }
    // Slot holding the var's marginal at the end of the program (-1 if never written).
    int final_slot(int var) const { return final_slot_[static_cast<std::size_t>(var)]; }
    const std::vector<Op>& ops() const { return ops_; }

    // Loss (with entropy weight lambda) and optionally its gradient and marginals.
    Evaluation evaluate(const Logits& theta, double lambda, bool want_gradient,
                        MarginalState* marginals = nullptr) const;

    double forward(const Logits& theta, MarginalState* marginals = nullptr, double lambda = 0.0) const;
    std::vector<double> backward(const Logits& theta, double lambda = 0.0) const;

    // Per-cell argmax (lowest index on ties).
    exec::ParamAssignment discretize(const Logits& theta) const;
    // Logits with `high` on the assigned value and `low` elsewhere.
    Logits point_mass(const exec::ParamAssignment& p, double high = 0.0, double low = -1000.0) const;

private:
    void run_forward(int example, const std::vector<double>& param_mu, std::vector<double>& mu) const;
    void run_backward(const std::vector<double>& mu, std::vector<double>& adj) const;
    int new_slot(int dim);

    ir::InstanceGraph ig_;
    int num_logits_ = 0;
    std::vector<int> logit_offset_, logit_dim_;
    std::vector<int> slot_offset_, slot_dim_;
    int slot_total_ = 0;
    std::vector<int> param_slot_;  // per param ordinal
    std::vector<int> input_slot_;  // per var id, -1 unless Input
    std::vector<int> final_slot_;  // per var id
    std::vector<Op> ops_;
};

}  // namespace gsyn::fmgd
