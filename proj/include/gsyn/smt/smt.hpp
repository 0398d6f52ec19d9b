#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsyn/exec/synthesis.hpp"
#include "gsyn/support/process.hpp"

namespace gsyn::smt {

struct SmtScript {
    std::string text;
    std::string logic = "QF_LIA";
    std::vector<std::string> param_symbols;  // aligned with Graph::param_ids
};

// Tables with at most this many entries become an ite chain; larger ones
// one implication per input tuple.
inline constexpr std::size_t kIteTableLimit = 16;

SmtScript emit_smtlib(const ir::InstanceGraph& ig);

enum class Verdict { Sat, Unsat, Unknown, SolverError };
const char* to_string(Verdict v);

struct SolveOutcome {
    Verdict verdict = Verdict::SolverError;
    std::optional<exec::ParamAssignment> program;
    std::string message;
    std::string output_digest;  // FNV-1a of the solver's stdout
    double wall_time_s = 0.0;
};

// Parses solver stdout: a verdict line, then for Sat the get-value bindings.
SolveOutcome parse_solver_output(const SmtScript& script, const ir::Graph& g, const std::string& out);

// Writes the script to a temporary .smt2 file and runs the solver on it.
// A Sat decoding that fails consistency is reported as SolverError.
SolveOutcome solve(const SmtScript& script, const ir::InstanceGraph& ig, const SolverConfig& cfg);

// emit + solve, mapped onto the common result type (Unsat -> Exhausted,
// Unknown -> Timeout).
exec::SynthesisResult synthesize(const ir::InstanceGraph& ig, const SolverConfig& cfg);

}  // namespace gsyn::smt
