#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsyn/exec/synthesis.hpp"
#include "gsyn/support/process.hpp"

namespace gsyn::ilp {

enum class Mode { Integral, Relaxed };
enum class Sense { Le, Ge, Eq };

struct IlpVar {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    bool integer = true;
};

struct Term {
    int var = 0;
    double coef = 1.0;
};

struct IlpRow {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::Eq;
    double rhs = 0.0;
};

// Cell indicator b_{x,v}: instance node id and value. Tuple and gate-activity
// variables have node -1.
struct IndicatorRef {
    int node = -1;
    int value = 0;
};

struct IlpModel {
    Mode mode = Mode::Integral;
    std::string title;
    std::vector<IlpVar> vars;
    std::vector<IlpRow> rows;
    double objective_constant = 0.0;
    std::vector<IndicatorRef> indicator;              // aligned with vars
    std::vector<std::vector<int>> param_indicators;  // [param ordinal][value] -> var index

    int find_var(const std::string& name) const;
};

// Indicator names are `b_<cell symbol>_<value>`; tuple indicators of a table
// factor `j_<example>_<factor>_<tuple>`; nested gate activities
// `a_<example>_<gate>_<branch>`.
IlpModel emit_ilp(const ir::InstanceGraph& ig, Mode mode);

// CPLEX LP format: Minimize / Subject To / Bounds / [Generals] / End.
std::string write_lp_file(const IlpModel& m);

// Largest violation of any row or bound at the given point (0 if feasible).
double max_violation(const IlpModel& m, const std::vector<double>& x);

// Solution formats read from the solver's stdout (or from the file named by
// a "{solution}" argument):
//   NameValue: "status <word>" line, then "<name> <value>" per variable.
//   Cbc:       "<Status> - objective value ..." line, then
//              "<index> <name> <value> <reduced cost>" per variable.
enum class SolutionFormat { NameValue, Cbc };

struct IlpSolverConfig {
    SolverConfig solver;  // "{model}" / "{solution}" args are substituted; the model path is appended otherwise
    SolutionFormat format = SolutionFormat::NameValue;
};

enum class Verdict { Feasible, Infeasible, Unknown, SolverError };
const char* to_string(Verdict v);

struct ParsedSolution {
    Verdict verdict = Verdict::SolverError;
    std::map<std::string, double> values;
    std::string message;
};

ParsedSolution parse_solution(const std::string& text, SolutionFormat format);

struct IlpOutcome {
    Verdict verdict = Verdict::SolverError;
    std::optional<exec::ParamAssignment> program;  // integral mode only
    std::vector<double> x;                           // aligned with vars when feasible
    std::string message;
    std::string output_digest;
    double wall_time_s = 0.0;
};

// Runs the solver on write_lp_file(m). In integral mode every variable must
// be within 1e-6 of an integer; the decoded program is checked against the
// examples before Feasible is reported.
IlpOutcome solve_ilp(const IlpModel& m, const ir::InstanceGraph& ig, const IlpSolverConfig& cfg);

struct LpBoundReport {
    Verdict verdict = Verdict::SolverError;
    bool feasible = false;
    int indicators = 0;
    int fractional = 0;
    double fractionality = 0.0;  // fractional / indicators
    std::string message;
};

// Solves the relaxed model and counts cell indicators off {0,1} by > 1e-6.
LpBoundReport lp_bound_report(const IlpModel& relaxed, const ir::InstanceGraph& ig, const IlpSolverConfig& cfg);

exec::SynthesisResult synthesize(const ir::InstanceGraph& ig, const IlpSolverConfig& cfg);

}  // namespace gsyn::ilp
