#include "gsyn/ilp/ilp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gsyn::ilp {

using ir::FactorKind;
using ir::Graph;
using ir::InstanceGraph;

namespace {

constexpr double kIntegralTol = 1e-6;

std::string num(double x) {
    if (std::abs(x) < 1e15 && x == std::floor(x)) return std::to_string(static_cast<long long>(x));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Emitter {
public:
    Emitter(const InstanceGraph& ig, Mode mode) : ig_(ig), g_(*ig.base) {
        m_.mode = mode;
        m_.title = "model " + g_.model_name + ": " + std::to_string(ig.num_examples()) + " examples, " +
                   (mode == Mode::Integral ? "integral" : "relaxed");
    }

    IlpModel run() {
        const auto psyms = ir::param_symbols(g_);
        for (std::size_t k = 0; k < g_.param_ids.size(); ++k)
            m_.param_indicators.push_back(cell_block(psyms[k], g_.param_ids[k], g_.vars[static_cast<std::size_t>(g_.param_ids[k])].domain));
        cells_.assign(static_cast<std::size_t>(ig_.num_examples()), std::vector<std::vector<int>>(g_.vars.size()));
        for (int e = 0; e < ig_.num_examples(); ++e) {
            for (const auto& v : g_.vars)
                if (v.kind != frontend::VarKind::Param)
                    cells_[static_cast<std::size_t>(e)][static_cast<std::size_t>(v.id)] =
                        cell_block(ir::cell_symbol(e, v.id), ig_.node(e, v.id), v.domain);
            const auto& ex = ig_.examples[static_cast<std::size_t>(e)];
            for (const auto& c : ex.inputs) add_row("cl", {{b(e, c.var, c.value), 1.0}}, Sense::Eq, 1.0);
            block(e, 0, -1);
            for (const auto& c : ex.outputs) add_row("cl", {{b(e, c.var, c.value), 1.0}}, Sense::Eq, 1.0);
        }
        return std::move(m_);
    }

private:
    int add_var(std::string name, IndicatorRef ref = {}) {
        m_.vars.push_back({std::move(name), 0.0, 1.0, m_.mode == Mode::Integral});
        m_.indicator.push_back(ref);
        return static_cast<int>(m_.vars.size()) - 1;
    }

    void add_row(const char* tag, std::vector<Term> terms, Sense sense, double rhs) {
        std::vector<Term> merged;
        for (const auto& t : terms) {
            auto it = std::find_if(merged.begin(), merged.end(), [&](const Term& m) { return m.var == t.var; });
            if (it != merged.end()) it->coef += t.coef;
            else merged.push_back(t);
        }
        std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
        m_.rows.push_back({tag + std::to_string(m_.rows.size()), std::move(merged), sense, rhs});
    }

    // Equality inside a branch with activity `act`: |lhs - rhs| <= 1 - act.
    void gated_eq(const char* tag, std::vector<Term> terms, double rhs, int act) {
        if (act < 0) {
            add_row(tag, std::move(terms), Sense::Eq, rhs);
            return;
        }
        std::vector<Term> neg;
        for (const auto& t : terms) neg.push_back({t.var, -t.coef});
        terms.push_back({act, 1.0});
        neg.push_back({act, 1.0});
        add_row(tag, std::move(terms), Sense::Le, 1.0 + rhs);
        add_row(tag, std::move(neg), Sense::Le, 1.0 - rhs);
    }

    std::vector<int> cell_block(const std::string& sym, int node, int domain) {
        std::vector<int> ids;
        std::vector<Term> sum;
        for (int v = 0; v < domain; ++v) {
            ids.push_back(add_var("b_" + sym + "_" + std::to_string(v), {node, v}));
            sum.push_back({ids.back(), 1.0});
        }
        add_row("oh", std::move(sum), Sense::Eq, 1.0);
        return ids;
    }

    int b(int e, int var, int value) const {
        const auto& v = g_.vars[static_cast<std::size_t>(var)];
        if (v.kind == frontend::VarKind::Param) {
            const auto it = std::find(g_.param_ids.begin(), g_.param_ids.end(), var);
            return m_.param_indicators[static_cast<std::size_t>(it - g_.param_ids.begin())][static_cast<std::size_t>(value)];
        }
        return cells_[static_cast<std::size_t>(e)][static_cast<std::size_t>(var)][static_cast<std::size_t>(value)];
    }

    void block(int e, int blk, int act) {
        for (const auto& item : g_.blocks[static_cast<std::size_t>(blk)].items) {
            if (item.kind == ir::BlockItem::Kind::Factor) {
                factor(e, item.index, act);
                continue;
            }
            const auto& gate = g_.gates[static_cast<std::size_t>(item.index)];
            for (std::size_t v = 0; v < gate.branches.size(); ++v) {
                if (g_.blocks[static_cast<std::size_t>(gate.branches[v])].items.empty()) continue;
                const int cv = b(e, gate.cond, static_cast<int>(v));
                int inner = cv;
                if (act >= 0) {
                    inner = add_var("a_" + std::to_string(e) + "_" + std::to_string(item.index) + "_" + std::to_string(v));
                    add_row("ga", {{inner, 1.0}, {act, -1.0}}, Sense::Le, 0.0);
                    add_row("ga", {{inner, 1.0}, {cv, -1.0}}, Sense::Le, 0.0);
                    add_row("ga", {{inner, 1.0}, {act, -1.0}, {cv, -1.0}}, Sense::Ge, -1.0);
                }
                block(e, gate.branches[v], inner);
            }
        }
    }

    void constant(int e, int dst, int value, int act) { gated_eq("k", {{b(e, dst, value), 1.0}}, 1.0, act); }

    void factor(int e, int fi, int act) {
        const auto& f = g_.factors[static_cast<std::size_t>(fi)];
        const int domain = g_.vars[static_cast<std::size_t>(f.dst)].domain;
        switch (f.kind) {
        case FactorKind::Const: constant(e, f.dst, f.value, act); return;
        case FactorKind::Copy:
            if (f.inputs[0].is_literal()) {
                constant(e, f.dst, f.inputs[0].literal, act);
                return;
            }
            for (int v = 0; v < domain; ++v)
                gated_eq("cp", {{b(e, f.dst, v), 1.0}, {b(e, f.inputs[0].cell, v), -1.0}}, 0.0, act);
            return;
        case FactorKind::Table: break;
        }
        const auto& t = g_.tables[static_cast<std::size_t>(f.table)];
        std::vector<int> tuple(f.inputs.size(), 0);
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < f.inputs.size(); ++i) {
            if (f.inputs[i].is_literal()) tuple[i] = f.inputs[i].literal;
            else free.push_back(i);
        }
        if (free.empty()) {
            constant(e, f.dst, t.lookup(tuple), act);
            return;
        }
        std::vector<Term> sum;
        std::vector<std::vector<Term>> by_value(static_cast<std::size_t>(domain));
        const std::string prefix = "j_" + std::to_string(e) + "_" + std::to_string(fi) + "_";
        int n = 0;
        for (bool more = true; more;) {
            const int j = add_var(prefix + std::to_string(n++));
            for (std::size_t i : free)
                add_row("jt", {{j, 1.0}, {b(e, f.inputs[i].cell, tuple[i]), -1.0}}, Sense::Le, 0.0);
            sum.push_back({j, 1.0});
            by_value[static_cast<std::size_t>(t.lookup(tuple))].push_back({j, -1.0});
            more = false;
            for (std::size_t k = free.size(); k-- > 0;) {
                if (++tuple[free[k]] < t.input_domains[free[k]]) {
                    more = true;
                    break;
                }
                tuple[free[k]] = 0;
            }
        }
        gated_eq("js", std::move(sum), 1.0, act);
        for (int v = 0; v < domain; ++v) {
            auto terms = by_value[static_cast<std::size_t>(v)];
            terms.push_back({b(e, f.dst, v), 1.0});
            gated_eq("tb", std::move(terms), 0.0, act);
        }
    }

    const InstanceGraph& ig_;
    const Graph& g_;
    IlpModel m_;
    std::vector<std::vector<std::vector<int>>> cells_;  // [example][var][value]
};

Verdict header_verdict(std::string line, const std::vector<std::string>& tok, SolutionFormat format) {
    std::transform(line.begin(), line.end(), line.begin(), [](unsigned char c) { return std::tolower(c); });
    if (format == SolutionFormat::NameValue) {
        if (tok.size() != 2 || tok[0] != "status") return Verdict::SolverError;
        const std::string& w = tok[1];
        if (w == "optimal" || w == "feasible") return Verdict::Feasible;
        if (w == "infeasible") return Verdict::Infeasible;
        if (w == "unknown" || w == "time_limit" || w == "timeout") return Verdict::Unknown;
        return Verdict::SolverError;
    }
    if (line.find("infeasible") != std::string::npos) return Verdict::Infeasible;
    if (line.rfind("optimal", 0) == 0) return Verdict::Feasible;
    if (line.rfind("stopped", 0) == 0) return Verdict::Unknown;
    return Verdict::SolverError;
}

class LineWriter {
public:
    explicit LineWriter(std::ostringstream& out) : out_(out) {}
    void start(const std::string& s) {
        out_ << s;
        width_ = s.size();
    }
    void put(const std::string& s) {
        if (width_ + s.size() > 250) {
            out_ << "\n  ";
            width_ = 2;
        }
        out_ << s;
        width_ += s.size();
    }
    void end() { out_ << "\n"; }

private:
    std::ostringstream& out_;
    std::size_t width_ = 0;
};

}  // namespace

int IlpModel::find_var(const std::string& name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == name) return static_cast<int>(i);
    return -1;
}

IlpModel emit_ilp(const InstanceGraph& ig, Mode mode) { return Emitter(ig, mode).run(); }

std::string write_lp_file(const IlpModel& m) {
    std::ostringstream out;
    LineWriter w(out);
    out << "\\ " << m.title << "\n";
    out << "Minimize\n obj: " << num(m.objective_constant) << "\n";
    out << "Subject To\n";
    for (const auto& r : m.rows) {
        w.start(" " + r.name + ":");
        for (std::size_t i = 0; i < r.terms.size(); ++i) {
            const auto& t = r.terms[i];
            std::string s = t.coef < 0 ? " - " : (i ? " + " : " ");
            const double a = std::abs(t.coef);
            if (a != 1.0) s += num(a) + " ";
            w.put(s + m.vars[static_cast<std::size_t>(t.var)].name);
        }
        if (r.terms.empty()) w.put(" 0 " + m.vars.at(0).name);
        const char* sense = r.sense == Sense::Le ? " <= " : r.sense == Sense::Ge ? " >= " : " = ";
        w.put(sense + num(r.rhs));
        w.end();
    }
    out << "Bounds\n";
    for (const auto& v : m.vars) out << " " << num(v.lower) << " <= " << v.name << " <= " << num(v.upper) << "\n";
    bool any_int = false;
    for (const auto& v : m.vars) any_int |= v.integer;
    if (any_int) {
        out << "Generals\n";
        w.start("");
        for (const auto& v : m.vars)
            if (v.integer) w.put(" " + v.name);
        w.end();
    }
    out << "End\n";
    return out.str();
}

double max_violation(const IlpModel& m, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.vars.size(); ++i)
        worst = std::max({worst, m.vars[i].lower - x[i], x[i] - m.vars[i].upper});
    for (const auto& r : m.rows) {
        double lhs = 0.0;
        for (const auto& t : r.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
        switch (r.sense) {
        case Sense::Le: worst = std::max(worst, lhs - r.rhs); break;
        case Sense::Ge: worst = std::max(worst, r.rhs - lhs); break;
        case Sense::Eq: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
        }
    }
    return worst;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::Infeasible: return "infeasible";
    case Verdict::Unknown: return "unknown";
    case Verdict::SolverError: return "error";
    }
    return "error";
}

ParsedSolution parse_solution(const std::string& text, SolutionFormat format) {
    ParsedSolution r;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;)
            if (t != "**") tok.push_back(t);
        if (tok.empty()) continue;
        if (!header) {
            header = true;
            r.verdict = header_verdict(line, tok, format);
            if (r.verdict == Verdict::SolverError) {
                r.message = "unrecognized solution header: " + line;
                return r;
            }
            continue;
        }
        const std::size_t name_at = format == SolutionFormat::NameValue ? 0 : 1;
        if (tok.size() < name_at + 2) {
            r.verdict = Verdict::SolverError;
            r.message = "malformed solution line: " + line;
            return r;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(tok[name_at + 1], &used);
            if (used != tok[name_at + 1].size()) throw std::invalid_argument("trailing");
            r.values[tok[name_at]] = v;
        } catch (const std::exception&) {
            r.verdict = Verdict::SolverError;
            r.message = "malformed solution value: " + line;
            return r;
        }
    }
    if (!header) r.message = "empty solution";
    return r;
}

IlpOutcome solve_ilp(const IlpModel& m, const InstanceGraph& ig, const IlpSolverConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&](IlpOutcome r) {
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    };
    IlpOutcome r;
    if (cfg.solver.executable.empty()) {
        r.message = "no solver configured";
        return finish(r);
    }
    const std::string exe = find_executable(cfg.solver.executable);
    if (exe.empty()) {
        r.message = "solver not found: " + cfg.solver.executable;
        return finish(r);
    }
    TempFile model(".lp", write_lp_file(m));
    std::optional<TempFile> solution;
    std::vector<std::string> argv{exe};
    bool model_placed = false;
    for (const auto& a : cfg.solver.args) {
        if (a == "{model}") {
            argv.push_back(model.path());
            model_placed = true;
        } else if (a == "{solution}") {
            if (!solution) solution.emplace(".sol", "");
            argv.push_back(solution->path());
        } else {
            argv.push_back(a);
        }
    }
    if (!model_placed) argv.push_back(model.path());
    const ProcessResult pr = run_process(argv, cfg.solver.timeout_s);
    if (!pr.started) {
        r.message = pr.error;
        return finish(r);
    }
    std::string text = pr.out;
    if (solution && !pr.timed_out) {
        std::ifstream in(solution->path());
        std::ostringstream os;
        os << in.rdbuf();
        text = os.str();
    }
    r.output_digest = fnv1a_digest(text);
    if (pr.timed_out) {
        r.verdict = Verdict::Unknown;
        std::ostringstream msg;
        msg << "timeout after " << cfg.solver.timeout_s << " s";
        r.message = msg.str();
        return finish(r);
    }
    ParsedSolution sol = parse_solution(text, cfg.format);
    r.verdict = sol.verdict;
    r.message = sol.message;
    if (r.verdict == Verdict::SolverError) {
        r.message += " (digest " + r.output_digest + ", exit " + std::to_string(pr.exit_code) + ")";
        return finish(r);
    }
    if (r.verdict != Verdict::Feasible) return finish(r);

    auto fail = [&](std::string msg) {
        r.verdict = Verdict::SolverError;
        r.message = std::move(msg);
        r.program.reset();
        return finish(r);
    };
    r.x.assign(m.vars.size(), 0.0);  // solvers may omit zero-valued columns
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
        auto it = sol.values.find(m.vars[i].name);
        if (it != sol.values.end()) r.x[i] = it->second;
    }
    const double viol = max_violation(m, r.x);
    if (viol > 1e-5) return fail("solution violates the model by " + num(viol));
    if (m.mode == Mode::Relaxed) return finish(r);

    for (std::size_t i = 0; i < m.vars.size(); ++i)
        if (m.vars[i].integer && std::abs(r.x[i] - std::round(r.x[i])) > kIntegralTol)
            return fail("fractional solution in integral mode: " + m.vars[i].name + " = " + num(r.x[i]));
    exec::ParamAssignment p;
    for (const auto& ids : m.param_indicators) {
        int chosen = -1;
        for (std::size_t v = 0; v < ids.size(); ++v)
            if (r.x[static_cast<std::size_t>(ids[v])] > 0.5) {
                if (chosen >= 0) return fail("two indicators set for " + m.vars[static_cast<std::size_t>(ids[v])].name);
                chosen = static_cast<int>(v);
            }
        if (chosen < 0) return fail("no indicator set for a param cell");
        p.values.push_back(chosen);
    }
    if (!exec::check_consistency(*ig.base, p, ig.examples)) return fail("decoded program is inconsistent with the examples");
    r.program = std::move(p);
    return finish(r);
}

LpBoundReport lp_bound_report(const IlpModel& relaxed, const InstanceGraph& ig, const IlpSolverConfig& cfg) {
    if (relaxed.mode != Mode::Relaxed) throw std::invalid_argument("lp_bound_report needs a relaxed model");
    const IlpOutcome o = solve_ilp(relaxed, ig, cfg);
    LpBoundReport rep;
    rep.verdict = o.verdict;
    rep.feasible = o.verdict == Verdict::Feasible;
    rep.message = o.message;
    if (!rep.feasible) return rep;
    for (std::size_t i = 0; i < relaxed.vars.size(); ++i) {
        if (relaxed.indicator[i].node < 0) continue;
        ++rep.indicators;
        const double x = o.x[i];
        if (std::min(std::abs(x), std::abs(1.0 - x)) > kIntegralTol) ++rep.fractional;
    }
    rep.fractionality = rep.indicators ? static_cast<double>(rep.fractional) / rep.indicators : 0.0;
    return rep;
}

exec::SynthesisResult synthesize(const InstanceGraph& ig, const IlpSolverConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const IlpModel m = emit_ilp(ig, Mode::Integral);
    const IlpOutcome o = solve_ilp(m, ig, cfg);
    exec::SynthesisResult r;
    r.backend = "ilp";
    r.message = o.message;
    r.stats = {{"verdict", to_string(o.verdict)},
               {"output_digest", o.output_digest},
               {"variables", m.vars.size()},
               {"rows", m.rows.size()},
               {"solver_time_s", o.wall_time_s}};
    switch (o.verdict) {
    case Verdict::Feasible: r = exec::verified_success(ig, *o.program, std::move(r)); break;
    case Verdict::Infeasible:
        r.status = exec::Status::Exhausted;
        r.message = "infeasible: no consistent program";
        break;
    case Verdict::Unknown: r.status = exec::Status::Timeout; break;
    case Verdict::SolverError: r.status = exec::Status::SolverError; break;
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace gsyn::ilp
