#include "gsyn/smt/smt.hpp"

#include <cctype>
#include <chrono>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gsyn::smt {

using ir::FactorKind;
using ir::Graph;
using ir::InstanceGraph;

namespace {

std::string in_range(const std::string& sym, int domain) {
    if (domain == 1) return "(= " + sym + " 0)";
    return "(and (<= 0 " + sym + ") (< " + sym + " " + std::to_string(domain) + "))";
}

std::string conj(const std::vector<std::string>& parts) {
    if (parts.empty()) return "true";
    if (parts.size() == 1) return parts[0];
    std::string s = "(and";
    for (const auto& p : parts) s += " " + p;
    return s + ")";
}

class Emitter {
public:
    Emitter(const Graph& g, const std::vector<std::string>& params) : g_(g), params_(params) {
        for (std::size_t k = 0; k < g_.param_ids.size(); ++k) param_ord_[g_.param_ids[k]] = static_cast<int>(k);
    }

    std::vector<std::string> block(int example, int b) const {
        std::vector<std::string> out;
        for (const auto& item : g_.blocks[static_cast<std::size_t>(b)].items) {
            if (item.kind == ir::BlockItem::Kind::Factor) {
                out.push_back(factor(example, g_.factors[static_cast<std::size_t>(item.index)]));
                continue;
            }
            const auto& gate = g_.gates[static_cast<std::size_t>(item.index)];
            const std::string c = sym(example, gate.cond);
            for (std::size_t v = 0; v < gate.branches.size(); ++v) {
                auto body = block(example, gate.branches[v]);
                if (body.empty()) continue;
                out.push_back("(=> (= " + c + " " + std::to_string(v) + ") " + conj(body) + ")");
            }
        }
        return out;
    }

    std::string sym(int example, int var) const {
        auto it = param_ord_.find(var);
        if (it != param_ord_.end()) return params_[static_cast<std::size_t>(it->second)];
        return ir::cell_symbol(example, var);
    }

private:
    std::string operand(int example, const ir::Operand& o) const {
        return o.is_literal() ? std::to_string(o.literal) : sym(example, o.cell);
    }

    std::string factor(int example, const ir::Factor& f) const {
        const std::string dst = sym(example, f.dst);
        switch (f.kind) {
        case FactorKind::Const: return "(= " + dst + " " + std::to_string(f.value) + ")";
        case FactorKind::Copy: return "(= " + dst + " " + operand(example, f.inputs[0]) + ")";
        case FactorKind::Table: return table(example, f, dst);
        }
        throw std::logic_error("unknown factor kind");
    }

    // Tuples consistent with literal arguments, in row-major order.
    std::string table(int example, const ir::Factor& f, const std::string& dst) const {
        const auto& t = g_.tables[static_cast<std::size_t>(f.table)];
        const std::size_t k = f.inputs.size();
        std::vector<std::pair<std::vector<int>, int>> rows;
        std::vector<int> tuple(k, 0);
        for (std::size_t i = 0; i < k; ++i)
            if (f.inputs[i].is_literal()) tuple[i] = f.inputs[i].literal;
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < k; ++i)
            if (!f.inputs[i].is_literal()) free.push_back(i);
        for (bool more = true; more;) {
            rows.push_back({tuple, t.lookup(tuple)});
            more = false;
            for (std::size_t j = free.size(); j-- > 0;) {
                if (++tuple[free[j]] < t.input_domains[free[j]]) {
                    more = true;
                    break;
                }
                tuple[free[j]] = 0;
            }
        }
        bool uniform = true;
        for (const auto& r : rows) uniform &= r.second == rows[0].second;
        if (uniform) return "(= " + dst + " " + std::to_string(rows[0].second) + ")";

        auto cond = [&](const std::vector<int>& tup) {
            std::vector<std::string> parts;
            for (std::size_t i = 0; i < k; ++i)
                if (!f.inputs[i].is_literal()) parts.push_back("(= " + sym(example, f.inputs[i].cell) + " " + std::to_string(tup[i]) + ")");
            return conj(parts);
        };
        if (t.entries.size() <= kIteTableLimit) {
            std::string e = std::to_string(rows.back().second);
            for (std::size_t r = rows.size() - 1; r-- > 0;)
                e = "(ite " + cond(rows[r].first) + " " + std::to_string(rows[r].second) + " " + e + ")";
            return "(= " + dst + " " + e + ")";
        }
        std::vector<std::string> parts;
        for (const auto& r : rows) parts.push_back("(=> " + cond(r.first) + " (= " + dst + " " + std::to_string(r.second) + "))");
        return conj(parts);
    }

    const Graph& g_;
    const std::vector<std::string>& params_;
    std::map<int, int> param_ord_;
};

// Minimal s-expression reader for get-value responses.
struct SexpReader {
    const std::string& s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size()) {
            if (std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
            else if (s[pos] == ';') {
                while (pos < s.size() && s[pos] != '\n') ++pos;
            } else break;
        }
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string atom() {
        skip();
        if (pos < s.size() && s[pos] == '|') {
            const std::size_t end = s.find('|', pos + 1);
            if (end == std::string::npos) return {};
            std::string a = s.substr(pos + 1, end - pos - 1);
            pos = end + 1;
            return a;
        }
        const std::size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '(' && s[pos] != ')') ++pos;
        return s.substr(start, pos - start);
    }
    std::optional<long long> integer() {
        if (eat('(')) {
            if (atom() != "-") return std::nullopt;
            auto v = integer();
            if (!v || !eat(')')) return std::nullopt;
            return -*v;
        }
        const std::string a = atom();
        if (a.empty() || !std::all_of(a.begin(), a.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            return std::nullopt;
        try {
            return std::stoll(a);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
};

}  // namespace

SmtScript emit_smtlib(const InstanceGraph& ig) {
    const Graph& g = *ig.base;
    SmtScript script;
    script.param_symbols = ir::param_symbols(g);
    Emitter em(g, script.param_symbols);

    std::ostringstream out;
    out << "; model " << g.model_name << ": " << ig.num_examples() << " examples, " << g.param_ids.size() << " params\n";
    out << "(set-option :produce-models true)\n";
    out << "(set-logic " << script.logic << ")\n";
    for (std::size_t k = 0; k < g.param_ids.size(); ++k) {
        const int p = g.param_ids[k];
        const auto& s = script.param_symbols[k];
        out << "(declare-const " << s << " Int)\n";
        out << "(assert " << in_range(s, g.vars[static_cast<std::size_t>(p)].domain) << ")\n";
    }
    for (int e = 0; e < ig.num_examples(); ++e) {
        out << "; example " << e << "\n";
        for (const auto& v : g.vars) {
            if (v.kind == frontend::VarKind::Param) continue;
            const std::string s = ir::cell_symbol(e, v.id);
            out << "(declare-const " << s << " Int) ; " << g.var_name(v.id) << "\n";
            out << "(assert " << in_range(s, v.domain) << ")\n";
        }
        for (const auto& c : ig.examples[static_cast<std::size_t>(e)].inputs)
            out << "(assert (= " << em.sym(e, c.var) << " " << c.value << "))\n";
        for (const auto& f : em.block(e, 0)) out << "(assert " << f << ")\n";
        for (const auto& c : ig.examples[static_cast<std::size_t>(e)].outputs)
            out << "(assert (= " << em.sym(e, c.var) << " " << c.value << "))\n";
    }
    out << "(check-sat)\n";
    if (!script.param_symbols.empty()) {
        out << "(get-value (";
        for (std::size_t k = 0; k < script.param_symbols.size(); ++k) out << (k ? " " : "") << script.param_symbols[k];
        out << "))\n";
    }
    script.text = out.str();
    return script;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
    case Verdict::SolverError: return "error";
    }
    return "error";
}

SolveOutcome parse_solver_output(const SmtScript& script, const Graph& g, const std::string& out) {
    SolveOutcome r;
    r.output_digest = fnv1a_digest(out);
    SexpReader rd{out};
    const std::string head = rd.atom();
    if (head == "unsat") {
        r.verdict = Verdict::Unsat;
        return r;
    }
    if (head == "unknown") {
        r.verdict = Verdict::Unknown;
        r.message = "solver answered unknown";
        return r;
    }
    if (head != "sat") {
        r.message = "unrecognized solver output (digest " + r.output_digest + ")";
        return r;
    }
    std::map<std::string, std::size_t> ord;
    for (std::size_t k = 0; k < script.param_symbols.size(); ++k) ord[script.param_symbols[k]] = k;
    exec::ParamAssignment p;
    p.values.assign(script.param_symbols.size(), -1);
    if (!script.param_symbols.empty()) {
        if (!rd.eat('(')) {
            r.message = "missing get-value response (digest " + r.output_digest + ")";
            return r;
        }
        while (!rd.eat(')')) {
            if (!rd.eat('(')) {
                r.message = "malformed get-value response (digest " + r.output_digest + ")";
                return r;
            }
            const std::string name = rd.atom();
            const auto value = rd.integer();
            if (!value || !rd.eat(')')) {
                r.message = "malformed binding for " + name + " (digest " + r.output_digest + ")";
                return r;
            }
            auto it = ord.find(name);
            if (it == ord.end()) continue;
            const int domain = g.vars[static_cast<std::size_t>(g.param_ids[it->second])].domain;
            if (*value < 0 || *value >= domain) {
                r.message = "value " + std::to_string(*value) + " for " + name + " outside its domain";
                return r;
            }
            p.values[it->second] = static_cast<int>(*value);
        }
        for (std::size_t k = 0; k < p.values.size(); ++k)
            if (p.values[k] < 0) {
                r.message = "no value reported for " + script.param_symbols[k];
                return r;
            }
    }
    r.verdict = Verdict::Sat;
    r.program = std::move(p);
    return r;
}

SolveOutcome solve(const SmtScript& script, const InstanceGraph& ig, const SolverConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&](SolveOutcome r) {
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    };
    SolveOutcome r;
    if (cfg.executable.empty()) {
        r.message = "no solver configured";
        return finish(r);
    }
    const std::string exe = find_executable(cfg.executable);
    if (exe.empty()) {
        r.message = "solver not found: " + cfg.executable;
        return finish(r);
    }
    TempFile file(".smt2", script.text);
    std::vector<std::string> argv{exe};
    argv.insert(argv.end(), cfg.args.begin(), cfg.args.end());
    argv.push_back(file.path());
    const ProcessResult pr = run_process(argv, cfg.timeout_s);
    if (!pr.started) {
        r.message = pr.error;
        return finish(r);
    }
    if (pr.timed_out) {
        r.verdict = Verdict::Unknown;
        r.output_digest = fnv1a_digest(pr.out);
        std::ostringstream m;
        m << "timeout after " << cfg.timeout_s << " s";
        r.message = m.str();
        return finish(r);
    }
    r = parse_solver_output(script, *ig.base, pr.out);
    if (r.verdict == Verdict::SolverError && (pr.exit_code != 0 || pr.signal != 0))
        r.message += "; exit " + std::to_string(pr.exit_code) + " signal " + std::to_string(pr.signal) +
                     " stderr digest " + fnv1a_digest(pr.err);
    if (r.verdict == Verdict::Sat && !exec::check_consistency(*ig.base, *r.program, ig.examples)) {
        r.verdict = Verdict::SolverError;
        r.message = "solver model is inconsistent with the examples";
        r.program.reset();
    }
    return finish(r);
}

exec::SynthesisResult synthesize(const InstanceGraph& ig, const SolverConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const SmtScript script = emit_smtlib(ig);
    const SolveOutcome o = solve(script, ig, cfg);
    exec::SynthesisResult r;
    r.backend = "smt";
    r.message = o.message;
    r.stats = {{"verdict", to_string(o.verdict)},
               {"output_digest", o.output_digest},
               {"script_bytes", script.text.size()},
               {"solver_time_s", o.wall_time_s}};
    switch (o.verdict) {
    case Verdict::Sat: r = exec::verified_success(ig, *o.program, std::move(r)); break;
    case Verdict::Unsat:
        r.status = exec::Status::Exhausted;
        r.message = "unsat: no consistent program";
        break;
    case Verdict::Unknown: r.status = exec::Status::Timeout; break;
    case Verdict::SolverError: r.status = exec::Status::SolverError; break;
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace gsyn::smt
