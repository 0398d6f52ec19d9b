#include <set>
#include <sstream>
#include <tuple>

#include "gsyn/frontend/eval.hpp"
#include "gsyn/frontend/parser.hpp"
#include "gsyn/frontend/resolve.hpp"
#include "gsyn/frontend/typed_model.hpp"
#include "gsyn/frontend/write_tracker.hpp"

namespace gsyn::frontend {

std::string format_cell_name(const std::string& name, std::span<const int> index) {
    if (index.empty()) return name;
    std::ostringstream os;
    os << name << '[';
    for (std::size_t i = 0; i < index.size(); ++i) os << (i ? ", " : "") << index[i];
    os << ']';
    return os.str();
}

std::string TypedModel::cell_name(int cell) const {
    return format_cell_name(decl_of(cell).name, cells[cell].index);
}

std::optional<int> TypedModel::find_decl(const std::string& name) const {
    for (std::size_t i = 0; i < decls.size(); ++i)
        if (decls[i].name == name) return static_cast<int>(i);
    return std::nullopt;
}

std::optional<int> TypedModel::find_cell(const std::string& name, std::span<const int> index) const {
    auto d = find_decl(name);
    if (!d) return std::nullopt;
    const auto& decl = decls[*d];
    if (index.size() != decl.shape.size()) return std::nullopt;
    int offset = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] < 0 || index[i] >= decl.shape[i]) return std::nullopt;
        offset = offset * decl.shape[i] + index[i];
    }
    return decl.first_cell + offset;
}

namespace {

struct Abort {};

class Checker {
public:
    Checker(const Ast& ast, const CheckOptions& opts, TypedModel& m, Diagnostics& diags)
        : ast_(ast), opts_(opts), m_(m), diags_(diags) {}

    void run() {
        declare_constants();
        declare_variables();
        declare_functions();
        if (has_errors(diags_)) return;
        tracker_.emplace(m_.cells.size());
        try {
            block(ast_.body, m_.body);
        } catch (const Abort&) {
            return;
        }
        for (std::size_t c = 0; c < m_.cells.size(); ++c) {
            const int cell = static_cast<int>(c);
            if (m_.kind(cell) != VarKind::Output) continue;
            const auto& cnt = tracker_->at(cell);
            if (cnt.max == 0)
                error(m_.decl_of(cell).span, "missing-write",
                      "output " + m_.cell_name(cell) + " is never written");
        }
    }

private:
    void error(Span span, std::string code, std::string msg) {
        if (seen_.insert({span.line, span.col_begin, msg}).second)
            diags_.push_back(make_error(span, std::move(code), std::move(msg)));
    }

    bool name_taken(const std::string& n) const {
        return constants_.count(n) || decl_index_.count(n) || fn_index_.count(n);
    }

    void declare_constants() {
        for (const auto& c : ast_.constants) {
            if (!c.value.is_int()) {
                error(c.span, "unresolved-constant", "constant '" + c.name + "' is not resolved");
                continue;
            }
            if (name_taken(c.name)) {
                error(c.span, "redeclared", "'" + c.name + "' redeclared");
                continue;
            }
            constants_[c.name] = c.value.value;
            m_.constants.emplace_back(c.name, c.value.value);
        }
    }

    void declare_variables() {
        int next_cell = 0;
        for (const auto& d : ast_.decls) {
            if (name_taken(d.name)) {
                error(d.span, "redeclared", "'" + d.name + "' redeclared");
                continue;
            }
            DeclInfo info;
            info.name = d.name;
            info.kind = d.kind;
            info.span = d.span;
            if (!d.domain.is_int() || d.domain.value < 1) {
                error(d.domain.span, "domain", "domain size must be >= 1");
                continue;
            }
            if (d.domain.value > 1'000'000) {
                error(d.domain.span, "domain", "domain size too large");
                continue;
            }
            info.domain = static_cast<int>(d.domain.value);
            long long count = 1;
            bool ok = true;
            for (const auto& s : d.shape) {
                if (!s.is_int() || s.value < 1) {
                    error(s.span, "shape", "array dimension of '" + d.name + "' must be a constant >= 1");
                    ok = false;
                    break;
                }
                count *= s.value;
                if (count > 10'000'000) {
                    error(s.span, "shape", "array '" + d.name + "' is too large");
                    ok = false;
                    break;
                }
                info.shape.push_back(static_cast<int>(s.value));
            }
            if (!ok) continue;
            info.first_cell = next_cell;
            info.cell_count = static_cast<int>(count);
            const int decl_id = static_cast<int>(m_.decls.size());
            std::vector<int> idx(info.shape.size(), 0);
            for (long long k = 0; k < count; ++k) {
                m_.cells.push_back(CellInfo{decl_id, idx});
                for (int dim = static_cast<int>(idx.size()) - 1; dim >= 0; --dim) {
                    if (++idx[dim] < info.shape[dim]) break;
                    idx[dim] = 0;
                }
            }
            next_cell += info.cell_count;
            decl_index_[d.name] = decl_id;
            m_.decls.push_back(std::move(info));
        }
    }

    void declare_functions() {
        for (const auto& f : ast_.functions) {
            if (name_taken(f.name)) {
                error(f.span, "redeclared", "'" + f.name + "' redeclared");
                continue;
            }
            FunctionInfo info;
            info.name = f.name;
            info.span = f.span;
            if (f.params.size() != f.arg_domains.size()) {
                error(f.span, "arity",
                      "function '" + f.name + "' has " + std::to_string(f.params.size()) +
                          " parameters but " + std::to_string(f.arg_domains.size()) + " domains");
                continue;
            }
            std::set<std::string> params(f.params.begin(), f.params.end());
            if (params.size() != f.params.size()) {
                error(f.span, "redeclared", "duplicate parameter in '" + f.name + "'");
                continue;
            }
            bool ok = true;
            std::size_t entries = 1;
            auto domain_of = [&](const Expr& e) -> int {
                if (!e.is_int() || e.value < 1 || e.value > 1'000'000) {
                    error(e.span, "domain", "function domain must be a constant >= 1");
                    ok = false;
                    return 1;
                }
                return static_cast<int>(e.value);
            };
            info.out_domain = domain_of(f.out_domain);
            for (const auto& a : f.arg_domains) {
                info.arg_domains.push_back(domain_of(a));
                entries *= static_cast<std::size_t>(info.arg_domains.back());
                if (entries > opts_.max_table_entries) {
                    error(f.span, "table-size", "function '" + f.name + "' table is too large");
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (!tabulate(f, info, entries)) continue;
            fn_index_[f.name] = static_cast<int>(m_.functions.size());
            m_.functions.push_back(std::move(info));
        }
    }

    bool tabulate(const FnDef& f, FunctionInfo& info, std::size_t entries) {
        info.entries.resize(entries);
        std::vector<long long> args(info.arg_domains.size(), 0);
        NameLookup lookup = [&](const Expr& n) -> std::optional<long long> {
            for (std::size_t i = 0; i < f.params.size(); ++i)
                if (f.params[i] == n.name) return args[i];
            if (auto it = constants_.find(n.name); it != constants_.end()) return it->second;
            return std::nullopt;
        };
        for (std::size_t k = 0; k < entries; ++k) {
            long long v;
            try {
                v = evaluate(f.body, lookup);
            } catch (const EvalError& e) {
                error(e.span, e.code, "in function '" + f.name + "': " + e.message);
                return false;
            }
            if (v < 0 || v >= info.out_domain) {
                std::ostringstream os;
                os << "function '" << f.name << "' returns " << v << " for (";
                for (std::size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << args[i];
                os << "), outside its output domain [0, " << info.out_domain << ")";
                error(f.body.span, "fn-range", os.str());
                return false;
            }
            info.entries[k] = static_cast<int>(v);
            for (int dim = static_cast<int>(args.size()) - 1; dim >= 0; --dim) {
                if (++args[dim] < info.arg_domains[dim]) break;
                args[dim] = 0;
            }
        }
        return true;
    }

    // ---- elaboration -------------------------------------------------------

    std::optional<long long> lookup_scope(const std::string& n) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->first == n) return it->second;
        if (auto it = constants_.find(n); it != constants_.end()) return it->second;
        return std::nullopt;
    }

    // Compile-time value of `e`; `runtime_msg` explains a runtime reference.
    std::optional<long long> compile_time(const Expr& e, const std::string& runtime_code,
                                          const std::string& runtime_msg) {
        try {
            return evaluate(e, [&](const Expr& n) -> std::optional<long long> {
                if (auto v = lookup_scope(n.name)) return v;
                if (decl_index_.count(n.name))
                    throw EvalError{n.span, runtime_code,
                                    runtime_msg + " ('" + n.name + "' is a runtime variable)"};
                return std::nullopt;
            });
        } catch (const EvalError& err) {
            std::string code = err.code;
            std::string msg = err.message;
            if (err.code == "runtime-value") {
                code = runtime_code;
                msg = runtime_msg + " (" + err.message + ")";
            }
            error(err.span, code, msg);
            return std::nullopt;
        }
    }

    bool names_variable(const Expr& e) const {
        return e.is_ref() && !lookup_scope(e.name) && decl_index_.count(e.name);
    }

    std::optional<int> resolve_ref(const Expr& e) {
        auto it = decl_index_.find(e.name);
        if (it == decl_index_.end()) {
            error(e.span, "undeclared", "undeclared variable '" + e.name + "'");
            return std::nullopt;
        }
        const DeclInfo& d = m_.decls[it->second];
        const std::size_t given = e.kind == ExprKind::Index ? e.args.size() : 0;
        if (given != d.shape.size()) {
            error(e.span, "index-arity",
                  "'" + d.name + "' has " + std::to_string(d.shape.size()) + " dimension(s) but " +
                      std::to_string(given) + " index(es) were given");
            return std::nullopt;
        }
        int offset = 0;
        for (std::size_t i = 0; i < given; ++i) {
            auto v = compile_time(e.args[i], "runtime-index",
                                  "runtime index must be introduced by a gate");
            if (!v) return std::nullopt;
            if (*v < 0 || *v >= d.shape[i]) {
                error(e.args[i].span, "index-range",
                      "index " + std::to_string(*v) + " out of range for dimension " +
                          std::to_string(i) + " of '" + d.name + "' (size " +
                          std::to_string(d.shape[i]) + ")");
                return std::nullopt;
            }
            offset = offset * d.shape[i] + static_cast<int>(*v);
        }
        return d.first_cell + offset;
    }

    bool check_read(int cell, Span span) {
        VarKind k = m_.kind(cell);
        if (k == VarKind::Param || k == VarKind::Input) return true;
        if (!tracker_->definitely_written(cell)) {
            error(span, "read-before-write",
                  "read of " + m_.cell_name(cell) + " before it is written on every path");
            return false;
        }
        return true;
    }

    void count_statement() {
        if (++statements_ > opts_.max_statements) {
            error({}, "too-large",
                  "model elaborates to more than " + std::to_string(opts_.max_statements) +
                      " statements");
            throw Abort{};
        }
    }

    void bind(const std::string& name, long long value, Span span) {
        if (name_taken(name) || lookup_scope(name))
            error(span, "redeclared", "'" + name + "' shadows an existing name");
        scope_.emplace_back(name, value);
    }

    void block(const std::vector<Stmt>& body, std::vector<ElabStmt>& out) {
        for (const auto& s : body) stmt(s, out);
    }

    void stmt(const Stmt& s, std::vector<ElabStmt>& out) {
        switch (s.kind) {
        case StmtKind::SetTo: set_to(s, out); break;
        case StmtKind::For: {
            auto lo = compile_time(s.lower, "runtime-bound", "loop bounds must be compile-time");
            auto hi = compile_time(s.upper, "runtime-bound", "loop bounds must be compile-time");
            if (!lo || !hi) return;
            if (*hi < *lo) {
                error(s.span, "loop-range",
                      "negative loop range: range(" + std::to_string(*lo) + ", " +
                          std::to_string(*hi) + ")");
                return;
            }
            for (long long i = *lo; i < *hi; ++i) {
                bind(s.name, i, s.span);
                block(s.body, out);
                scope_.pop_back();
            }
            break;
        }
        case StmtKind::If: {
            auto c = compile_time(s.cond, "runtime-condition",
                                  "if condition must be compile-time; use a gate for runtime branching");
            if (!c) return;
            block(*c != 0 ? s.body : s.else_body, out);
            break;
        }
        case StmtKind::With: gate(s, out); break;
        }
    }

    void gate(const Stmt& s, std::vector<ElabStmt>& out) {
        if (!s.target.is_ref() || !decl_index_.count(s.target.name) || lookup_scope(s.target.name)) {
            error(s.target.span, "gate-scrutinee", "gate scrutinee must be a variable reference");
            return;
        }
        auto cell = resolve_ref(s.target);
        if (!cell) return;
        check_read(*cell, s.target.span);
        count_statement();
        ElabStmt g;
        g.kind = ElabStmt::Kind::Gate;
        g.cell = *cell;
        g.line = s.span.line;
        const int dom = m_.domain(*cell);
        g.branches.resize(static_cast<std::size_t>(dom));
        tracker_->begin_gate();
        for (int b = 0; b < dom; ++b) {
            tracker_->begin_branch();
            bind(s.name, b, s.span);
            block(s.body, g.branches[static_cast<std::size_t>(b)]);
            scope_.pop_back();
            tracker_->end_branch();
        }
        for (const auto& pw : tracker_->end_gate()) {
            std::ostringstream os;
            os << "missing write: " << m_.cell_name(pw.cell) << " is written in branch";
            os << (pw.writing_branches.size() > 1 ? "es " : " ");
            for (std::size_t i = 0; i < pw.writing_branches.size(); ++i)
                os << (i ? "," : "") << pw.writing_branches[i];
            os << " but not in branch" << (pw.missing_branches.size() > 1 ? "es " : " ");
            for (std::size_t i = 0; i < pw.missing_branches.size(); ++i)
                os << (i ? "," : "") << pw.missing_branches[i];
            os << " of the gate on " << m_.cell_name(*cell);
            error(s.span, "missing-write", os.str());
        }
        out.push_back(std::move(g));
    }

    void set_to(const Stmt& s, std::vector<ElabStmt>& out) {
        if (!s.target.is_ref()) {
            error(s.target.span, "syntax", "set_to target must be a variable reference");
            return;
        }
        if (lookup_scope(s.target.name)) {
            error(s.target.span, "write-constant",
                  "cannot write to compile-time name '" + s.target.name + "'");
            return;
        }
        auto dst = resolve_ref(s.target);
        if (!dst) return;
        const VarKind dk = m_.kind(*dst);
        if (dk == VarKind::Input) {
            error(s.target.span, "write-input", "cannot write to Input " + m_.cell_name(*dst));
            return;
        }
        if (dk == VarKind::Param) {
            error(s.target.span, "write-param", "cannot write to Param " + m_.cell_name(*dst));
            return;
        }
        const int dst_dom = m_.domain(*dst);
        count_statement();
        ElabStmt a;
        a.kind = ElabStmt::Kind::Assign;
        a.cell = *dst;
        a.line = s.span.line;
        const Expr& v = s.value;

        if (v.kind == ExprKind::Call && fn_index_.count(v.name)) {
            const int fid = fn_index_.at(v.name);
            const FunctionInfo& fn = m_.functions[fid];
            if (v.args.size() != fn.arg_domains.size()) {
                error(v.span, "arity",
                      "'" + fn.name + "' expects " + std::to_string(fn.arg_domains.size()) +
                          " argument(s), got " + std::to_string(v.args.size()));
                return;
            }
            if (fn.out_domain != dst_dom) {
                error(v.span, "domain-mismatch",
                      "domain mismatch: '" + fn.name + "' returns domain " +
                          std::to_string(fn.out_domain) + " but " + m_.cell_name(*dst) +
                          " has domain " + std::to_string(dst_dom));
                return;
            }
            bool all_literal = true;
            for (std::size_t i = 0; i < v.args.size(); ++i) {
                const Expr& arg = v.args[i];
                const int want = fn.arg_domains[i];
                if (names_variable(arg)) {
                    auto src = resolve_ref(arg);
                    if (!src) return;
                    if (m_.domain(*src) != want) {
                        error(arg.span, "domain-mismatch",
                              "domain mismatch: argument " + std::to_string(i) + " of '" + fn.name +
                                  "' has domain " + std::to_string(want) + " but " +
                                  m_.cell_name(*src) + " has domain " +
                                  std::to_string(m_.domain(*src)));
                        return;
                    }
                    check_read(*src, arg.span);
                    a.args.push_back(Operand::of_cell(*src));
                    all_literal = false;
                } else {
                    auto lit = compile_time(arg, "runtime-value",
                                            "function arguments must be variable references or "
                                            "compile-time values");
                    if (!lit) return;
                    if (*lit < 0 || *lit >= want) {
                        error(arg.span, "domain-mismatch",
                              "value " + std::to_string(*lit) + " outside domain [0, " +
                                  std::to_string(want) + ") of argument " + std::to_string(i) +
                                  " of '" + fn.name + "'");
                        return;
                    }
                    a.args.push_back(Operand::of_literal(static_cast<int>(*lit)));
                }
            }
            if (all_literal) {
                std::size_t k = 0;
                for (std::size_t i = 0; i < a.args.size(); ++i)
                    k = k * static_cast<std::size_t>(fn.arg_domains[i]) +
                        static_cast<std::size_t>(a.args[i].literal);
                a.rhs = RhsKind::Literal;
                a.args = {Operand::of_literal(fn.entries[k])};
            } else {
                a.rhs = RhsKind::Call;
                a.fn = fid;
            }
        } else if (v.kind == ExprKind::Call) {
            error(v.span, "undeclared", "call to undeclared function '" + v.name + "'");
            return;
        } else if (names_variable(v)) {
            auto src = resolve_ref(v);
            if (!src) return;
            if (m_.domain(*src) != dst_dom) {
                error(v.span, "domain-mismatch",
                      "domain mismatch: cannot assign " + m_.cell_name(*src) + " (domain " +
                          std::to_string(m_.domain(*src)) + ") to " + m_.cell_name(*dst) +
                          " (domain " + std::to_string(dst_dom) + ")");
                return;
            }
            check_read(*src, v.span);
            a.rhs = RhsKind::Copy;
            a.args = {Operand::of_cell(*src)};
        } else {
            auto lit = compile_time(v, "runtime-value",
                                    "set_to value must be a variable, a function call, or a "
                                    "compile-time value");
            if (!lit) return;
            if (*lit < 0 || *lit >= dst_dom) {
                error(v.span, "domain-mismatch",
                      "domain mismatch: value " + std::to_string(*lit) + " outside domain [0, " +
                          std::to_string(dst_dom) + ") of " + m_.cell_name(*dst));
                return;
            }
            a.rhs = RhsKind::Literal;
            a.args = {Operand::of_literal(static_cast<int>(*lit))};
        }

        const int writer = static_cast<int>(writer_lines_.size());
        writer_lines_.push_back(s.span.line);
        if (auto prev = tracker_->write(*dst, writer)) {
            error(s.span, "double-write",
                  "double write: " + m_.cell_name(*dst) + " is already written (line " +
                      std::to_string(writer_lines_[static_cast<std::size_t>(*prev)]) + ")");
        }
        out.push_back(std::move(a));
    }

    const Ast& ast_;
    const CheckOptions& opts_;
    TypedModel& m_;
    Diagnostics& diags_;
    std::map<std::string, long long> constants_;
    std::map<std::string, int> decl_index_;
    std::map<std::string, int> fn_index_;
    std::vector<std::pair<std::string, long long>> scope_;
    std::optional<WriteTracker> tracker_;
    std::vector<int> writer_lines_;
    std::set<std::tuple<int, int, std::string>> seen_;
    std::size_t statements_ = 0;
};

}  // namespace

Checked<TypedModel> check(const Ast& ast, const CheckOptions& opts) {
    Checked<TypedModel> result;
    TypedModel m;
    m.name = ast.name;
    m.ast = ast;
    Checker c(ast, opts, m, result.diagnostics);
    c.run();
    if (!has_errors(result.diagnostics)) result.value = std::move(m);
    return result;
}

Checked<TypedModel> compile(const ModelSource& src, const CheckOptions& opts) {
    Checked<TypedModel> result;
    auto parsed = parse(src);
    result.diagnostics = parsed.diagnostics;
    if (!parsed.ok()) return result;
    auto resolved = resolve_constants(std::move(*parsed.value), src.const_overrides);
    result.diagnostics.insert(result.diagnostics.end(), resolved.diagnostics.begin(),
                              resolved.diagnostics.end());
    if (!resolved.ok()) return result;
    auto checked = check(*resolved, opts);
    result.diagnostics.insert(result.diagnostics.end(), checked.diagnostics.begin(),
                              checked.diagnostics.end());
    result.value = std::move(checked.value);
    return result;
}

}  // namespace gsyn::frontend
