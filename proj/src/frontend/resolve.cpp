#include "gsyn/frontend/resolve.hpp"

#include <set>

#include "gsyn/frontend/eval.hpp"

namespace gsyn::frontend {
namespace {

using ConstEnv = std::map<std::string, long long>;

class Resolver {
public:
    Resolver(const ConstEnv& env, Diagnostics& diags) : env_(env), diags_(diags) {}

    void expr(Expr& e) {
        if (e.kind == ExprKind::Name) {
            if (!bound_.count(e.name)) {
                auto it = env_.find(e.name);
                if (it != env_.end()) e = Expr::integer(it->second, e.span);
            }
            return;
        }
        bool closed = true;
        for (auto& a : e.args) {
            expr(a);
            closed = closed && a.is_int();
        }
        if (!closed || e.kind == ExprKind::Index || e.kind == ExprKind::Call || e.is_int()) return;
        try {
            long long v = evaluate(e, [](const Expr&) { return std::nullopt; });
            e = Expr::integer(v, e.span);
        } catch (const EvalError& err) {
            diags_.push_back(make_error(err.span, err.code, err.message));
        }
    }

    void block(std::vector<Stmt>& body) {
        std::vector<Stmt> out;
        out.reserve(body.size());
        for (auto& s : body) {
            if (stmt(s)) out.push_back(std::move(s));
        }
        body = std::move(out);
    }

    // Returns false if the statement is dropped.
    bool stmt(Stmt& s) {
        switch (s.kind) {
        case StmtKind::SetTo:
            expr(s.target);
            expr(s.value);
            return true;
        case StmtKind::For:
            expr(s.lower);
            expr(s.upper);
            if (s.lower.is_int() && s.upper.is_int()) {
                if (s.upper.value < s.lower.value) {
                    diags_.push_back(make_error(s.span, "loop-range",
                                                "negative loop range: range(" +
                                                    std::to_string(s.lower.value) + ", " +
                                                    std::to_string(s.upper.value) + ")"));
                    return true;
                }
                if (s.upper.value == s.lower.value) {
                    diags_.push_back(make_warning(s.span, "empty-range",
                                                  "loop over empty range(" +
                                                      std::to_string(s.lower.value) + ", " +
                                                      std::to_string(s.upper.value) +
                                                      ") dropped"));
                    return false;
                }
            }
            with_bound(s.name, [&] { block(s.body); });
            return true;
        case StmtKind::If:
            expr(s.cond);
            block(s.body);
            block(s.else_body);
            return true;
        case StmtKind::With:
            expr(s.target);
            with_bound(s.name, [&] { block(s.body); });
            return true;
        }
        return true;
    }

    template <class F>
    void with_bound(const std::string& name, F&& f) {
        bool inserted = bound_.insert(name).second;
        f();
        if (inserted) bound_.erase(name);
    }

    std::set<std::string> bound_;

private:
    const ConstEnv& env_;
    Diagnostics& diags_;
};

}  // namespace

Checked<Ast> resolve_constants(Ast ast, const std::map<std::string, long long>& overrides) {
    Checked<Ast> result;
    auto& diags = result.diagnostics;

    std::set<std::string> declared;
    for (const auto& c : ast.constants) declared.insert(c.name);
    for (const auto& [name, value] : overrides) {
        if (!declared.count(name))
            diags.push_back(make_error({}, "override",
                                       "override for undeclared constant '" + name + "'"));
        else if (value < 0)
            diags.push_back(make_error({}, "override",
                                       "override for '" + name + "' must be non-negative"));
    }

    ConstEnv env;
    for (auto& c : ast.constants) {
        if (env.count(c.name)) {
            diags.push_back(make_error(c.span, "redeclared", "constant '" + c.name + "' redeclared"));
            continue;
        }
        if (auto it = overrides.find(c.name); it != overrides.end()) {
            c.value = Expr::integer(it->second, c.value.span);
            env[c.name] = it->second;
            continue;
        }
        try {
            long long v = evaluate(c.value, [&](const Expr& n) -> std::optional<long long> {
                auto it = env.find(n.name);
                if (it != env.end()) return it->second;
                throw EvalError{n.span, "unresolved-constant",
                                "unresolvable constant '" + n.name + "' in definition of '" +
                                    c.name + "'"};
            });
            c.value = Expr::integer(v, c.value.span);
            env[c.name] = v;
        } catch (const EvalError& e) {
            diags.push_back(make_error(e.span, e.code, e.message));
        }
    }

    Resolver r(env, diags);
    for (auto& d : ast.decls) {
        r.expr(d.domain);
        for (auto& s : d.shape) r.expr(s);
        if (!d.domain.is_int())
            diags.push_back(make_error(d.domain.span, "unresolved-constant",
                                       "domain size of '" + d.name + "' is not a constant"));
        else if (d.domain.value < 1)
            diags.push_back(make_error(d.domain.span, "domain",
                                       "domain size must be >= 1 (got " +
                                           std::to_string(d.domain.value) + ")"));
        for (const auto& s : d.shape) {
            if (!s.is_int())
                diags.push_back(make_error(s.span, "unresolved-constant",
                                           "array dimension of '" + d.name + "' is not a constant"));
            else if (s.value < 1)
                diags.push_back(make_error(s.span, "shape",
                                           "array dimension of '" + d.name + "' must be >= 1"));
        }
    }
    for (auto& f : ast.functions) {
        r.expr(f.out_domain);
        for (auto& a : f.arg_domains) r.expr(a);
        for (const auto& p : f.params) r.bound_.insert(p);
        r.expr(f.body);
        for (const auto& p : f.params) r.bound_.erase(p);
    }
    r.block(ast.body);

    if (!has_errors(diags)) result.value = std::move(ast);
    return result;
}

}  // namespace gsyn::frontend
