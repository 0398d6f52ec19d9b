#include "gsyn/frontend/parser.hpp"

#include <algorithm>
#include <array>
#include <string_view>

#include "lexer.hpp"

namespace gsyn::frontend {
namespace {

constexpr std::array<std::string_view, 20> kUnsupported = {
    "while", "import", "from",  "class",  "lambda",   "try",   "except",
    "break", "continue", "pass", "global", "nonlocal", "del",  "yield",
    "assert", "raise",  "async", "await",  "is",       "finally"};

constexpr std::array<std::string_view, 11> kKeywords = {
    "for", "in", "if", "elif", "else", "with", "as", "def", "return", "and", "or"};

bool is_keyword(std::string_view s) {
    return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end() || s == "not";
}

bool is_unsupported(std::string_view s) {
    return std::find(kUnsupported.begin(), kUnsupported.end(), s) != kUnsupported.end();
}

struct SyntaxError {
    Diagnostic diag;
};

class Parser {
public:
    Parser(std::vector<Token> toks, Diagnostics& diags) : toks_(std::move(toks)), diags_(diags) {}

    Ast parse_module(const std::string& name) {
        Ast ast;
        ast.name = name;
        while (!at(Tok::End)) {
            if (at(Tok::Newline)) {
                advance();
                continue;
            }
            parse_top(ast);
        }
        return ast;
    }

private:
    const Token& peek(std::size_t k = 0) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    bool at(Tok t) const { return peek().kind == t; }
    bool at_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }
    bool at_name(std::string_view n) const { return peek().kind == Tok::Name && peek().text == n; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void error(const Token& t, std::string msg, std::string code = "syntax") {
        throw SyntaxError{make_error(t.span, std::move(code), std::move(msg))};
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
        case Tok::Newline: return "end of line";
        case Tok::Indent: return "indent";
        case Tok::Dedent: return "dedent";
        case Tok::End: return "end of file";
        default: return "'" + t.text + "'";
        }
    }

    const Token& expect_op(std::string_view op) {
        if (!at_op(op)) error(peek(), "expected '" + std::string(op) + "' but found " + describe(peek()));
        return advance();
    }

    const Token& expect_name(std::string_view what = "identifier") {
        if (!at(Tok::Name) || is_keyword(peek().text))
            error(peek(), "expected " + std::string(what) + " but found " + describe(peek()));
        if (is_unsupported(peek().text))
            error(peek(), "unsupported construct '" + peek().text + "'", "unsupported");
        return advance();
    }

    void expect_keyword(std::string_view kw) {
        if (!at_name(kw)) error(peek(), "expected '" + std::string(kw) + "' but found " + describe(peek()));
        advance();
    }

    void expect_newline() {
        if (!at(Tok::Newline)) error(peek(), "expected end of line but found " + describe(peek()));
        advance();
    }

    void check_unsupported_statement() {
        if (at(Tok::Name) && is_unsupported(peek().text))
            error(peek(), "unsupported construct '" + peek().text + "'", "unsupported");
        if (at_name("return")) error(peek(), "'return' is only allowed in a def", "unsupported");
        if (at_name("elif") || at_name("else")) error(peek(), "'" + peek().text + "' without 'if'");
    }

    void parse_top(Ast& ast) {
        check_unsupported_statement();
        if (at_name("def")) {
            ast.functions.push_back(parse_def());
            return;
        }
        if (at(Tok::Indent)) error(peek(), "unexpected indent");
        if (at(Tok::Name) && !is_keyword(peek().text) && peek(1).kind == Tok::Op && peek(1).text == "=") {
            parse_assignment(ast);
            return;
        }
        ast.body.push_back(parse_stmt());
    }

    static bool is_decl_kind(std::string_view s, VarKind& kind) {
        if (s == "Param") kind = VarKind::Param;
        else if (s == "Var") kind = VarKind::Var;
        else if (s == "Input") kind = VarKind::Input;
        else if (s == "Output") kind = VarKind::Output;
        else return false;
        return true;
    }

    void parse_assignment(Ast& ast) {
        const Token& name = advance();
        expect_op("=");
        VarKind kind;
        if (at(Tok::Name) && is_decl_kind(peek().text, kind) && peek(1).kind == Tok::Op &&
            peek(1).text == "(") {
            VarDecl d;
            d.name = name.text;
            d.kind = kind;
            d.span = name.span;
            advance();
            expect_op("(");
            d.domain = parse_expr();
            expect_op(")");
            if (d.domain.is_int() && d.domain.value < 1)
                diags_.push_back(make_error(d.domain.span, "domain",
                                            "domain size must be >= 1 (got " +
                                                std::to_string(d.domain.value) + ")"));
            if (at_op("[")) {
                advance();
                d.shape = parse_expr_list("]");
                expect_op("]");
            }
            expect_newline();
            ast.decls.push_back(std::move(d));
            return;
        }
        ConstDecl c;
        c.name = name.text;
        c.span = name.span;
        c.value = parse_expr();
        expect_newline();
        ast.constants.push_back(std::move(c));
    }

    FnDef parse_def() {
        FnDef f;
        f.span = advance().span;
        f.name = expect_name("function name").text;
        expect_op("(");
        if (!at_op(")")) {
            for (;;) {
                f.params.push_back(expect_name("parameter name").text);
                if (!at_op(",")) break;
                advance();
            }
        }
        expect_op(")");
        expect_op("->");
        f.out_domain = parse_expr();
        expect_keyword("over");
        expect_op("(");
        if (!at_op(")")) f.arg_domains = parse_expr_list(")");
        expect_op(")");
        expect_op(":");
        bool block = false;
        if (at(Tok::Newline)) {
            advance();
            if (!at(Tok::Indent)) error(peek(), "expected an indented 'return'");
            advance();
            block = true;
        }
        if (!at_name("return")) {
            check_unsupported_statement();
            error(peek(), "function body must be a single 'return <expr>'", "unsupported");
        }
        advance();
        f.body = parse_expr();
        expect_newline();
        if (block) {
            if (!at(Tok::Dedent)) error(peek(), "function body must be a single 'return <expr>'", "unsupported");
            advance();
        }
        return f;
    }

    std::vector<Stmt> parse_block() {
        expect_op(":");
        expect_newline();
        if (!at(Tok::Indent)) error(peek(), "expected an indented block");
        advance();
        std::vector<Stmt> body;
        while (!at(Tok::Dedent) && !at(Tok::End)) {
            if (at(Tok::Newline)) {
                advance();
                continue;
            }
            body.push_back(parse_stmt());
        }
        if (at(Tok::Dedent)) advance();
        return body;
    }

    Stmt parse_stmt() {
        check_unsupported_statement();
        if (at(Tok::Indent)) error(peek(), "unexpected indent");
        if (at_name("def")) error(peek(), "functions must be defined at top level");
        if (at(Tok::Name) && peek(1).kind == Tok::Op && peek(1).text == "=" && !is_keyword(peek().text))
            error(peek(), "declarations and constants must be at top level");
        Stmt s;
        s.span = peek().span;
        if (at_name("for")) {
            advance();
            s.kind = StmtKind::For;
            s.name = expect_name("loop variable").text;
            expect_keyword("in");
            if (!at_name("range")) error(peek(), "only 'range(...)' loops are supported", "unsupported");
            advance();
            expect_op("(");
            auto bounds = parse_expr_list(")");
            expect_op(")");
            if (bounds.size() == 1) {
                s.lower = Expr::integer(0, bounds[0].span);
                s.upper = std::move(bounds[0]);
            } else if (bounds.size() == 2) {
                s.lower = std::move(bounds[0]);
                s.upper = std::move(bounds[1]);
            } else {
                error(peek(), "range() takes one or two arguments", "unsupported");
            }
            s.body = parse_block();
            return s;
        }
        if (at_name("if")) {
            advance();
            return parse_if_tail(s);
        }
        if (at_name("with")) {
            advance();
            s.kind = StmtKind::With;
            s.target = parse_ref();
            expect_keyword("as");
            s.name = expect_name("gate variable").text;
            s.body = parse_block();
            return s;
        }
        s.kind = StmtKind::SetTo;
        s.target = parse_ref();
        expect_op(".");
        const Token& method = expect_name("method name");
        if (method.text != "set_to")
            error(method, "unsupported method '" + method.text + "' (only set_to)", "unsupported");
        expect_op("(");
        s.value = parse_expr();
        expect_op(")");
        expect_newline();
        return s;
    }

    Stmt parse_if_tail(Stmt& s) {
        s.kind = StmtKind::If;
        s.cond = parse_expr();
        s.body = parse_block();
        if (at_name("elif")) {
            Stmt nested;
            nested.span = advance().span;
            s.else_body.push_back(parse_if_tail(nested));
        } else if (at_name("else")) {
            advance();
            s.else_body = parse_block();
        }
        return s;
    }

    Expr parse_ref() {
        const Token& name = expect_name("variable reference");
        Expr e = Expr::identifier(name.text, name.span);
        if (at_op("[")) {
            advance();
            e.kind = ExprKind::Index;
            e.args = parse_expr_list("]");
            if (e.args.empty()) error(peek(), "empty index");
            e.span.col_end = expect_op("]").span.col_end;
        }
        return e;
    }

    std::vector<Expr> parse_expr_list(std::string_view close) {
        std::vector<Expr> out;
        if (at_op(close)) return out;
        for (;;) {
            out.push_back(parse_expr());
            if (!at_op(",")) break;
            advance();
            if (at_op(close)) break;
        }
        return out;
    }

    static Expr binary(BinaryOp op, Expr l, Expr r) {
        Expr e;
        e.kind = ExprKind::Binary;
        e.binary_op = op;
        e.span = {l.span.line, l.span.col_begin, r.span.col_end};
        e.args.push_back(std::move(l));
        e.args.push_back(std::move(r));
        return e;
    }

    Expr parse_expr() {
        Expr then = parse_or();
        if (at_name("if")) {
            advance();
            Expr cond = parse_or();
            expect_keyword("else");
            Expr other = parse_expr();
            Expr e;
            e.kind = ExprKind::Ternary;
            e.span = {then.span.line, then.span.col_begin, other.span.col_end};
            e.args.push_back(std::move(then));
            e.args.push_back(std::move(cond));
            e.args.push_back(std::move(other));
            return e;
        }
        return then;
    }

    Expr parse_or() {
        Expr l = parse_and();
        while (at_name("or")) {
            advance();
            l = binary(BinaryOp::Or, std::move(l), parse_and());
        }
        return l;
    }

    Expr parse_and() {
        Expr l = parse_not();
        while (at_name("and")) {
            advance();
            l = binary(BinaryOp::And, std::move(l), parse_not());
        }
        return l;
    }

    Expr parse_not() {
        if (at_name("not")) {
            Span sp = advance().span;
            Expr inner = parse_not();
            Expr e;
            e.kind = ExprKind::Unary;
            e.unary_op = UnaryOp::Not;
            e.span = {sp.line, sp.col_begin, inner.span.col_end};
            e.args.push_back(std::move(inner));
            return e;
        }
        return parse_comparison();
    }

    Expr parse_comparison() {
        Expr l = parse_arith();
        auto cmp = comparison_op();
        if (!cmp) return l;
        advance();
        Expr r = parse_arith();
        if (comparison_op()) error(peek(), "chained comparisons are not supported", "unsupported");
        return binary(*cmp, std::move(l), std::move(r));
    }

    std::optional<BinaryOp> comparison_op() const {
        if (peek().kind != Tok::Op) return std::nullopt;
        const auto& t = peek().text;
        if (t == "==") return BinaryOp::Eq;
        if (t == "!=") return BinaryOp::Ne;
        if (t == "<") return BinaryOp::Lt;
        if (t == "<=") return BinaryOp::Le;
        if (t == ">") return BinaryOp::Gt;
        if (t == ">=") return BinaryOp::Ge;
        return std::nullopt;
    }

    Expr parse_arith() {
        Expr l = parse_term();
        while (at_op("+") || at_op("-")) {
            BinaryOp op = advance().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            l = binary(op, std::move(l), parse_term());
        }
        return l;
    }

    Expr parse_term() {
        Expr l = parse_unary();
        for (;;) {
            if (at_op("/")) error(peek(), "use '//' for integer division", "unsupported");
            if (at_op("**")) error(peek(), "unsupported operator '**'", "unsupported");
            BinaryOp op;
            if (at_op("*")) op = BinaryOp::Mul;
            else if (at_op("//")) op = BinaryOp::FloorDiv;
            else if (at_op("%")) op = BinaryOp::Mod;
            else break;
            advance();
            l = binary(op, std::move(l), parse_unary());
        }
        return l;
    }

    Expr parse_unary() {
        if (at_op("-")) {
            Span sp = advance().span;
            Expr inner = parse_unary();
            Expr e;
            e.kind = ExprKind::Unary;
            e.unary_op = UnaryOp::Neg;
            e.span = {sp.line, sp.col_begin, inner.span.col_end};
            e.args.push_back(std::move(inner));
            return e;
        }
        if (at_op("+")) {
            advance();
            return parse_unary();
        }
        return parse_primary();
    }

    Expr parse_primary() {
        if (at(Tok::Int)) {
            const Token& t = advance();
            return Expr::integer(t.value, t.span);
        }
        if (at_op("(")) {
            advance();
            Expr e = parse_expr();
            expect_op(")");
            return e;
        }
        if (at(Tok::Name)) {
            if (at_name("True") || at_name("False")) {
                const Token& t = advance();
                return Expr::integer(t.text == "True" ? 1 : 0, t.span);
            }
            const Token& name = expect_name("expression");
            Expr e = Expr::identifier(name.text, name.span);
            if (at_op("(")) {
                advance();
                e.kind = ExprKind::Call;
                e.args = parse_expr_list(")");
                e.span.col_end = expect_op(")").span.col_end;
            } else if (at_op("[")) {
                advance();
                e.kind = ExprKind::Index;
                e.args = parse_expr_list("]");
                if (e.args.empty()) error(peek(), "empty index");
                e.span.col_end = expect_op("]").span.col_end;
            }
            return e;
        }
        error(peek(), "expected expression but found " + describe(peek()));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Diagnostics& diags_;
};

}  // namespace

Checked<Ast> parse(const ModelSource& src) {
    Checked<Ast> result;
    if (src.text.find_first_not_of(" \t\r\n") == std::string::npos) {
        result.diagnostics.push_back(make_error({1, 1, 1}, "syntax", "model source is empty"));
        return result;
    }
    auto toks = tokenize(src.text, result.diagnostics);
    if (has_errors(result.diagnostics)) return result;
    Parser p(std::move(toks), result.diagnostics);
    try {
        Ast ast = p.parse_module(src.name);
        if (!has_errors(result.diagnostics)) result.value = std::move(ast);
    } catch (const SyntaxError& e) {
        result.diagnostics.push_back(e.diag);
    }
    return result;
}

}  // namespace gsyn::frontend
