#include <doctest.h>

#include <filesystem>

#include "gsyn/frontend/parser.hpp"
#include "gsyn/frontend/resolve.hpp"
#include "gsyn/frontend/typed_model.hpp"
#include "testing.hpp"

using namespace gsyn;
using namespace gsyn::frontend;
using gsyn::testing::diag_text;
using gsyn::testing::has_code;
using gsyn::testing::mentions;

namespace {

Checked<Ast> parse_text(const std::string& text) { return parse(ModelSource{text, "t", {}}); }

Ast parse_ok(const std::string& text) {
    auto r = parse_text(text);
    INFO(diag_text(r.diagnostics));
    REQUIRE(r.ok());
    return *r;
}

Checked<TypedModel> compile_text(const std::string& text, std::map<std::string, long long> ov = {}) {
    return compile(ModelSource{text, "t", std::move(ov)});
}

const std::string kAutomaton = gsyn::testing::zoo_source("automaton.tpt");

}  // namespace

TEST_CASE("automaton model parses to the expected declaration census") {
    Ast ast = parse_ok(kAutomaton);
    REQUIRE(ast.constants.size() == 1);
    CHECK(ast.constants[0].name == "T");
    REQUIRE(ast.decls.size() == 4);
    CHECK(ast.decls[0].kind == VarKind::Param);
    CHECK(ast.decls[0].domain.value == 2);
    REQUIRE(ast.decls[0].shape.size() == 2);
    CHECK(ast.decls[0].shape[0].value == 2);
    CHECK(ast.decls[0].shape[1].value == 2);
    CHECK(ast.decls[1].kind == VarKind::Var);
    CHECK(ast.decls[1].shape.size() == 1);
    CHECK(ast.decls[2].kind == VarKind::Input);
    CHECK(ast.decls[3].kind == VarKind::Output);
    CHECK(ast.decls[3].shape.empty());

    REQUIRE(ast.body.size() == 4);
    const Stmt& loop = ast.body[2];
    REQUIRE(loop.kind == StmtKind::For);
    REQUIRE(loop.body.size() == 1);
    CHECK(loop.body[0].kind == StmtKind::With);
    REQUIRE(loop.body[0].body.size() == 1);
    CHECK(loop.body[0].body[0].kind == StmtKind::With);
    CHECK(loop.body[0].body[0].body[0].kind == StmtKind::SetTo);
}

TEST_CASE("declarations without statements give an empty body") {
    Ast ast = parse_ok("x = Param(2)\ny = Output(2)\n");
    CHECK(ast.body.empty());
    CHECK(ast.decls.size() == 2);
}

TEST_CASE("zero domain is rejected at parse time") {
    auto r = parse_text("x = Param(0)\n");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "domain size must be >= 1"));
}

TEST_CASE("unsupported constructs are reported by name") {
    auto r = parse_text("x = Var(2)\nwhile x:\n    x.set_to(1)\n");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "unsupported construct 'while'"));
    REQUIRE(!r.diagnostics.empty());
    CHECK(r.diagnostics[0].span.line == 2);
}

TEST_CASE("syntax errors carry a span") {
    auto r = parse_text("x = Var(2)\nx.set_to((1 + 2)\n");
    CHECK_FALSE(r.ok());
    REQUIRE(!r.diagnostics.empty());
    CHECK(r.diagnostics[0].span.line >= 2);
    CHECK(parse_text("").diagnostics.size() == 1);
    CHECK(mentions(parse_text("x = Var(2)\nx.set_to(3 / 2)\n").diagnostics, "'//'"));
}

TEST_CASE("resolve_constants substitutes T and folds loop bounds") {
    Ast ast = parse_ok(kAutomaton);
    SUBCASE("file value") {
        auto r = resolve_constants(ast, {});
        REQUIRE(r.ok());
        CHECK(r->decls[1].shape[0].value == 5);
        const Stmt& loop = r->body[2];
        CHECK(loop.lower.value == 1);
        CHECK(loop.upper.value == 4);
    }
    SUBCASE("override") {
        auto r = resolve_constants(ast, {{"T", 4}});
        REQUIRE(r.ok());
        CHECK(r->decls[1].shape[0].value == 4);
        CHECK(r->body[2].lower.value == 1);
        CHECK(r->body[2].upper.value == 3);
    }
    SUBCASE("unknown override") {
        auto r = resolve_constants(ast, {{"Q", 4}});
        CHECK_FALSE(r.ok());
    }
}

TEST_CASE("empty range drops the loop with a warning") {
    Ast ast = parse_ok("x = Output(2)\nfor i in range(3, 3):\n    x.set_to(1)\nx.set_to(0)\n");
    auto r = resolve_constants(ast, {});
    REQUIRE(r.ok());
    CHECK(r->body.size() == 1);
    CHECK(has_code(r.diagnostics, "empty-range"));
    CHECK_FALSE(has_errors(r.diagnostics));
}

TEST_CASE("negative loop range and unresolvable constants are errors") {
    CHECK(has_code(compile_text("x = Output(2)\nx.set_to(0)\nfor i in range(3, 1):\n    x.set_to(1)\n").diagnostics,
                   "loop-range"));
    auto r = compile_text("A = B + 1\nB = 2\nx = Output(2)\nx.set_to(0)\n");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "unresolvable constant"));
}

TEST_CASE("automaton model checks cleanly") {
    auto r = compile_text(kAutomaton);
    INFO(diag_text(r.diagnostics));
    REQUIRE(r.ok());
    CHECK(r.diagnostics.empty());
    CHECK(r->cells.size() == 4 + 5 + 2 + 1);
}

TEST_CASE("assigning a domain-2 cell to a domain-3 variable is a domain mismatch") {
    const std::string text =
        "rt = Param(2)[2, 2]\n"
        "i = Input(2)[2]\n"
        "y = Var(3)\n"
        "o = Output(3)\n"
        "with i[0] as a:\n"
        "    with i[1] as b:\n"
        "        y.set_to(rt[a, b])\n"
        "o.set_to(y)\n";
    auto r = compile_text(text);
    CHECK_FALSE(r.ok());
    CHECK(has_code(r.diagnostics, "domain-mismatch"));
}

TEST_CASE("runtime index must come from a gate") {
    const std::string head =
        "inp = Input(4)\n"
        "s = Var(4)\n"
        "tape = Var(2)[4]\n"
        "out = Output(2)\n"
        "s.set_to(inp)\n"
        "for k in range(4):\n"
        "    tape[k].set_to(k % 2)\n";
    auto bad = compile_text(head + "out.set_to(tape[s])\n");
    CHECK_FALSE(bad.ok());
    CHECK(mentions(bad.diagnostics, "runtime index must be introduced by a gate"));

    auto good = compile_text(head + "with s as j:\n    out.set_to(tape[j])\n");
    INFO(diag_text(good.diagnostics));
    CHECK(good.ok());
}

TEST_CASE("writes to inputs and params are rejected") {
    CHECK(has_code(compile_text("i = Input(2)\no = Output(2)\ni.set_to(1)\no.set_to(i)\n").diagnostics,
                   "write-input"));
    CHECK(has_code(compile_text("p = Param(2)\no = Output(2)\np.set_to(1)\no.set_to(p)\n").diagnostics,
                   "write-param"));
}

TEST_CASE("outputs must be written exactly once on every path") {
    CHECK(has_code(compile_text("o = Output(2)\n").diagnostics, "missing-write"));
    CHECK(has_code(compile_text("o = Output(2)\no.set_to(0)\no.set_to(1)\n").diagnostics, "double-write"));
    auto partial = compile_text("c = Input(2)\no = Output(2)\nwith c as v:\n    if v == 0:\n        o.set_to(1)\n");
    CHECK(has_code(partial.diagnostics, "missing-write"));
}

TEST_CASE("function tables are range-checked and tabulated") {
    auto bad = compile_text("def f(a) -> 2 over (3): return a\np = Param(3)\no = Output(2)\no.set_to(f(p))\n");
    CHECK(has_code(bad.diagnostics, "fn-range"));
    auto ok = compile_text("def f(a, b) -> 3 over (3, 2): return (a + b) % 3\np = Param(3)\nq = Param(2)\n"
                           "o = Output(3)\no.set_to(f(p, q))\n");
    REQUIRE(ok.ok());
    REQUIRE(ok->functions.size() == 1);
    const auto& t = ok->functions[0].entries;
    REQUIRE(t.size() == 6);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 2; ++b) CHECK(t[static_cast<std::size_t>(a * 2 + b)] == (a + b) % 3);
}

TEST_CASE("pretty-print round trip over every zoo model") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(GSYN_ZOO_DIR)) {
        if (entry.path().extension() != ".tpt") continue;
        ++seen;
        CAPTURE(entry.path().string());
        Ast a = parse_ok(gsyn::testing::read_file(entry.path().string()));
        const std::string printed = pretty_print(a);
        Ast b = parse_ok(printed);
        CHECK(a == b);
        CHECK(pretty_print(b) == printed);
    }
    CHECK(seen >= 2);
}

TEST_CASE("expression printing keeps precedence") {
    for (const char* src : {"(a + b) * c", "a - (b - c)", "a - b - c", "-(a + 1)", "not (a and b)",
                            "x if a < b else y", "(x if a else y) + 1", "a % 2 == b // 3",
                            "(a == b) == c"}) {
        CAPTURE(src);
        Ast a = parse_ok(std::string("o = Output(2)\no.set_to(f(") + src + "))\n");
        Ast b = parse_ok(pretty_print(a));
        CHECK(a == b);
    }
}

TEST_CASE("check is deterministic") {
    const std::string text = "i = Input(2)\nv = Var(3)\no = Output(2)\nv.set_to(i)\no.set_to(q)\no.set_to(1)\n";
    auto a = compile_text(text);
    auto b = compile_text(text);
    CHECK_FALSE(a.ok());
    CHECK(diag_text(a.diagnostics) == diag_text(b.diagnostics));
    CHECK(a.diagnostics.size() >= 2);
}
