#include <doctest.h>

#include <filesystem>
#include <set>

#include "gsyn/frontend/eval.hpp"
#include "gsyn/ir/graph.hpp"
#include "gsyn/ir/instance.hpp"
#include "gsyn/ir/pipeline.hpp"
#include "testing.hpp"

using namespace gsyn;
using namespace gsyn::ir;
using gsyn::testing::graph_of;
using gsyn::testing::mentions;

namespace {

const std::string kAutomaton = gsyn::testing::zoo_source("automaton.tpt");
const std::string kParity = gsyn::testing::zoo_source("parity_chain.tpt");

int count_kind(const Graph& g, VarKind k) {
    int n = 0;
    for (const auto& v : g.vars) n += v.kind == k;
    return n;
}

IOExample automaton_example(const Graph& g, int a, int b, int out) {
    IOExample ex;
    ex.inputs = {{g.find_var("initial_tape", std::vector<int>{0}), a},
                 {g.find_var("initial_tape", std::vector<int>{1}), b}};
    ex.outputs = {{g.find_var("final_tape", std::vector<int>{}), out}};
    return ex;
}

int depth_of_block(const Graph& g, int b) {
    int d = 0;
    while (g.blocks[static_cast<std::size_t>(b)].parent_gate >= 0) {
        b = g.gates[static_cast<std::size_t>(g.blocks[static_cast<std::size_t>(b)].parent_gate)].block;
        ++d;
    }
    return d;
}

}  // namespace

TEST_CASE("automaton lowers to the expected census") {
    Graph g = graph_of(kAutomaton);
    CHECK(count_kind(g, VarKind::Param) == 4);
    CHECK(count_kind(g, VarKind::Var) == 5);
    CHECK(count_kind(g, VarKind::Input) == 2);
    CHECK(count_kind(g, VarKind::Output) == 1);
    for (std::size_t i = 0; i < g.vars.size(); ++i) CHECK(g.vars[i].id == static_cast<int>(i));

    // 3 iterations, each a 2-way gate holding two 2-way gates.
    int outer = 0, inner = 0;
    for (const auto& gate : g.gates) {
        CHECK(gate.branches.size() == 2);
        (gate.block == 0 ? outer : inner) += 1;
    }
    CHECK(outer == 3);
    CHECK(inner == 6);
    CHECK(g.factors.size() == 2 + 12 + 1);

    // Leaf copies read ruleTable[x0, x1] where x1 is the outer and x0 the inner branch value.
    int leaf = 0;
    for (const auto& f : g.factors) {
        if (f.block == 0) continue;
        ++leaf;
        REQUIRE(f.kind == FactorKind::Copy);
        const auto& inner_block = g.blocks[static_cast<std::size_t>(f.block)];
        const auto& inner_gate = g.gates[static_cast<std::size_t>(inner_block.parent_gate)];
        const auto& outer_block = g.blocks[static_cast<std::size_t>(inner_gate.block)];
        const int x0 = inner_block.branch;
        const int x1 = outer_block.branch;
        CHECK(f.inputs[0].cell == g.find_var("ruleTable", std::vector<int>{x0, x1}));
        CHECK(depth_of_block(g, f.block) == 2);
    }
    CHECK(leaf == 12);
    CHECK(validate_ssa(g).empty());
}

TEST_CASE("minimal constant program") {
    Graph g = graph_of("out = Output(2)\nout.set_to(1)\n");
    REQUIRE(g.vars.size() == 1);
    REQUIRE(g.factors.size() == 1);
    CHECK(g.factors[0].kind == FactorKind::Const);
    CHECK(g.factors[0].value == 1);
    CHECK(param_space_size(g).value == 1);
    CHECK(param_space_size(g).log10 == 0.0);
}

TEST_CASE("parity chain K=4 uses one shared xor table") {
    Graph g = graph_of(kParity, {{"K", 4}});
    CHECK(g.param_ids.size() == 4);
    CHECK(g.output_ids.size() == 3);
    REQUIRE(g.tables.size() == 1);
    CHECK(g.tables[0].entries == std::vector<int>{0, 1, 1, 0});
    REQUIRE(g.factors.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& f = g.factors[i];
        CHECK(f.kind == FactorKind::Table);
        CHECK(f.table == 0);
        CHECK(f.dst == g.output_ids[i]);
        CHECK(f.inputs[0].cell == g.param_ids[i]);
        CHECK(f.inputs[1].cell == g.param_ids[i + 1]);
    }
}

TEST_CASE("param space size is exact") {
    CHECK(param_space_size(graph_of(kAutomaton)).value == 16);
    auto big = param_space_size(graph_of(kParity, {{"K", 100}}));
    CHECK(big.value == (boost::multiprecision::cpp_int(1) << 100));
    CHECK(big.log10 == doctest::Approx(100 * 0.30102999566398120));
}

TEST_CASE("validate_ssa reports double writes with both origins") {
    Graph g = graph_of("x = Var(2)\nout = Output(2)\nx.set_to(0)\nout.set_to(x)\n");
    Factor dup = g.factors[0];
    dup.value = 1;
    dup.line = 99;
    g.blocks[0].items.insert(g.blocks[0].items.begin() + 1, {BlockItem::Kind::Factor, 2});
    g.factors.push_back(dup);
    auto d = validate_ssa(g);
    REQUIRE(!d.empty());
    CHECK(d[0].code == "double-write");
    CHECK(d[0].message.find("line 3") != std::string::npos);
    CHECK(d[0].message.find("line 99") != std::string::npos);
}

TEST_CASE("validate_ssa names the branch missing a write") {
    // c gates a write to y in branch 0 only; y is read afterwards.
    const std::string text = "c = Input(2)\ny = Var(2)\nout = Output(2)\n"
                             "with c as v:\n    if v == 0:\n        y.set_to(1)\nout.set_to(y)\n";
    auto checked = frontend::compile(frontend::ModelSource{text, "t", {}});
    CHECK_FALSE(checked.ok());
    CHECK(mentions(checked.diagnostics, "but not in branch 1"));

    // Same shape built directly in the IR, bypassing the checker.
    Graph g = graph_of("c = Input(2)\ny = Var(2)\nout = Output(2)\nwith c as v:\n    y.set_to(v)\nout.set_to(y)\n");
    const int b1 = g.gates[0].branches[1];
    g.blocks[static_cast<std::size_t>(b1)].items.clear();
    auto d = validate_ssa(g);
    REQUIRE(!d.empty());
    CHECK(d[0].code == "missing-write");
    CHECK(d[0].message.find("not in branch 1") != std::string::npos);
}

TEST_CASE("validate_ssa rejects writers on params and inputs") {
    Graph g = graph_of("p = Param(2)\nout = Output(2)\nout.set_to(p)\n");
    g.factors.push_back(Factor{FactorKind::Const, g.param_ids[0], 1, -1, {}, 0, 7});
    g.blocks[0].items.insert(g.blocks[0].items.begin(), {BlockItem::Kind::Factor, 1});
    auto d = validate_ssa(g);
    REQUIRE(!d.empty());
    CHECK(d[0].code == "write-param");
}

TEST_CASE("bind_examples replicates all non-param cells per example") {
    auto g = std::make_shared<const Graph>(graph_of(kAutomaton));
    IOExamples io;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) io.push_back(automaton_example(*g, a, b, a ^ b));
    auto ig = bind_examples(g, io);
    REQUIRE(ig.ok());
    CHECK(ig->num_examples() == 4);
    CHECK(ig->num_nodes() == 4 + 4 * 8);
    CHECK(ig->clamps.size() == 8);
    CHECK(ig->observations.size() == 4);

    std::set<int> tape_nodes;
    for (int e = 0; e < 4; ++e) {
        for (int t = 0; t < 5; ++t) tape_nodes.insert(ig->node(e, g->find_var("tape", std::vector<int>{t})));
        for (int p : g->param_ids) CHECK(ig->node(e, p) == p);
    }
    CHECK(tape_nodes.size() == 20);
    std::set<int> all;
    for (int e = 0; e < 4; ++e)
        for (const auto& v : g->vars) all.insert(ig->node(e, v.id));
    CHECK(static_cast<int>(all.size()) == ig->num_nodes());
    CHECK(*all.rbegin() == ig->num_nodes() - 1);
    CHECK(param_space_size(*ig).value == param_space_size(*g).value);
}

TEST_CASE("single example binding keeps base ids") {
    auto g = std::make_shared<const Graph>(graph_of(kAutomaton));
    auto ig = bind_examples(g, {automaton_example(*g, 1, 0, 0)});
    REQUIRE(ig.ok());
    CHECK(ig->num_nodes() == static_cast<int>(g->vars.size()));
    for (const auto& v : g->vars) CHECK(ig->node(0, v.id) == v.id);
    CHECK(ig->clamps == ig->examples[0].inputs);
}

TEST_CASE("bind_examples validates coverage and domains") {
    auto g = std::make_shared<const Graph>(graph_of(kAutomaton));
    auto bad = automaton_example(*g, 1, 0, 0);
    bad.inputs[0].value = 2;
    auto r = bind_examples(g, {bad});
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "outside domain"));

    auto missing = automaton_example(*g, 1, 0, 0);
    missing.outputs.clear();
    CHECK_FALSE(bind_examples(g, {missing}).ok());

    auto extra = automaton_example(*g, 1, 0, 0);
    extra.inputs.push_back({g->param_ids[0], 0});
    CHECK_FALSE(bind_examples(g, {extra}).ok());
    CHECK_FALSE(bind_examples(g, {}).ok());
}

TEST_CASE("size budget") {
    auto typed = frontend::compile(frontend::ModelSource{kParity, "p", {{"K", 50}}});
    REQUIRE(typed.ok());
    auto small = lower(*typed, LowerOptions{10, 1000});
    CHECK_FALSE(small.ok());
    CHECK(mentions(small.diagnostics, "size budget"));
    auto few_factors = lower(*typed, LowerOptions{1000, 10});
    CHECK_FALSE(few_factors.ok());

    auto g = std::make_shared<const Graph>(graph_of(kAutomaton));
    IOExamples io(3, automaton_example(*g, 0, 0, 0));
    CHECK(bind_examples(g, io, LowerOptions{1000, 1000}).ok());
    CHECK_FALSE(bind_examples(g, io, LowerOptions{20, 1000}).ok());
}

TEST_CASE("lowering is deterministic and matches the golden dump") {
    const std::string a = dump(graph_of(kAutomaton, {}, "automaton"));
    const std::string b = dump(graph_of(kAutomaton, {}, "automaton"));
    CHECK(a == b);
    CHECK(gsyn::testing::matches_golden("automaton.ir", a));
}

TEST_CASE("function tables agree with direct evaluation of the body") {
    for (const auto& entry : std::filesystem::directory_iterator(GSYN_ZOO_DIR)) {
        if (entry.path().extension() != ".tpt") continue;
        CAPTURE(entry.path().string());
        auto typed = frontend::compile(
            frontend::ModelSource{gsyn::testing::read_file(entry.path().string()), "z", {}});
        REQUIRE(typed.ok());
        auto g = lower(*typed);
        REQUIRE(g.ok());
        for (const auto& fn : typed->ast.functions) {
            const FunctionTable* table = nullptr;
            for (const auto& t : g->tables)
                if (t.name == fn.name) table = &t;
            REQUIRE(table);
            if (table->entries.size() > (1u << 16)) continue;
            std::vector<int> tuple(table->input_domains.size(), 0);
            for (std::size_t k = 0; k < table->entries.size(); ++k) {
                std::size_t rest = k;
                for (std::size_t i = tuple.size(); i-- > 0;) {
                    tuple[i] = static_cast<int>(rest % static_cast<std::size_t>(table->input_domains[i]));
                    rest /= static_cast<std::size_t>(table->input_domains[i]);
                }
                const long long direct = frontend::evaluate(fn.body, [&](const frontend::Expr& e)
                                                                         -> std::optional<long long> {
                    for (std::size_t i = 0; i < fn.params.size(); ++i)
                        if (fn.params[i] == e.name) return tuple[i];
                    return std::nullopt;
                });
                CHECK(table->entries[k] == direct);
                CHECK(table->lookup(tuple) == direct);
            }
        }
    }
}

TEST_CASE("every zoo model compiles and passes validate_ssa") {
    for (const auto& entry : std::filesystem::directory_iterator(GSYN_ZOO_DIR)) {
        if (entry.path().extension() != ".tpt") continue;
        CAPTURE(entry.path().string());
        auto g = build_graph(frontend::ModelSource{gsyn::testing::read_file(entry.path().string()), "z", {}});
        INFO(gsyn::testing::diag_text(g.diagnostics));
        CHECK(g.ok());
    }
}
