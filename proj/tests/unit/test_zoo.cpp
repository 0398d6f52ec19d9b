#include <doctest.h>

#include <cmath>
#include <set>

#include "gsyn/exec/io_json.hpp"
#include "gsyn/exec/synthesis.hpp"
#include "gsyn/zoo/zoo.hpp"
#include "testing.hpp"

using namespace gsyn;
using namespace gsyn::zoo;
using nlohmann::json;

namespace {

const std::string kZoo = GSYN_ZOO_DIR;

std::vector<TaskSpec> registry() {
    auto r = list_tasks(kZoo);
    REQUIRE_MESSAGE(r.ok(), gsyn::testing::diag_text(r.diagnostics));
    return *r;
}

LoadedTask load(const std::string& name, std::uint64_t seed = 1) {
    auto tasks = registry();
    const TaskSpec* spec = find_task(tasks, name);
    REQUIRE(spec);
    auto t = load_task(kZoo, *spec, seed);
    REQUIRE_MESSAGE(t.ok(), gsyn::testing::diag_text(t.diagnostics));
    return *t;
}

// The binary word on a tape, up to the first blank.
std::vector<int> word(const json& tape) {
    std::vector<int> w;
    for (int s : tape) {
        if (s == 2) break;
        w.push_back(s);
    }
    return w;
}

}  // namespace

TEST_CASE("registry lists the fourteen tasks in a fixed order") {
    auto tasks = registry();
    std::vector<std::string> names;
    for (const auto& t : tasks) names.push_back(t.name);
    CHECK(names == std::vector<std::string>{"automaton", "parity-chain", "invert", "prepend-zero", "binary-decrement",
                                            "controlled-shift", "full-adder", "2-bit-adder", "bb-access",
                                            "bb-decrement", "bb-list-k", "asm-access", "asm-decrement",
                                            "asm-list-k"});
    const auto* inv = find_task(tasks, "invert");
    REQUIRE(inv);
    CHECK(inv->timesteps == 6);
    CHECK(inv->examples == 5);
    CHECK(*inv->log10_d == 4);
    CHECK(find_task(tasks, "2-bit-adder")->examples == 16);
    CHECK(find_task(tasks, "nope") == nullptr);
    std::set<std::string> stretch;
    for (const auto& t : tasks)
        if (t.stretch) stretch.insert(t.name);
    CHECK(stretch == std::set<std::string>{"2-bit-adder", "bb-list-k", "asm-list-k"});
}

TEST_CASE("registry parsing rejects malformed entries") {
    CHECK_FALSE(parse_registry("[]").ok());
    CHECK_FALSE(parse_registry(R"({"version": 2, "tasks": []})").ok());
    CHECK(parse_registry(R"({"version": 1, "tasks": []})").ok());
    CHECK_FALSE(parse_registry(R"({"version": 1, "tasks": [{"name": "a", "model": "m", "generator": "bogus"}]})").ok());
    CHECK_FALSE(parse_registry(R"({"version": 1, "tasks": [{"name": "a", "model": "m", "generator": "mem-access",
        "examples": 0}]})").ok());
    const char* dup = R"({"version": 1, "tasks": [{"name": "a", "model": "m", "generator": "mem-access"},
        {"name": "a", "model": "m", "generator": "mem-access"}]})";
    CHECK_FALSE(parse_registry(dup).ok());
    CHECK_FALSE(list_tasks("/nonexistent").ok());
}

TEST_CASE("every task compiles with its sizes near the listed log10(D)") {
    for (const auto& spec : registry()) {
        CAPTURE(spec.name);
        auto t = load_task(kZoo, spec, 1);
        REQUIRE_MESSAGE(t.ok(), gsyn::testing::diag_text(t.diagnostics));
        CHECK(ir::validate_ssa(*t->graph).empty());
        REQUIRE(spec.log10_d);
        const double d = ir::param_space_size(*t->graph).log10;
        CHECK(std::abs(d - *spec.log10_d) <= 0.5);
        CHECK(t->instance.num_examples() == spec.examples);
        const auto& c = t->constants;
        if (spec.family == "circuit") CHECK(spec.timesteps == c.at("G"));
        else if (c.count("T")) CHECK(spec.timesteps == c.at("T"));
    }
}

TEST_CASE("generators are deterministic in the seed") {
    for (const auto& spec : registry()) {
        CAPTURE(spec.name);
        auto a = load_task(kZoo, spec, 11), b = load_task(kZoo, spec, 11), c = load_task(kZoo, spec, 12);
        REQUIRE(a.ok());
        CHECK(a->examples == b->examples);
        // Circuit tasks and the automaton use every input, so only sampled tasks vary.
        if (spec.family == "turing" || spec.family == "basic-block" || spec.family == "assembly")
            CHECK(a->examples != c->examples);
    }
    CHECK_THROWS_AS(generate_examples("bogus", {}, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_examples("mem-access", {}, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_examples("automaton-xor", {{"T", 6}}, 5, 0), std::invalid_argument);
}

TEST_CASE("automaton examples follow the XOR rule") {
    // With T = 6 the tape reads a, b, a^b, a, b, a^b.
    auto ex = generate_examples("automaton-xor", {{"T", 6}}, 4, 0);
    REQUIRE(ex.size() == 4);
    for (const auto& e : ex) {
        const int a = e["inputs"]["initial_tape"][0], b = e["inputs"]["initial_tape"][1];
        CHECK(e["outputs"]["final_tape"] == (a ^ b));
    }
    // T = 5 ends on b.
    for (const auto& e : generate_examples("automaton-xor", {{"T", 5}}, 4, 0))
        CHECK(e["outputs"]["final_tape"] == e["inputs"]["initial_tape"][1]);
}

TEST_CASE("tape task examples") {
    const std::map<std::string, long long> c{{"L", 5}, {"A", 3}, {"H", 2}, {"T", 9}};
    for (const auto& e : generate_examples("tm-invert", c, 10, 3)) {
        auto in = word(e["inputs"]["initial_tape"]), out = word(e["outputs"]["final_tape"]);
        REQUIRE(in.size() == out.size());
        for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i] == 1 - in[i]);
    }
    for (const auto& e : generate_examples("tm-prepend-zero", c, 10, 3)) {
        auto in = word(e["inputs"]["initial_tape"]), out = word(e["outputs"]["final_tape"]);
        in.insert(in.begin(), 0);
        CHECK(out == in);
    }
    auto value = [](const std::vector<int>& w) {
        int v = 0;
        for (int b : w) v = 2 * v + b;
        return v;
    };
    for (const auto& e : generate_examples("tm-binary-decrement", c, 10, 3)) {
        auto in = word(e["inputs"]["initial_tape"]), out = word(e["outputs"]["final_tape"]);
        CHECK(in.size() <= 4);
        CHECK(out.size() == in.size());
        CHECK(value(out) == value(in) - 1);
    }
    // All 26 nonzero words of length <= 4; hand-checked: 1100 - 1 = 1011.
    auto one = generate_examples("tm-binary-decrement", c, 26, 0);
    bool seen = false;
    for (const auto& e : one)
        if (e["inputs"]["initial_tape"] == json{1, 1, 0, 0, 2}) {
            CHECK(e["outputs"]["final_tape"] == json{1, 0, 1, 1, 2});
            seen = true;
        }
    CHECK(seen);
}

TEST_CASE("circuit examples cover every input") {
    auto fa = generate_examples("circuit-full-adder", {{"I", 3}, {"O", 2}}, 8, 0);
    REQUIRE(fa.size() == 8);
    CHECK(fa[7]["inputs"]["inputs"] == json{1, 1, 1});
    CHECK(fa[7]["outputs"]["outputs"] == json{1, 1});
    CHECK(fa[3]["inputs"]["inputs"] == json{0, 1, 1});
    CHECK(fa[3]["outputs"]["outputs"] == json{0, 1});
    auto cs = generate_examples("circuit-controlled-shift", {{"I", 3}, {"O", 3}}, 8, 0);
    CHECK(cs[5]["inputs"]["inputs"] == json{1, 0, 1});
    CHECK(cs[5]["outputs"]["outputs"] == json{1, 1, 0});
    CHECK(cs[2]["outputs"]["outputs"] == json{0, 1, 0});
    auto add = generate_examples("circuit-2bit-adder", {{"I", 4}, {"O", 3}}, 16, 0);
    // a = 3 (1,1), b = 2 (0,1): 5 = 1,0,1 least significant first.
    CHECK(add[0b1101]["inputs"]["inputs"] == json{1, 1, 0, 1});
    CHECK(add[0b1101]["outputs"]["outputs"] == json{1, 0, 1});
    auto some = generate_examples("circuit-full-adder", {{"I", 3}, {"O", 2}}, 5, 9);
    CHECK(some.size() == 5);
    CHECK_THROWS(generate_examples("circuit-full-adder", {{"I", 3}, {"O", 2}}, 9, 0));
}

TEST_CASE("heap task examples") {
    for (const auto& e : generate_examples("mem-access", {{"M", 5}}, 20, 4)) {
        auto in = e["inputs"]["initial_memory"].get<std::vector<int>>();
        auto out = e["outputs"]["final_memory"].get<std::vector<int>>();
        CHECK(out[0] == in[1 + in[0]]);
        CHECK(std::equal(in.begin() + 1, in.end(), out.begin() + 1));
    }
    for (const auto& e : generate_examples("mem-decrement", {{"M", 5}}, 20, 4)) {
        auto in = e["inputs"]["initial_memory"].get<std::vector<int>>();
        auto out = e["outputs"]["final_memory"].get<std::vector<int>>();
        std::size_t i = 0;
        for (; in[i] != 0; ++i) CHECK(out[i] == in[i] - 1);
        CHECK(i >= 1);
        for (; i < in.size(); ++i) CHECK(out[i] == in[i]);
    }
    for (const auto& e : generate_examples("mem-list-k", {{"M", 8}}, 20, 4)) {
        auto in = e["inputs"]["initial_memory"].get<std::vector<int>>();
        auto out = e["outputs"]["final_memory"].get<std::vector<int>>();
        // Walk the list and collect it in order.
        std::vector<int> values;
        for (int node = in[1]; node != 0; node = in[node]) values.push_back(in[node + 1]);
        CHECK(values.size() == 3);
        CHECK(out[0] == values.at(in[0]));
    }
}

TEST_CASE("parity chain observes neighbour XORs of a seeded hidden string") {
    auto a = generate_examples("parity-chain", {{"K", 6}}, 1, 5);
    REQUIRE(a.size() == 1);
    CHECK(a[0]["inputs"].empty());
    CHECK(a[0]["outputs"]["parity"].size() == 5);
    auto t = load("parity-chain");
    auto r = exec::enumerate(t.instance);
    REQUIRE(r.status == exec::Status::Success);
    // The complement is the other consistent string.
    auto flipped = *r.program;
    for (auto& v : flipped.values) v = 1 - v;
    CHECK(exec::check_consistency(*t.graph, flipped, t.instance.examples));
}

TEST_CASE("reference programs reproduce the generated examples") {
    for (const auto& spec : registry()) {
        if (spec.reference.empty()) continue;
        CAPTURE(spec.name);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto t = load_task(kZoo, spec, seed);
            REQUIRE(t.ok());
            auto p = load_reference(kZoo, spec, *t->graph);
            REQUIRE_MESSAGE(p.ok(), gsyn::testing::diag_text(p.diagnostics));
            CHECK(exec::check_consistency(*t->graph, *p, t->instance.examples));
        }
    }
}

TEST_CASE("enumeration solves every task with D up to 2^20") {
    int solved = 0;
    for (const auto& spec : registry()) {
        auto t = load_task(kZoo, spec, 3);
        REQUIRE(t.ok());
        if (ir::param_space_size(*t->graph).log10 > 20 * std::log10(2.0)) continue;
        CAPTURE(spec.name);
        auto r = exec::enumerate(t->instance);
        REQUIRE(r.status == exec::Status::Success);
        CHECK(exec::check_consistency(*t->graph, *r.program, t->instance.examples));
        ++solved;
    }
    CHECK(solved == 3);  // automaton, parity chain, invert
}

TEST_CASE("Turing rule listing golden") {
    auto t = load("binary-decrement");
    auto p = load_reference(kZoo, t.spec, *t.graph);
    REQUIRE(p.ok());
    CHECK(gsyn::testing::matches_golden("binary-decrement.txt", exec::render_program(*t.graph, *p)));
}
