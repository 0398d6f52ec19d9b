#include "testing.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gsyn/ir/pipeline.hpp"

namespace gsyn::testing {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string zoo_path(const std::string& file) { return std::string(GSYN_ZOO_DIR) + "/" + file; }
std::string golden_path(const std::string& file) { return std::string(GSYN_GOLDEN_DIR) + "/" + file; }
std::string zoo_source(const std::string& file) { return read_file(zoo_path(file)); }

ir::Graph graph_of(const std::string& text, const std::map<std::string, long long>& overrides,
                   const std::string& name) {
    auto g = ir::build_graph(frontend::ModelSource{text, name, overrides});
    if (!g.ok()) throw std::runtime_error("model failed to compile:\n" + diag_text(g.diagnostics));
    return std::move(*g);
}

std::shared_ptr<const ir::Graph> shared_graph_of(const std::string& text,
                                                 const std::map<std::string, long long>& overrides) {
    return std::make_shared<const ir::Graph>(graph_of(text, overrides));
}

std::string diag_text(const Diagnostics& ds) {
    std::ostringstream os;
    for (const auto& d : ds) os << d << '\n';
    return os.str();
}

bool has_code(const Diagnostics& ds, const std::string& code) {
    for (const auto& d : ds)
        if (d.code == code) return true;
    return false;
}

bool mentions(const Diagnostics& ds, const std::string& fragment) {
    for (const auto& d : ds)
        if (d.message.find(fragment) != std::string::npos) return true;
    return false;
}

bool matches_golden(const std::string& file, const std::string& actual) {
    const std::string path = golden_path(file);
    if (const char* u = std::getenv("GSYN_UPDATE_GOLDEN"); u && std::string(u) == "1") {
        std::ofstream(path, std::ios::binary) << actual;
        return true;
    }
    return read_file(path) == actual;
}

int simulate_automaton(const int rule[2][2], int a, int b, int steps) {
    std::vector<int> tape{a, b};
    for (int t = 1; t + 1 < steps; ++t) tape.push_back(rule[tape[t - 1]][tape[t]]);
    return tape.back();
}

ir::IOExamples automaton_io(const ir::Graph& g, const int rule[2][2], int steps) {
    ir::IOExamples io;
    const int i0 = g.find_var("initial_tape", std::vector<int>{0});
    const int i1 = g.find_var("initial_tape", std::vector<int>{1});
    const int out = g.output_ids[0];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) io.push_back({{{i0, a}, {i1, b}}, {{out, simulate_automaton(rule, a, b, steps)}}});
    return io;
}

ir::InstanceGraph automaton_instance() {
    static const int kXor[2][2] = {{0, 1}, {1, 0}};
    auto g = std::make_shared<const ir::Graph>(graph_of(zoo_source("automaton.tpt"), {{"T", 6}}, "automaton"));
    auto ig = ir::bind_examples(g, automaton_io(*g, kXor, 6));
    if (!ig.ok()) throw std::runtime_error(diag_text(ig.diagnostics));
    return *ig;
}

namespace {

std::string env_or(const char* name, const char* fallback) {
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

}  // namespace

std::string smt_solver() { return env_or("GSYN_SMT_SOLVER", GSYN_DEFAULT_SMT_SOLVER); }
std::string ilp_solver() { return env_or("GSYN_ILP_SOLVER", GSYN_DEFAULT_ILP_SOLVER); }

}  // namespace gsyn::testing
