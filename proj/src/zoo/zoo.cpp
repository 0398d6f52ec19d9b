#include "gsyn/zoo/zoo.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gsyn/exec/io_json.hpp"
#include "gsyn/ir/pipeline.hpp"

namespace gsyn::zoo {

using nlohmann::json;

namespace {

Diagnostic zoo_error(const std::string& msg) { return make_error({}, "zoo", msg); }

template <class T>
Checked<T> fail(const std::string& msg) {
    Checked<T> r;
    r.diagnostics.push_back(zoo_error(msg));
    return r;
}

long long need(const std::map<std::string, long long>& c, const std::string& name) {
    auto it = c.find(name);
    if (it == c.end()) throw std::invalid_argument("generator needs constant " + name);
    return it->second;
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Draws `count` distinct inputs from `draw`.
std::vector<std::vector<int>> distinct(int count, std::mt19937_64& rng,
                                       const std::function<std::vector<int>(std::mt19937_64&)>& draw) {
    std::set<std::vector<int>> seen;
    std::vector<std::vector<int>> out;
    for (int tries = 0; (int)out.size() < count; ++tries) {
        if (tries > 100'000) throw std::invalid_argument("not enough distinct inputs for the requested count");
        auto v = draw(rng);
        if (seen.insert(v).second) out.push_back(std::move(v));
    }
    return out;
}

json example(json inputs, json outputs) { return json{{"inputs", std::move(inputs)}, {"outputs", std::move(outputs)}}; }

// ---- cellular automaton ----

json gen_automaton(const std::map<std::string, long long>& c, int count, std::mt19937_64& rng) {
    const long long steps = need(c, "T");
    if (count > 4) throw std::invalid_argument("automaton has only 4 distinct inputs");
    std::vector<std::pair<int, int>> all{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    if (count < 4) {
        std::shuffle(all.begin(), all.end(), rng);
        all.resize(count);
        std::sort(all.begin(), all.end());
    }
    json out = json::array();
    for (auto [a, b] : all) {
        std::vector<int> tape{a, b};
        while ((long long)tape.size() < steps) tape.push_back(tape[tape.size() - 2] ^ tape.back());
        out.push_back(example({{"initial_tape", {a, b}}}, {{"final_tape", tape[steps - 1]}}));
    }
    return out;
}

json gen_parity(const std::map<std::string, long long>& c, int count, std::mt19937_64& rng) {
    const long long k = need(c, "K");
    if (k < 2) throw std::invalid_argument("parity chain needs K >= 2");
    std::vector<int> bits(k);
    for (auto& b : bits) b = uniform(rng, 0, 1);
    std::vector<int> parity;
    for (long long i = 0; i + 1 < k; ++i) parity.push_back(bits[i] ^ bits[i + 1]);
    json out = json::array();
    for (int e = 0; e < count; ++e) out.push_back(example(json::object(), {{"parity", parity}}));
    return out;
}

// ---- Turing machine tasks: binary strings left-aligned, padded with blank (2) ----

enum class TmTask { Invert, PrependZero, Decrement };

json gen_turing(TmTask task, const std::map<std::string, long long>& c, int count, std::mt19937_64& rng) {
    const long long len = need(c, "L"), alphabet = need(c, "A"), steps = need(c, "T");
    if (alphabet != 3) throw std::invalid_argument("tape tasks use the alphabet {0, 1, blank}");
    const int blank = 2;
    long long max_n = std::min(len - 1, steps - 1);
    if (task == TmTask::Decrement) max_n = std::min(len - 1, (steps - 1) / 2);
    if (max_n < 1) throw std::invalid_argument("tape or time budget too small");

    auto draw = [&](std::mt19937_64& r) {
        const int n = uniform(r, 1, (int)max_n);
        std::vector<int> s(n);
        for (auto& b : s) b = uniform(r, 0, 1);
        if (task == TmTask::Decrement && std::count(s.begin(), s.end(), 1) == 0) s[uniform(r, 0, n - 1)] = 1;
        return s;
    };
    auto pad = [&](std::vector<int> s) {
        s.resize(len, blank);
        return s;
    };

    json out = json::array();
    for (const auto& s : distinct(count, rng, draw)) {
        std::vector<int> r = s;
        switch (task) {
            case TmTask::Invert:
                for (auto& b : r) b ^= 1;
                break;
            case TmTask::PrependZero:
                r.insert(r.begin(), 0);
                break;
            case TmTask::Decrement: {
                std::size_t i = r.size();
                while (r[--i] == 0) r[i] = 1;
                r[i] = 0;
                break;
            }
        }
        out.push_back(example({{"initial_tape", pad(s)}}, {{"final_tape", pad(r)}}));
    }
    return out;
}

// ---- Boolean circuits: every input assignment, or a seeded subset ----

json gen_circuit(const std::string& which, const std::map<std::string, long long>& c, int count,
                 std::mt19937_64& rng) {
    const long long in = need(c, "I"), outn = need(c, "O");
    std::function<std::vector<int>(const std::vector<int>&)> f;
    if (which == "controlled-shift") {
        if (in != 3 || outn != 3) throw std::invalid_argument("controlled shift needs I = O = 3");
        f = [](const std::vector<int>& x) {
            return x[0] ? std::vector<int>{x[0], x[2], x[1]} : x;
        };
    } else if (which == "full-adder") {
        if (in != 3 || outn != 2) throw std::invalid_argument("full adder needs I = 3, O = 2");
        f = [](const std::vector<int>& x) {
            const int s = x[0] + x[1] + x[2];
            return std::vector<int>{s & 1, s >> 1};
        };
    } else {
        if (in != 4 || outn != 3) throw std::invalid_argument("2-bit adder needs I = 4, O = 3");
        f = [](const std::vector<int>& x) {
            const int s = (x[0] + 2 * x[1]) + (x[2] + 2 * x[3]);
            return std::vector<int>{s & 1, (s >> 1) & 1, s >> 2};
        };
    }
    const int total = 1 << in;
    if (count > total) throw std::invalid_argument("not enough distinct inputs for the requested count");
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    if (count < total) {
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(count);
        std::sort(order.begin(), order.end());
    }
    json out = json::array();
    for (int m : order) {
        std::vector<int> x(in);
        for (int i = 0; i < in; ++i) x[i] = (m >> (in - 1 - i)) & 1;
        out.push_back(example({{"inputs", x}}, {{"outputs", f(x)}}));
    }
    return out;
}

// ---- heap tasks shared by the basic-block and assembly machines ----

enum class MemTask { Access, Decrement, ListK };

json gen_memory(MemTask task, const std::map<std::string, long long>& c, int count, std::mt19937_64& rng) {
    const int m = (int)need(c, "M");
    if (m < 3) throw std::invalid_argument("heap too small");
    std::function<std::vector<int>(std::mt19937_64&)> draw;
    std::function<std::vector<int>(std::vector<int>)> run;
    switch (task) {
        case MemTask::Access:
            draw = [m](std::mt19937_64& r) {
                std::vector<int> mem(m);
                mem[0] = uniform(r, 0, m - 2);
                for (int i = 1; i < m; ++i) mem[i] = uniform(r, 0, m - 1);
                return mem;
            };
            run = [](std::vector<int> mem) {
                mem[0] = mem[1 + mem[0]];
                return mem;
            };
            break;
        case MemTask::Decrement:
            draw = [m](std::mt19937_64& r) {
                std::vector<int> mem(m);
                const int n = uniform(r, 1, m - 1);
                for (int i = 0; i < n; ++i) mem[i] = uniform(r, 1, m - 1);
                mem[n] = 0;
                for (int i = n + 1; i < m; ++i) mem[i] = uniform(r, 0, m - 1);
                return mem;
            };
            run = [](std::vector<int> mem) {
                for (std::size_t i = 0; mem[i] != 0; ++i) --mem[i];
                return mem;
            };
            break;
        case MemTask::ListK: {
            const int nodes = (m - 2) / 2;
            if (nodes < 1) throw std::invalid_argument("heap too small for a list");
            draw = [m, nodes](std::mt19937_64& r) {
                std::vector<int> mem(m, 0), slot(nodes);
                std::iota(slot.begin(), slot.end(), 0);
                std::shuffle(slot.begin(), slot.end(), r);
                mem[0] = uniform(r, 0, nodes - 1);
                mem[1] = 2 + 2 * slot[0];
                for (int i = 0; i < nodes; ++i) {
                    const int at = 2 + 2 * slot[i];
                    mem[at] = i + 1 < nodes ? 2 + 2 * slot[i + 1] : 0;
                    mem[at + 1] = uniform(r, 0, m - 1);
                }
                if (m % 2) mem[m - 1] = uniform(r, 0, m - 1);
                return mem;
            };
            run = [](std::vector<int> mem) {
                int node = mem[1];
                for (int k = mem[0]; k > 0; --k) node = mem[node];
                mem[0] = mem[node + 1];
                return mem;
            };
            break;
        }
    }
    json out = json::array();
    for (const auto& mem : distinct(count, rng, draw))
        out.push_back(example({{"initial_memory", mem}}, {{"final_memory", run(mem)}}));
    return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Checked<std::vector<TaskSpec>> parse_registry(const std::string& json_text) {
    using R = std::vector<TaskSpec>;
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return fail<R>("task registry is not a JSON object");
    if (j.value("version", 0) != 1) return fail<R>("unsupported task registry version");
    if (!j.contains("tasks") || !j["tasks"].is_array()) return fail<R>("task registry has no \"tasks\" array");
    R tasks;
    std::set<std::string> names;
    const auto gens = generator_ids();
    for (const auto& t : j["tasks"]) {
        try {
            TaskSpec s;
            s.name = t.at("name").get<std::string>();
            s.family = t.value("family", "");
            s.model = t.at("model").get<std::string>();
            s.generator = t.at("generator").get<std::string>();
            s.description = t.value("description", "");
            s.reference = t.value("reference", "");
            if (t.contains("constants")) s.constants = t["constants"].get<std::map<std::string, long long>>();
            s.examples = t.value("examples", 1);
            if (t.contains("log10_d") && !t["log10_d"].is_null()) s.log10_d = t["log10_d"].get<double>();
            s.timesteps = t.value("timesteps", 0);
            s.stretch = t.value("stretch", false);
            if (!names.insert(s.name).second) return fail<R>("duplicate task " + s.name);
            if (std::find(gens.begin(), gens.end(), s.generator) == gens.end())
                return fail<R>("task " + s.name + ": unknown generator " + s.generator);
            if (s.examples < 1) return fail<R>("task " + s.name + ": examples must be positive");
            tasks.push_back(std::move(s));
        } catch (const json::exception& e) {
            return fail<R>(std::string("malformed task entry: ") + e.what());
        }
    }
    Checked<R> r;
    r.value = std::move(tasks);
    return r;
}

Checked<std::vector<TaskSpec>> list_tasks(const std::string& zoo_dir) {
    std::string text;
    try {
        text = read_text_file(zoo_dir + "/tasks.json");
    } catch (const std::exception& e) {
        return fail<std::vector<TaskSpec>>(e.what());
    }
    return parse_registry(text);
}

const TaskSpec* find_task(const std::vector<TaskSpec>& tasks, const std::string& name) {
    for (const auto& t : tasks)
        if (t.name == name) return &t;
    return nullptr;
}

std::string default_zoo_dir() {
    if (const char* d = std::getenv("GSYN_ZOO"); d && *d) return d;
    return GSYN_ZOO_DIR;
}

std::vector<std::string> generator_ids() {
    return {"automaton-xor",      "parity-chain",       "tm-invert",
            "tm-prepend-zero",    "tm-binary-decrement", "circuit-controlled-shift",
            "circuit-full-adder", "circuit-2bit-adder", "mem-access",
            "mem-decrement",      "mem-list-k"};
}

json generate_examples(const std::string& generator, const std::map<std::string, long long>& constants, int count,
                       std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("example count must be positive");
    std::mt19937_64 rng(seed);
    if (generator == "automaton-xor") return gen_automaton(constants, count, rng);
    if (generator == "parity-chain") return gen_parity(constants, count, rng);
    if (generator == "tm-invert") return gen_turing(TmTask::Invert, constants, count, rng);
    if (generator == "tm-prepend-zero") return gen_turing(TmTask::PrependZero, constants, count, rng);
    if (generator == "tm-binary-decrement") return gen_turing(TmTask::Decrement, constants, count, rng);
    if (generator == "circuit-controlled-shift") return gen_circuit("controlled-shift", constants, count, rng);
    if (generator == "circuit-full-adder") return gen_circuit("full-adder", constants, count, rng);
    if (generator == "circuit-2bit-adder") return gen_circuit("2-bit-adder", constants, count, rng);
    if (generator == "mem-access") return gen_memory(MemTask::Access, constants, count, rng);
    if (generator == "mem-decrement") return gen_memory(MemTask::Decrement, constants, count, rng);
    if (generator == "mem-list-k") return gen_memory(MemTask::ListK, constants, count, rng);
    throw std::invalid_argument("unknown generator " + generator);
}

Checked<LoadedTask> load_task(const std::string& zoo_dir, const TaskSpec& spec, std::uint64_t seed,
                              const std::map<std::string, long long>& overrides) {
    Checked<LoadedTask> r;
    LoadedTask t;
    t.spec = spec;
    std::string text;
    try {
        text = read_text_file(zoo_dir + "/" + spec.model);
    } catch (const std::exception& e) {
        return fail<LoadedTask>(e.what());
    }
    auto consts = spec.constants;
    for (const auto& [k, v] : overrides) consts[k] = v;
    auto g = ir::build_graph(frontend::ModelSource{text, spec.name, consts});
    if (!g.ok()) {
        r.diagnostics = std::move(g.diagnostics);
        return r;
    }
    t.graph = std::make_shared<const ir::Graph>(std::move(*g));
    for (const auto& [k, v] : t.graph->constants) t.constants[k] = v;
    try {
        t.examples = generate_examples(spec.generator, t.constants, spec.examples, seed);
    } catch (const std::exception& e) {
        return fail<LoadedTask>("task " + spec.name + ": " + e.what());
    }
    auto io = exec::decode_examples(*t.graph, t.examples);
    if (!io.ok()) {
        r.diagnostics = std::move(io.diagnostics);
        return r;
    }
    auto ig = ir::bind_examples(t.graph, std::move(*io));
    if (!ig.ok()) {
        r.diagnostics = std::move(ig.diagnostics);
        return r;
    }
    t.instance = std::move(*ig);
    r.value = std::move(t);
    return r;
}

Checked<exec::ParamAssignment> load_reference(const std::string& zoo_dir, const TaskSpec& spec, const ir::Graph& g) {
    if (spec.reference.empty()) return fail<exec::ParamAssignment>("task " + spec.name + " has no reference program");
    json j;
    try {
        j = json::parse(read_text_file(zoo_dir + "/" + spec.reference));
    } catch (const std::exception& e) {
        return fail<exec::ParamAssignment>(e.what());
    }
    return exec::decode_assignment(g, j);
}

}  // namespace gsyn::zoo
