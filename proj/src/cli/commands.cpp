#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "gsyn/cli/cli.hpp"
#include "gsyn/exec/io_json.hpp"
#include "gsyn/exec/synthesis.hpp"
#include "gsyn/fmgd/train.hpp"
#include "gsyn/ilp/ilp.hpp"
#include "gsyn/ir/pipeline.hpp"
#include "gsyn/smt/smt.hpp"
#include "gsyn/zoo/zoo.hpp"

namespace gsyn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

struct Options {
    std::string model, task, io, backend = "enum", hypers, solver_path, out, zoo, format, records;
    std::string ilp_format = "name-value";
    std::vector<std::string> consts, solver_args;
    double timeout = 300.0;
    std::uint64_t seed = 0;
    std::optional<int> restarts, epochs, count;
    int search_sets = 0;
};

// A compiled model plus (optionally) its bound examples.
struct Problem {
    std::string name;
    std::string model_ref;  // model path as given, written into generated IO files
    std::optional<zoo::TaskSpec> spec;
    std::shared_ptr<const ir::Graph> graph;
    std::map<std::string, long long> constants;
    json examples;
    std::optional<ir::InstanceGraph> instance;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string zoo_dir(const Options& o) { return o.zoo.empty() ? zoo::default_zoo_dir() : o.zoo; }

std::map<std::string, long long> parse_consts(const std::vector<std::string>& items) {
    std::map<std::string, long long> out;
    for (const auto& s : items) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--const expects NAME=INT, got '" + s + "'");
        const std::string value = s.substr(eq + 1);
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size()) throw UsageError("--const value must be an integer: '" + s + "'");
        out[s.substr(0, eq)] = v;
    }
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

const zoo::TaskSpec& require_task(const std::string& dir, const std::string& name,
                                  std::vector<zoo::TaskSpec>& storage) {
    auto tasks = zoo::list_tasks(dir);
    if (!tasks.ok()) throw UsageError(format_diagnostics(tasks.diagnostics, dir + "/tasks.json"));
    storage = std::move(*tasks);
    const auto* t = zoo::find_task(storage, name);
    if (!t) throw UsageError("unknown task '" + name + "' (see `gsyn tasks`)");
    return *t;
}

// Returns kOk, or kUsage after printing what went wrong.
int load_problem(const Options& o, bool need_examples, Problem& p, std::ostream& err) {
    const std::string dir = zoo_dir(o);
    std::string model_path;
    std::map<std::string, long long> consts;
    std::vector<zoo::TaskSpec> storage;
    if (!o.task.empty()) {
        p.spec = require_task(dir, o.task, storage);
        p.name = p.spec->name;
        p.model_ref = p.spec->model;
        model_path = dir + "/" + p.spec->model;
        consts = p.spec->constants;
    }
    std::optional<exec::IoFile> io;
    if (!o.io.empty()) {
        std::string text;
        try {
            text = zoo::read_text_file(o.io);
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return kUsage;
        }
        auto parsed = exec::parse_io_file(text);
        if (!parsed.ok()) {
            err << format_diagnostics(parsed.diagnostics, o.io);
            return kUsage;
        }
        io = std::move(*parsed);
        for (const auto& [k, v] : io->constants) consts[k] = v;
        if (model_path.empty() && o.model.empty() && !io->model.empty()) {
            // Relative model paths are looked up next to the IO file, then in the zoo.
            fs::path m(io->model);
            if (m.is_relative()) {
                const fs::path beside = fs::path(o.io).parent_path() / m;
                m = fs::exists(beside) ? beside : fs::path(dir) / m;
            }
            model_path = m.string();
            p.model_ref = io->model;
        }
    }
    if (!o.model.empty()) {
        model_path = o.model;
        p.model_ref = o.model;
    }
    if (model_path.empty()) {
        err << "no model: pass --model, --task, or an IO file naming a model\n";
        return kUsage;
    }
    if (p.name.empty()) p.name = fs::path(model_path).stem().string();
    for (const auto& [k, v] : parse_consts(o.consts)) consts[k] = v;

    std::string text;
    try {
        text = zoo::read_text_file(model_path);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kUsage;
    }
    auto g = ir::build_graph(frontend::ModelSource{text, p.name, consts});
    if (!g.ok()) {
        err << format_diagnostics(g.diagnostics, model_path);
        return kUsage;
    }
    p.graph = std::make_shared<const ir::Graph>(std::move(*g));
    for (const auto& [k, v] : p.graph->constants) p.constants[k] = v;

    if (io) {
        p.examples = io->examples;
    } else if (p.spec) {
        try {
            p.examples = zoo::generate_examples(p.spec->generator, p.constants, o.count.value_or(p.spec->examples),
                                                o.seed);
        } catch (const std::exception& e) {
            err << "cannot generate examples for " << p.name << ": " << e.what() << '\n';
            return kUsage;
        }
    } else if (need_examples) {
        err << "no examples: pass --io or --task\n";
        return kUsage;
    } else {
        return kOk;
    }
    auto decoded = exec::decode_examples(*p.graph, p.examples);
    if (!decoded.ok()) {
        err << format_diagnostics(decoded.diagnostics, o.io.empty() ? p.name : o.io);
        return kUsage;
    }
    auto ig = ir::bind_examples(p.graph, std::move(*decoded));
    if (!ig.ok()) {
        err << format_diagnostics(ig.diagnostics, p.name);
        return kUsage;
    }
    p.instance = std::move(*ig);
    return kOk;
}

fmgd::HyperConfig hyper_config(const Options& o) {
    std::string path = o.hypers;
    if (path.empty()) {
        const std::string fallback = zoo_dir(o) + "/hypers.json";
        if (!fs::exists(fallback)) return {};
        path = fallback;
    }
    std::string text;
    try {
        text = zoo::read_text_file(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    auto cfg = fmgd::parse_hyper_config(text);
    if (!cfg.ok()) throw UsageError(format_diagnostics(cfg.diagnostics, path));
    return *cfg;
}

SolverConfig solver_config(const Options& o, const char* env) {
    SolverConfig cfg;
    cfg.executable = o.solver_path.empty() ? env_or_empty(env) : o.solver_path;
    cfg.args = o.solver_args;
    cfg.timeout_s = o.timeout;
    return cfg;
}

exec::SynthesisResult run_fmgd(const Options& o, const ir::InstanceGraph& ig) {
    auto cfg = hyper_config(o);
    fmgd::HyperParams h = cfg.vanilla;
    if (o.restarts) h.restarts = *o.restarts;
    if (o.epochs) h.epochs = *o.epochs;
    h.seed = o.seed;
    const auto start = std::chrono::steady_clock::now();
    const auto dp = fmgd::DiffProgram::relax(ig);
    fmgd::TrainLimits limits{o.timeout};
    if (o.search_sets <= 0) {
        auto run = fmgd::train(dp, h, limits);
        auto r = fmgd::to_synthesis_result(dp, run, h);
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    }
    auto search = fmgd::random_search(dp, cfg.search, o.search_sets, h.restarts, o.seed, h, limits);
    const auto& best = search.sets[static_cast<std::size_t>(std::max(search.best, 0))];
    auto r = fmgd::to_synthesis_result(dp, best.run, best.hypers);
    r.stats["search_sets"] = search.sets.size();
    r.stats["search_best_set"] = search.best;
    r.stats["search_average_success"] = search.average_success;
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
    static const std::vector<std::string> backends{"fmgd", "smt", "ilp", "enum"};
    if (std::find(backends.begin(), backends.end(), o.backend) == backends.end())
        throw UsageError("unknown backend '" + o.backend + "' (fmgd, smt, ilp, enum)");
    if (o.ilp_format != "name-value" && o.ilp_format != "cbc")
        throw UsageError("--ilp-format must be name-value or cbc");
    Problem p;
    if (int rc = load_problem(o, true, p, err)) return rc;
    const auto& ig = *p.instance;

    exec::SynthesisResult r;
    if (o.backend == "enum") {
        exec::EnumerateOptions eo;
        eo.time_limit_s = o.timeout;
        r = exec::enumerate(ig, eo);
    } else if (o.backend == "smt") {
        r = smt::synthesize(ig, solver_config(o, "GSYN_SMT_SOLVER"));
    } else if (o.backend == "ilp") {
        ilp::IlpSolverConfig cfg{solver_config(o, "GSYN_ILP_SOLVER"),
                                 o.ilp_format == "cbc" ? ilp::SolutionFormat::Cbc : ilp::SolutionFormat::NameValue};
        r = ilp::synthesize(ig, cfg);
    } else {
        r = run_fmgd(o, ig);
    }

    RunRecord rec;
    rec.task = p.name;
    rec.backend = o.backend;
    rec.status = exec::to_string(r.status);
    rec.message = r.message;
    rec.wall_time_s = r.wall_time_s;
    rec.stats = r.stats;
    rec.stats["examples"] = ig.num_examples();
    rec.stats["log10_d"] = ir::param_space_size(*p.graph).log10;
    rec.seed = o.seed;
    rec.timestamp = utc_timestamp();
    if (r.success()) rec.program = exec::encode_assignment(*p.graph, *r.program);

    err << p.name << " [" << o.backend << "]: " << rec.status;
    if (!r.message.empty()) err << " (" << r.message << ")";
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3f", r.wall_time_s);
    err << ", " << secs << " s\n";
    if (r.success()) out << exec::render_program(*p.graph, *r.program);
    if (!o.out.empty()) {
        if (auto e = append_record(o.out, rec); !e.empty()) err << e << '\n';
    } else {
        err << "record: " << to_json(rec).dump() << '\n';
    }
    return r.success() ? kOk : kFailed;
}

int write_artifact(const Options& o, const std::string& text, std::ostream& out, std::ostream& err) {
    if (o.out.empty()) {
        out << text;
        return kOk;
    }
    std::ofstream f(o.out, std::ios::binary);
    f << text;
    f.close();
    if (!f) {
        err << "cannot write " << o.out << '\n';
        return kUsage;
    }
    out << o.out << '\n';
    return kOk;
}

int cmd_export(const Options& o, std::ostream& out, std::ostream& err) {
    static const std::vector<std::string> formats{"smt2", "lp", "lp-relaxed", "ir"};
    if (std::find(formats.begin(), formats.end(), o.format) == formats.end())
        throw UsageError("--format must be one of smt2, lp, lp-relaxed, ir");
    Problem p;
    if (int rc = load_problem(o, o.format != "ir", p, err)) return rc;
    std::string text;
    if (o.format == "ir") text = ir::dump(*p.graph);
    else if (o.format == "smt2") text = smt::emit_smtlib(*p.instance).text;
    else
        text = ilp::write_lp_file(
            ilp::emit_ilp(*p.instance, o.format == "lp" ? ilp::Mode::Integral : ilp::Mode::Relaxed));
    return write_artifact(o, text, out, err);
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.task.empty()) throw UsageError("gen needs --task");
    Options opts = o;
    opts.io.clear();
    Problem p;
    if (int rc = load_problem(opts, true, p, err)) return rc;
    json j;
    j["model"] = p.model_ref;
    j["constants"] = p.constants;
    j["examples"] = p.examples;
    return write_artifact(o, j.dump(1) + "\n", out, err);
}

int cmd_tasks(const Options& o, std::ostream& out) {
    auto tasks = zoo::list_tasks(zoo_dir(o));
    if (!tasks.ok()) throw UsageError(format_diagnostics(tasks.diagnostics, zoo_dir(o) + "/tasks.json"));
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-18s %-12s %8s %4s %4s  %s\n", "task", "family", "log10(D)", "T", "N", "model");
    os << buf;
    for (const auto& t : *tasks) {
        std::string d = t.log10_d ? std::to_string(static_cast<long long>(*t.log10_d + 0.5)) : "?";
        if (t.log10_d && *t.log10_d != static_cast<long long>(*t.log10_d)) {
            std::snprintf(buf, sizeof buf, "%.1f", *t.log10_d);
            d = buf;
        }
        std::snprintf(buf, sizeof buf, "%-18s %-12s %8s %4d %4d  %s%s\n", t.name.c_str(), t.family.c_str(),
                      d.c_str(), t.timesteps, t.examples, t.model.c_str(), t.stretch ? "  (stretch)" : "");
        os << buf;
    }
    out << os.str();
    return kOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = zoo::read_text_file(o.records);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kUsage;
    }
    std::vector<std::string> warnings;
    auto records = read_records(text, warnings);
    for (const auto& w : warnings) err << "warning: " << o.records << ": " << w << '\n';
    out << render_report(records);
    return kOk;
}

void add_source_options(CLI::App* app, Options& o) {
    app->add_option("--model", o.model, "Model file (.tpt)");
    app->add_option("--task", o.task, "Zoo task name");
    app->add_option("--io", o.io, "IO examples file (JSON)");
    app->add_option("--const", o.consts, "Constant override NAME=INT (repeatable)");
    app->add_option("--seed", o.seed, "Seed for generated examples and FMGD");
    app->add_option("--zoo", o.zoo, "Zoo directory (default: $GSYN_ZOO or the built-in zoo)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"gsyn: program synthesis from input-output examples"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    auto* synth = app.add_subcommand("synth", "Synthesize a program with one backend");
    add_source_options(synth, o);
    synth->add_option("--backend", o.backend, "fmgd, smt, ilp or enum")->capture_default_str();
    synth->add_option("--timeout", o.timeout, "Wall-clock limit in seconds")->capture_default_str();
    synth->add_option("--restarts", o.restarts, "FMGD random restarts");
    synth->add_option("--epochs", o.epochs, "FMGD epochs per restart");
    synth->add_option("--hypers", o.hypers, "FMGD hyperparameter file (default: <zoo>/hypers.json)");
    synth->add_option("--search", o.search_sets, "FMGD random hyperparameter search over N sets");
    synth->add_option("--solver-path", o.solver_path,
                      "External solver (default: $GSYN_SMT_SOLVER or $GSYN_ILP_SOLVER)");
    synth->add_option("--solver-arg", o.solver_args, "Extra solver argument (repeatable)");
    synth->add_option("--ilp-format", o.ilp_format, "ILP solution format: name-value or cbc")->capture_default_str();
    synth->add_option("--out", o.out, "Append the run record to this file");
    synth->add_option("--count", o.count, "Number of generated examples (default: the task's N)");

    auto* exp = app.add_subcommand("export", "Write an encoding of a model instance");
    add_source_options(exp, o);
    exp->add_option("--format", o.format, "smt2, lp, lp-relaxed or ir")->required();
    exp->add_option("--out", o.out, "Output file (default: stdout)");
    exp->add_option("--count", o.count, "Number of generated examples (default: the task's N)");

    auto* gen = app.add_subcommand("gen", "Generate an IO examples file for a task");
    add_source_options(gen, o);
    gen->add_option("--count", o.count, "Number of examples (default: the task's N)");
    gen->add_option("--out", o.out, "Output file (default: stdout)");

    auto* tasks = app.add_subcommand("tasks", "List the zoo tasks");
    tasks->add_option("--zoo", o.zoo, "Zoo directory");

    auto* report = app.add_subcommand("report", "Summarize run records as a task x backend grid");
    report->add_option("records", o.records, "Records file (JSON lines)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        for (auto* sub : app.get_subcommands())
            if (sub->parsed()) {
                err << "run `gsyn " << sub->get_name() << " --help` for usage\n";
                return kUsage;
            }
        err << "run `gsyn --help` for usage\n";
        return kUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(o, out, err);
        if (exp->parsed()) return cmd_export(o, out, err);
        if (gen->parsed()) return cmd_gen(o, out, err);
        if (tasks->parsed()) return cmd_tasks(o, out);
        if (report->parsed()) return cmd_report(o, out, err);
    } catch (const UsageError& e) {
        err << e.what();
        if (std::string(e.what()).back() != '\n') err << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailed;
    }
    return kUsage;
}

}  // namespace gsyn::cli
