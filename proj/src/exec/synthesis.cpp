#include "gsyn/exec/synthesis.hpp"

#include <chrono>

namespace gsyn::exec {

const char* to_string(Status s) {
    switch (s) {
    case Status::Success: return "Success";
    case Status::Exhausted: return "Exhausted";
    case Status::Timeout: return "Timeout";
    case Status::SolverError: return "SolverError";
    }
    return "?";
}

std::optional<Status> status_from_string(const std::string& s) {
    for (Status st : {Status::Success, Status::Exhausted, Status::Timeout, Status::SolverError})
        if (s == to_string(st)) return st;
    return std::nullopt;
}

SynthesisResult verified_success(const InstanceGraph& ig, ParamAssignment p, SynthesisResult r) {
    try {
        if (check_consistency(*ig.base, p, ig.examples)) {
            r.status = Status::Success;
            r.program = std::move(p);
            return r;
        }
        r.message = "backend returned a program inconsistent with the examples";
    } catch (const std::invalid_argument& e) {
        r.message = std::string("backend returned an invalid assignment: ") + e.what();
    }
    r.status = Status::SolverError;
    r.program.reset();
    return r;
}

SynthesisResult enumerate(const InstanceGraph& ig, const EnumerateOptions& opts) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const Graph& g = *ig.base;
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

    SynthesisResult r;
    r.backend = "enum";
    std::vector<int> values(g.param_ids.size(), 0);
    std::vector<int> domains;
    for (int p : g.param_ids) domains.push_back(g.vars[static_cast<std::size_t>(p)].domain);

    Machine machine(g);
    std::uint64_t tested = 0;
    auto finish = [&](Status s, std::string msg) {
        r.status = s;
        r.message = std::move(msg);
        r.stats["candidates"] = tested;
        r.wall_time_s = elapsed();
        return r;
    };

    while (true) {
        if (opts.max_candidates && tested >= *opts.max_candidates)
            return finish(Status::Timeout, "candidate limit reached");
        if ((tested & 255u) == 0 && elapsed() > opts.time_limit_s)
            return finish(Status::Timeout, "time limit reached");
        ++tested;
        bool ok = true;
        for (const auto& ex : ig.examples) {
            if (!machine.matches(values, ex)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            finish(Status::Success, "");
            return verified_success(ig, ParamAssignment{values}, r);
        }
        // Odometer step, last param cell least significant.
        std::size_t i = values.size();
        while (i > 0) {
            --i;
            if (++values[i] < domains[i]) break;
            values[i] = 0;
            if (i == 0) return finish(Status::Exhausted, "no consistent program");
        }
        if (values.empty()) return finish(Status::Exhausted, "no consistent program");
    }
}

}  // namespace gsyn::exec
