#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "gsyn/exec/executor.hpp"

namespace gsyn::exec {

enum class Status { Success, Exhausted, Timeout, SolverError };

const char* to_string(Status s);
std::optional<Status> status_from_string(const std::string& s);

struct SynthesisResult {
    Status status = Status::SolverError;
    std::optional<ParamAssignment> program;
    double wall_time_s = 0.0;
    std::string backend;
    std::string message;
    nlohmann::json stats = nlohmann::json::object();

    bool success() const { return status == Status::Success; }
};

// Builds a Success result after re-checking the program against every
// example. An inconsistent program turns into SolverError.
SynthesisResult verified_success(const InstanceGraph& ig, ParamAssignment p, SynthesisResult r);

struct EnumerateOptions {
    std::optional<std::uint64_t> max_candidates;
    double time_limit_s = 300.0;
};

// Lexicographic sweep over Param values, first param cell most significant.
// A candidate limit reached before the space is exhausted reports Timeout.
SynthesisResult enumerate(const InstanceGraph& ig, const EnumerateOptions& opts = {});

}  // namespace gsyn::exec
