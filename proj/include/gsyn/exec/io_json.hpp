#pragma once

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gsyn/diagnostics.hpp"
#include "gsyn/exec/executor.hpp"

namespace gsyn::exec {

// {"model": ..., "constants": {...}, "examples": [{"inputs": {...}, "outputs": {...}}]}
// Values are integers for scalars and nested arrays (row-major) otherwise.
struct IoFile {
    std::string model;
    std::map<std::string, long long> constants;
    nlohmann::json examples = nlohmann::json::array();
};

Checked<IoFile> parse_io_file(std::string_view text);

// Resolves named values against a lowered graph.
Checked<IOExamples> decode_examples(const Graph& g, const nlohmann::json& examples);

nlohmann::json encode_examples(const Graph& g, const IOExamples& io);
std::string write_io_file(const std::string& model, const std::map<std::string, long long>& constants,
                          const Graph& g, const IOExamples& io);

// Param assignments as {"name": value or nested arrays}.
nlohmann::json encode_assignment(const Graph& g, const ParamAssignment& p);
Checked<ParamAssignment> decode_assignment(const Graph& g, const nlohmann::json& j);

}  // namespace gsyn::exec
