#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsyn/diagnostics.hpp"
#include "gsyn/exec/executor.hpp"
#include "gsyn/ir/instance.hpp"

namespace gsyn::zoo {

struct TaskSpec {
    std::string name;
    std::string family;
    std::string model;      // file name relative to the zoo directory
    std::string generator;  // see generator_ids()
    std::string description;
    std::string reference;  // optional reference program, relative to the zoo directory
    std::map<std::string, long long> constants;
    int examples = 1;
    std::optional<double> log10_d;
    int timesteps = 0;
    bool stretch = false;
};

// Parses a registry ({"version": 1, "tasks": [...]}). Task order is kept.
Checked<std::vector<TaskSpec>> parse_registry(const std::string& json_text);

// Reads <zoo_dir>/tasks.json.
Checked<std::vector<TaskSpec>> list_tasks(const std::string& zoo_dir);

const TaskSpec* find_task(const std::vector<TaskSpec>& tasks, const std::string& name);

// $GSYN_ZOO if set, else the directory configured at build time.
std::string default_zoo_dir();

std::vector<std::string> generator_ids();

// Examples in the IO JSON layout ([{"inputs": {...}, "outputs": {...}}]),
// computed from the task's intended behaviour rather than from a model.
// `constants` are the model constants after overrides. Throws
// std::invalid_argument for an unknown generator or unusable sizes.
nlohmann::json generate_examples(const std::string& generator, const std::map<std::string, long long>& constants,
                                 int count, std::uint64_t seed);

struct LoadedTask {
    TaskSpec spec;
    std::map<std::string, long long> constants;  // effective values, after overrides
    std::shared_ptr<const ir::Graph> graph;
    nlohmann::json examples;
    ir::InstanceGraph instance;
};

// Compiles the task's model with its constants (plus `overrides`), generates
// `spec.examples` examples from `seed` and binds them.
Checked<LoadedTask> load_task(const std::string& zoo_dir, const TaskSpec& spec, std::uint64_t seed,
                              const std::map<std::string, long long>& overrides = {});

// The reference program of a task, decoded against `g`.
Checked<exec::ParamAssignment> load_reference(const std::string& zoo_dir, const TaskSpec& spec, const ir::Graph& g);

std::string read_text_file(const std::string& path);

}  // namespace gsyn::zoo
