#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsyn/diagnostics.hpp"
#include "gsyn/exec/synthesis.hpp"
#include "gsyn/fmgd/diff_program.hpp"

namespace gsyn::fmgd {

enum class Optimizer { Plain, Adaptive };

struct HyperParams {
    double learning_rate = 0.1;
    Optimizer optimizer = Optimizer::Adaptive;
    double init_scale = 1.0;
    double clip_norm = std::numeric_limits<double>::infinity();
    double noise = 0.0;           // eta; std at epoch t is eta / (1 + t)^0.55
    double entropy_weight = 0.0;  // lambda
    double entropy_half_life = 200.0;
    int epochs = 1000;
    int restarts = 20;
    std::uint64_t seed = 0;

    bool operator==(const HyperParams&) const = default;
};

nlohmann::json to_json(const HyperParams& h);
Checked<HyperParams> hypers_from_json(const nlohmann::json& j, HyperParams defaults = {});

struct RestartResult {
    double final_loss = 0.0;  // data loss at the final logits
    bool success = false;
    int epochs = 0;
    exec::ParamAssignment program;
};

struct FmgdRunResult {
    std::vector<RestartResult> restarts;
    double success_fraction = 0.0;
    double mean_final_loss = 0.0;
    double wall_time_s = 0.0;
    bool timed_out = false;
    std::optional<exec::ParamAssignment> best;  // first successful restart
};

struct TrainLimits {
    double time_limit_s = std::numeric_limits<double>::infinity();
};

// Runs h.restarts independent restarts. Restart r draws from a generator
// seeded with (h.seed, r), so results do not depend on execution order.
FmgdRunResult train(const DiffProgram& dp, const HyperParams& h, const TrainLimits& limits = {});

// One restart with explicit RNG; exposed for tests.
RestartResult train_restart(const DiffProgram& dp, const HyperParams& h, std::mt19937_64& rng,
                            const TrainLimits& limits = {});

// Wraps a run as a SynthesisResult (Success only if a restart verified).
exec::SynthesisResult to_synthesis_result(const DiffProgram& dp, const FmgdRunResult& run,
                                          const HyperParams& h);

// One dimension of a hyper distribution: a constant, {"choice": [...]},
// {"uniform": [lo, hi]} or {"log_uniform": [lo, hi]}. "inf" denotes infinity.
struct HyperDistribution {
    nlohmann::json spec = nlohmann::json::object();
    HyperParams sample(std::mt19937_64& rng, const HyperParams& base) const;
};

Checked<HyperDistribution> distribution_from_json(const nlohmann::json& j);

struct HyperConfig {
    HyperParams vanilla;
    HyperDistribution search;
};

// {"vanilla": {...}, "search": {...}}
Checked<HyperConfig> parse_hyper_config(const std::string& text);

struct SearchSetResult {
    HyperParams hypers;
    FmgdRunResult run;
};

struct SearchResult {
    std::vector<SearchSetResult> sets;
    int best = -1;
    double best_success = 0.0;
    double average_success = 0.0;  // mean over every restart of every set
};

SearchResult random_search(const DiffProgram& dp, const HyperDistribution& dist, int sets, int restarts,
                           std::uint64_t seed, const HyperParams& base = {}, const TrainLimits& limits = {});

}  // namespace gsyn::fmgd
