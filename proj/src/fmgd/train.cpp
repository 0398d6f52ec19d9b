#include "gsyn/fmgd/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace gsyn::fmgd {

using nlohmann::json;

namespace {

using clock_type = std::chrono::steady_clock;

json number_or_inf(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

std::optional<double> read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    return std::nullopt;
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

json to_json(const HyperParams& h) {
    return json{{"learning_rate", h.learning_rate},
                {"optimizer", h.optimizer == Optimizer::Plain ? "plain" : "adaptive"},
                {"init_scale", h.init_scale},
                {"clip_norm", number_or_inf(h.clip_norm)},
                {"noise", h.noise},
                {"entropy_weight", h.entropy_weight},
                {"entropy_half_life", number_or_inf(h.entropy_half_life)},
                {"epochs", h.epochs},
                {"restarts", h.restarts},
                {"seed", h.seed}};
}

Checked<HyperParams> hypers_from_json(const json& j, HyperParams h) {
    Checked<HyperParams> r;
    auto fail = [&](const std::string& msg) {
        r.diagnostics.push_back(make_error({}, "hypers", msg));
        return r;
    };
    if (!j.is_object()) return fail("hyperparameters must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "optimizer") {
            if (value == "plain")
                h.optimizer = Optimizer::Plain;
            else if (value == "adaptive")
                h.optimizer = Optimizer::Adaptive;
            else
                return fail("optimizer must be \"plain\" or \"adaptive\"");
            continue;
        }
        if (key == "epochs" || key == "restarts" || key == "seed") {
            if (!value.is_number_integer() || value.get<long long>() < 0)
                return fail(key + " must be a non-negative integer");
            if (key == "epochs") h.epochs = value.get<int>();
            if (key == "restarts") h.restarts = value.get<int>();
            if (key == "seed") h.seed = value.get<std::uint64_t>();
            continue;
        }
        auto v = read_number(value);
        if (!v) return fail(key + " must be a number");
        if (key == "learning_rate")
            h.learning_rate = *v;
        else if (key == "init_scale")
            h.init_scale = *v;
        else if (key == "clip_norm")
            h.clip_norm = *v;
        else if (key == "noise")
            h.noise = *v;
        else if (key == "entropy_weight")
            h.entropy_weight = *v;
        else if (key == "entropy_half_life")
            h.entropy_half_life = *v;
        else
            return fail("unknown hyperparameter '" + key + "'");
    }
    if (!(h.learning_rate > 0)) return fail("learning_rate must be > 0");
    if (h.epochs < 1) return fail("epochs must be >= 1");
    if (h.restarts < 1) return fail("restarts must be >= 1");
    if (!(h.clip_norm > 0)) return fail("clip_norm must be > 0");
    if (h.init_scale < 0 || h.noise < 0 || h.entropy_weight < 0) return fail("scales must be non-negative");
    r.value = h;
    return r;
}

RestartResult train_restart(const DiffProgram& dp, const HyperParams& h, std::mt19937_64& rng,
                            const TrainLimits& limits) {
    const auto start = clock_type::now();
    const std::size_t n = static_cast<std::size_t>(dp.num_logits());
    Logits theta(n);
    std::normal_distribution<double> init(0.0, h.init_scale);
    for (auto& t : theta) t = h.init_scale > 0 ? init(rng) : 0.0;

    RestartResult r;
    auto finish = [&] {
        const auto ev = dp.evaluate(theta, 0.0, false);
        r.final_loss = ev.data_loss;
        r.program = dp.discretize(theta);
        r.success = exec::check_consistency(dp.graph(), r.program, dp.instance().examples);
        return r;
    };
    if (!std::isfinite(dp.evaluate(theta, h.entropy_weight, false).loss)) {
        r.final_loss = std::numeric_limits<double>::infinity();
        r.program = dp.discretize(theta);
        return r;
    }

    std::vector<double> accum(n, 0.0);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < h.epochs; ++t) {
        if ((t & 15) == 0 && std::chrono::duration<double>(clock_type::now() - start).count() > limits.time_limit_s)
            break;
        const double lambda = h.entropy_half_life > 0
                                  ? h.entropy_weight * std::exp2(-static_cast<double>(t) / h.entropy_half_life)
                                  : h.entropy_weight;
        auto ev = dp.evaluate(theta, lambda, true);
        if (!std::isfinite(ev.loss)) break;
        auto& g = ev.gradient;
        if (h.noise > 0) {
            const double sd = h.noise / std::pow(1.0 + t, 0.55);
            for (auto& x : g) x += sd * unit(rng);
        }
        double norm = 0.0;
        for (double x : g) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > h.clip_norm)
            for (auto& x : g) x *= h.clip_norm / norm;
        if (h.optimizer == Optimizer::Plain) {
            for (std::size_t i = 0; i < n; ++i) theta[i] -= h.learning_rate * g[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                accum[i] = 0.9 * accum[i] + 0.1 * g[i] * g[i];
                theta[i] -= h.learning_rate * g[i] / (std::sqrt(accum[i]) + 1e-8);
            }
        }
        r.epochs = t + 1;
    }
    return finish();
}

FmgdRunResult train(const DiffProgram& dp, const HyperParams& h, const TrainLimits& limits) {
    const auto start = clock_type::now();
    FmgdRunResult run;
    int successes = 0;
    double loss_sum = 0.0;
    for (int k = 0; k < h.restarts; ++k) {
        const double used = std::chrono::duration<double>(clock_type::now() - start).count();
        if (used > limits.time_limit_s) {
            run.timed_out = true;
            break;
        }
        auto rng = derived_rng(h.seed, static_cast<std::uint64_t>(k));
        auto r = train_restart(dp, h, rng, TrainLimits{limits.time_limit_s - used});
        if (r.epochs < h.epochs && std::chrono::duration<double>(clock_type::now() - start).count() > limits.time_limit_s)
            run.timed_out = true;
        successes += r.success;
        loss_sum += r.final_loss;
        if (r.success && !run.best) run.best = r.program;
        run.restarts.push_back(std::move(r));
    }
    const double attempted = static_cast<double>(run.restarts.size());
    run.success_fraction = attempted > 0 ? successes / static_cast<double>(h.restarts) : 0.0;
    run.mean_final_loss = attempted > 0 ? loss_sum / attempted : std::numeric_limits<double>::infinity();
    run.wall_time_s = std::chrono::duration<double>(clock_type::now() - start).count();
    return run;
}

exec::SynthesisResult to_synthesis_result(const DiffProgram& dp, const FmgdRunResult& run, const HyperParams& h) {
    exec::SynthesisResult r;
    r.backend = "fmgd";
    r.wall_time_s = run.wall_time_s;
    int successes = 0;
    for (const auto& x : run.restarts) successes += x.success;
    r.stats["restarts_attempted"] = run.restarts.size();
    r.stats["successes"] = successes;
    r.stats["success_fraction"] = run.success_fraction;
    r.stats["mean_final_loss"] = std::isfinite(run.mean_final_loss) ? json(run.mean_final_loss) : json("inf");
    r.stats["hypers"] = to_json(h);
    if (run.best) return exec::verified_success(dp.instance(), *run.best, r);
    r.status = run.timed_out ? exec::Status::Timeout : exec::Status::Exhausted;
    r.message = run.timed_out ? "time limit reached" : "no restart produced a consistent program";
    return r;
}

HyperParams HyperDistribution::sample(std::mt19937_64& rng, const HyperParams& base) const {
    json concrete = json::object();
    for (const auto& [key, value] : spec.items()) {
        if (value.is_object() && value.contains("choice")) {
            const auto& c = value["choice"];
            concrete[key] = c[std::uniform_int_distribution<std::size_t>(0, c.size() - 1)(rng)];
        } else if (value.is_object() && value.contains("uniform")) {
            const double lo = value["uniform"][0].get<double>(), hi = value["uniform"][1].get<double>();
            concrete[key] = std::uniform_real_distribution<double>(lo, hi)(rng);
        } else if (value.is_object() && value.contains("log_uniform")) {
            const double lo = std::log(value["log_uniform"][0].get<double>());
            const double hi = std::log(value["log_uniform"][1].get<double>());
            concrete[key] = std::exp(std::uniform_real_distribution<double>(lo, hi)(rng));
        } else {
            concrete[key] = value;
        }
    }
    auto h = hypers_from_json(concrete, base);
    return h.ok() ? *h : base;
}

Checked<HyperDistribution> distribution_from_json(const json& j) {
    Checked<HyperDistribution> r;
    auto fail = [&](const std::string& msg) {
        r.diagnostics.push_back(make_error({}, "hypers", msg));
        return r;
    };
    if (!j.is_object()) return fail("search distribution must be an object");
    // Validate by checking that every extreme of every dimension parses.
    for (const auto& [key, value] : j.items()) {
        std::vector<json> candidates;
        if (value.is_object() && value.contains("choice") && value["choice"].is_array() && !value["choice"].empty())
            candidates.assign(value["choice"].begin(), value["choice"].end());
        else if (value.is_object() && (value.contains("uniform") || value.contains("log_uniform"))) {
            const auto& range = value.contains("uniform") ? value["uniform"] : value["log_uniform"];
            if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number())
                return fail(key + ": range must be [lo, hi]");
            if (value.contains("log_uniform") && !(range[0].get<double>() > 0)) return fail(key + ": log_uniform needs lo > 0");
            candidates = {range[0], range[1]};
        } else if (value.is_object())
            return fail(key + ": expected choice, uniform or log_uniform");
        else
            candidates = {value};
        for (const auto& c : candidates) {
            auto h = hypers_from_json(json{{key, c}});
            if (!h.ok()) {
                r.diagnostics = h.diagnostics;
                return r;
            }
        }
    }
    r.value = HyperDistribution{j};
    return r;
}

Checked<HyperConfig> parse_hyper_config(const std::string& text) {
    Checked<HyperConfig> r;
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        r.diagnostics.push_back(make_error({}, "hypers", "hyper config is not a JSON object"));
        return r;
    }
    HyperConfig cfg;
    if (j.contains("vanilla")) {
        auto v = hypers_from_json(j["vanilla"]);
        if (!v.ok()) {
            r.diagnostics = v.diagnostics;
            return r;
        }
        cfg.vanilla = *v;
    }
    if (j.contains("search")) {
        auto d = distribution_from_json(j["search"]);
        if (!d.ok()) {
            r.diagnostics = d.diagnostics;
            return r;
        }
        cfg.search = *d;
    }
    r.value = cfg;
    return r;
}

SearchResult random_search(const DiffProgram& dp, const HyperDistribution& dist, int sets, int restarts,
                           std::uint64_t seed, const HyperParams& base, const TrainLimits& limits) {
    const auto start = clock_type::now();
    SearchResult result;
    int total = 0, successes = 0;
    for (int k = 0; k < sets; ++k) {
        const double used = std::chrono::duration<double>(clock_type::now() - start).count();
        if (used > limits.time_limit_s) break;
        auto rng = derived_rng(seed, 0x5eedULL + static_cast<std::uint64_t>(k));
        HyperParams h = dist.sample(rng, base);
        h.restarts = restarts;
        h.seed = rng();
        auto run = train(dp, h, TrainLimits{limits.time_limit_s - used});
        for (const auto& r : run.restarts) {
            ++total;
            successes += r.success;
        }
        const bool better = result.best < 0 || run.success_fraction > result.best_success ||
                            (run.success_fraction == result.best_success &&
                             run.mean_final_loss < result.sets[static_cast<std::size_t>(result.best)].run.mean_final_loss);
        if (better) {
            result.best = k;
            result.best_success = run.success_fraction;
        }
        result.sets.push_back({h, std::move(run)});
    }
    result.average_success = total > 0 ? static_cast<double>(successes) / total : 0.0;
    return result;
}

}  // namespace gsyn::fmgd
