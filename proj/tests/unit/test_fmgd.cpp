#include <doctest.h>

#include <cmath>
#include <random>

#include "gsyn/fmgd/diff_program.hpp"
#include "gsyn/fmgd/gradcheck.hpp"
#include "gsyn/fmgd/train.hpp"
#include "random_model.hpp"
#include "testing.hpp"

using namespace gsyn;
using namespace gsyn::fmgd;
using gsyn::testing::shared_graph_of;

namespace {

DiffProgram relax_with(const std::string& src, ir::IOExamples io, std::map<std::string, long long> ov = {}) {
    auto g = shared_graph_of(src, ov);
    auto ig = ir::bind_examples(g, std::move(io));
    REQUIRE(ig.ok());
    return DiffProgram::relax(*ig);
}

std::vector<double> final_marginal(const DiffProgram& dp, const MarginalState& m, int example, int var) {
    const int s = dp.final_slot(var);
    const auto begin = m.slots[static_cast<std::size_t>(example)].begin() + dp.slot_offset(s);
    return {begin, begin + dp.slot_dim(s)};
}

// Single example assigning every output its observed value `obs`.
ir::IOExamples observe(const ir::Graph& g, std::vector<int> obs, std::vector<ir::CellValue> inputs = {}) {
    ir::IOExample ex;
    ex.inputs = std::move(inputs);
    for (std::size_t k = 0; k < g.output_ids.size(); ++k) ex.outputs.push_back({g.output_ids[k], obs[k]});
    return {ex};
}

const std::string kXorModel =
    "def xor(a, b) -> 2 over (2, 2): return (a + b) % 2\n"
    "p = Param(2)\ni = Input(2)\no = Output(2)\no.set_to(xor(p, i))\n";
const std::string kGateModel =
    "c = Param(2)\no = Output(2)\nwith c as v:\n    if v == 0:\n        o.set_to(0)\n    else:\n        o.set_to(1)\n";
const std::string kCopyModel = "p = Param(2)\no = Output(2)\no.set_to(p)\n";

ir::IOExamples observe_src(const std::string& src, std::vector<int> obs) {
    return observe(*shared_graph_of(src), std::move(obs));
}

}  // namespace

TEST_CASE("table marginal is the sum-product over tuples") {
    auto g = shared_graph_of(kXorModel);
    auto dp = relax_with(kXorModel, observe(*g, {0}, {{g->input_ids[0], 0}}));
    MarginalState m;
    dp.forward(Logits{0.0, 0.0}, &m);
    auto mu = final_marginal(dp, m, 0, g->output_ids[0]);
    CHECK(mu[0] == doctest::Approx(0.5));
    CHECK(mu[1] == doctest::Approx(0.5));
}

TEST_CASE("gate output mixes branches by the condition marginal") {
    auto dp = relax_with(kGateModel, observe_src(kGateModel, {1}));
    MarginalState m;
    dp.forward(Logits{std::log(0.3), std::log(0.7)}, &m);
    auto mu = final_marginal(dp, m, 0, dp.graph().output_ids[0]);
    CHECK(mu[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(mu[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("data loss is the negative log marginal of the observation") {
    auto dp = relax_with(kCopyModel, observe_src(kCopyModel, {1}));
    const double loss = dp.forward(Logits{std::log(0.25), std::log(0.75)});
    CHECK(loss == doctest::Approx(-std::log(0.75)).epsilon(1e-12));
    CHECK(loss == doctest::Approx(0.28768).epsilon(1e-4));
}

TEST_CASE("automaton with saturated XOR logits has near-zero loss") {
    const std::string src = gsyn::testing::zoo_source("automaton.tpt");
    auto g = shared_graph_of(src);
    ir::IOExamples io;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            auto r = exec::execute(*g, exec::ParamAssignment{{0, 1, 1, 0}}, std::vector<ir::CellValue>{{g->input_ids[0], a}, {g->input_ids[1], b}});
            io.push_back({{{g->input_ids[0], a}, {g->input_ids[1], b}}, {{g->output_ids[0], r.outputs[0]}}});
        }
    auto dp = relax_with(src, io);
    const Logits theta = dp.point_mass(exec::ParamAssignment{{0, 1, 1, 0}}, 20.0, -20.0);
    CHECK(dp.forward(theta) < 1e-6);
    double norm = 0.0;
    for (double x : dp.backward(theta)) norm += x * x;
    CHECK(std::sqrt(norm) < 1e-6);
}

TEST_CASE("uniform parity chain K=2 costs ln 2 per observation") {
    const std::string src = gsyn::testing::zoo_source("parity_chain.tpt");
    auto g = shared_graph_of(src, {{"K", 2}});
    auto dp = relax_with(src, observe(*g, {1}), {{"K", 2}});
    MarginalState m;
    CHECK(dp.forward(Logits(4, 0.0), &m) == doctest::Approx(std::log(2.0)));
    auto mu = final_marginal(dp, m, 0, g->output_ids[0]);
    CHECK(mu[0] == doctest::Approx(0.5));
}

TEST_CASE("constant model loss is zero or infinite") {
    const std::string src = "o = Output(2)\no.set_to(1)\n";
    CHECK(relax_with(src, observe_src(src, {1})).forward({}) == 0.0);
    const double bad = relax_with(src, observe_src(src, {0})).forward({});
    CHECK(std::isinf(bad));
    CHECK(bad > 0);
}

TEST_CASE("softmax cross-entropy gradient for a copied param") {
    auto dp = relax_with(kCopyModel, observe_src(kCopyModel, {1}));
    const Logits theta{0.3, -1.1};
    const auto g = dp.backward(theta);
    const double z = std::exp(0.3) + std::exp(-1.1);
    CHECK(g[0] == doctest::Approx(std::exp(0.3) / z).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(std::exp(-1.1) / z - 1.0).epsilon(1e-12));
    CHECK(check_gradient(dp, theta, 0.0).max_relative_error < 1e-6);
}

TEST_CASE("entropy bonus is stationary at uniform logits") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const std::string src = gsyn::testing::random_model_source(rng);
        auto g = shared_graph_of(src);
        auto dp = relax_with(src, gsyn::testing::planted_examples(*g, 2, rng));
        const Logits zero(static_cast<std::size_t>(dp.num_logits()), 0.0);
        const auto with = dp.backward(zero, 1.0);
        const auto without = dp.backward(zero, 0.0);
        for (std::size_t i = 0; i < with.size(); ++i) CHECK(with[i] - without[i] == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("gradients match finite differences on random gated models") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::string src = gsyn::testing::random_model_source(rng);
        CAPTURE(src);
        auto g = shared_graph_of(src);
        REQUIRE(!g->gates.empty());
        REQUIRE(g->vars.size() <= 6);
        auto dp = relax_with(src, gsyn::testing::random_examples(*g, 2, rng));
        Logits theta(static_cast<std::size_t>(dp.num_logits()));
        std::normal_distribution<double> n(0.0, 1.0);
        for (auto& t : theta) t = n(rng);
        if (!std::isfinite(dp.forward(theta))) continue;
        const double lambda = trial % 3 == 0 ? 0.1 : 0.0;
        const auto r = check_gradient(dp, theta, lambda);
        CAPTURE(r.worst_coordinate);
        CAPTURE(r.analytic);
        CAPTURE(r.numeric);
        CHECK(r.max_relative_error <= 1e-4);
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("marginals stay normalized, including inside gates") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::string src = gsyn::testing::random_model_source(rng, {8, 4, 4, 2, true});
        auto g = shared_graph_of(src);
        auto dp = relax_with(src, gsyn::testing::random_examples(*g, 2, rng));
        Logits theta(static_cast<std::size_t>(dp.num_logits()));
        std::normal_distribution<double> n(0.0, 3.0);
        for (auto& t : theta) t = n(rng);
        MarginalState m;
        dp.forward(theta, &m);
        for (const auto& slots : m.slots)
            for (int s = 0; s < dp.num_slots(); ++s) {
                double sum = 0.0;
                for (int v = 0; v < dp.slot_dim(s); ++v) {
                    const double x = slots[static_cast<std::size_t>(dp.slot_offset(s) + v)];
                    CHECK(x >= 0.0);
                    sum += x;
                }
                CHECK(std::abs(sum - 1.0) <= 1e-6);
            }
    }
}

TEST_CASE("point-mass logits reproduce the executor exactly") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::string src = gsyn::testing::random_model_source(rng, {8, 4, 4, 2, true});
        auto g = shared_graph_of(src);
        exec::ParamAssignment p = gsyn::testing::random_assignment(*g, rng);
        auto io = gsyn::testing::planted_examples(*g, 1, rng);
        auto dp = relax_with(src, io);
        MarginalState m;
        CHECK(dp.forward(dp.point_mass(p), &m) >= 0.0);
        const auto trace = exec::execute(*g, p, io[0].inputs).trace;
        for (const auto& v : g->vars) {
            if (trace.values[static_cast<std::size_t>(v.id)] < 0) continue;
            const auto mu = final_marginal(dp, m, 0, v.id);
            for (int k = 0; k < v.domain; ++k)
                CHECK(mu[static_cast<std::size_t>(k)] == (k == trace.values[static_cast<std::size_t>(v.id)] ? 1.0 : 0.0));
        }
        CHECK(dp.discretize(dp.point_mass(p)) == p);
    }
}

TEST_CASE("loss is non-negative and zero only when every observation is certain") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::string src = gsyn::testing::random_model_source(rng);
        auto g = shared_graph_of(src);
        exec::ParamAssignment hidden;
        auto io = gsyn::testing::planted_examples(*g, 2, rng, &hidden);
        auto dp = relax_with(src, io);
        Logits theta(static_cast<std::size_t>(dp.num_logits()));
        std::normal_distribution<double> n(0.0, 1.0);
        for (auto& t : theta) t = n(rng);
        CHECK(dp.forward(theta) >= 0.0);
        CHECK(dp.forward(dp.point_mass(hidden)) == 0.0);
    }
}

TEST_CASE("one-param copy model converges within 200 epochs") {
    auto dp = relax_with(kCopyModel, observe_src(kCopyModel, {1}));
    HyperParams h;
    h.optimizer = Optimizer::Plain;
    h.learning_rate = 1.0;
    h.epochs = 200;
    h.restarts = 10;
    auto run = train(dp, h);
    CHECK(run.success_fraction == 1.0);
    REQUIRE(run.best);
    CHECK(run.best->values == std::vector<int>{1});
}

TEST_CASE("training is deterministic given the seed") {
    const std::string src = gsyn::testing::zoo_source("parity_chain.tpt");
    auto g = shared_graph_of(src, {{"K", 6}});
    auto dp = relax_with(src, observe(*g, {1, 0, 1, 1, 0}), {{"K", 6}});
    HyperParams h;
    h.epochs = 100;
    h.restarts = 4;
    h.noise = 0.5;
    h.entropy_weight = 0.1;
    h.clip_norm = 1.0;
    h.seed = 42;
    auto a = train(dp, h);
    auto b = train(dp, h);
    REQUIRE(a.restarts.size() == b.restarts.size());
    for (std::size_t k = 0; k < a.restarts.size(); ++k) {
        CHECK(a.restarts[k].final_loss == b.restarts[k].final_loss);
        CHECK(a.restarts[k].program == b.restarts[k].program);
    }
    h.seed = 43;
    auto c = train(dp, h);
    bool differs = false;
    for (std::size_t k = 0; k < a.restarts.size(); ++k) differs |= a.restarts[k].final_loss != c.restarts[k].final_loss;
    CHECK(differs);
}

TEST_CASE("failing runs report Exhausted; successes are verified") {
    const std::string src = "o = Output(2)\no.set_to(1)\n";
    auto dp = relax_with(src, observe_src(src, {0}));
    HyperParams h;
    h.restarts = 3;
    h.epochs = 5;
    auto run = train(dp, h);
    CHECK(run.success_fraction == 0.0);
    for (const auto& r : run.restarts) CHECK(r.epochs == 0);
    auto res = to_synthesis_result(dp, run, h);
    CHECK(res.status == exec::Status::Exhausted);

    auto ok = relax_with(kCopyModel, observe_src(kCopyModel, {1}));
    h.epochs = 200;
    auto good = to_synthesis_result(ok, train(ok, h), h);
    CHECK(good.status == exec::Status::Success);
    CHECK(good.stats["restarts_attempted"].get<int>() == 3);
}

TEST_CASE("hyper config parsing") {
    auto cfg = parse_hyper_config(gsyn::testing::zoo_source("hypers.json"));
    REQUIRE(cfg.ok());
    CHECK(cfg->vanilla.optimizer == Optimizer::Plain);
    CHECK(std::isinf(cfg->vanilla.clip_norm));
    CHECK(cfg->vanilla.noise == 0.0);
    CHECK(cfg->vanilla.entropy_weight == 0.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        auto h = cfg->search.sample(rng, cfg->vanilla);
        CHECK(h.learning_rate >= 1e-3);
        CHECK(h.learning_rate <= 1.0);
        CHECK(h.optimizer == Optimizer::Adaptive);
    }
    auto back = hypers_from_json(to_json(cfg->vanilla));
    REQUIRE(back.ok());
    CHECK(*back == cfg->vanilla);
    CHECK_FALSE(hypers_from_json(nlohmann::json{{"learning_rate", 0}}).ok());
    CHECK_FALSE(hypers_from_json(nlohmann::json{{"epochs", 0}}).ok());
    CHECK_FALSE(hypers_from_json(nlohmann::json{{"bogus", 1}}).ok());
    CHECK_FALSE(parse_hyper_config(R"({"search": {"learning_rate": {"log_uniform": [0, 1]}}})").ok());
}

TEST_CASE("random search with a 1x1 budget is a single train call") {
    const std::string src = gsyn::testing::zoo_source("parity_chain.tpt");
    auto g = shared_graph_of(src, {{"K", 4}});
    auto dp = relax_with(src, observe(*g, {1, 0, 1}), {{"K", 4}});
    auto cfg = parse_hyper_config(gsyn::testing::zoo_source("hypers.json"));
    REQUIRE(cfg.ok());
    auto s = random_search(dp, cfg->search, 1, 1, 9, cfg->vanilla);
    REQUIRE(s.sets.size() == 1);
    CHECK(s.best == 0);
    auto again = train(dp, s.sets[0].hypers);
    CHECK(again.restarts[0].final_loss == s.sets[0].run.restarts[0].final_loss);
    CHECK(s.best_success == s.sets[0].run.success_fraction);

    auto bigger = random_search(dp, cfg->search, 6, 3, 9, cfg->vanilla);
    CHECK(bigger.average_success <= bigger.best_success);
}
