#include "flowopt/ep.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace flowopt;
using namespace flowopt::testing;

TEST_SUITE_BEGIN("ep");

namespace {

std::vector<double> capacity_scales(const NetworkTopology& topo) {
    return topo.capacities();
}

} // namespace

TEST_CASE("mutations vanish as sigma goes to zero") {
    const NetworkTopology topo = paper_topology();
    const auto scales = capacity_scales(topo);
    const std::vector<double> parent(13, 20.0);
    Rng rng(1);
    CHECK(mutate_gaussian(parent, scales, 0.0, rng) == parent);
    CHECK(mutate_cauchy(parent, scales, 0.0, rng) == parent);
}

TEST_CASE("mutations are reproducible from the generator state") {
    const NetworkTopology topo = paper_topology();
    const auto scales = capacity_scales(topo);
    const std::vector<double> parent(13, 20.0);
    Rng a(7), b(7);
    CHECK(mutate_gaussian(parent, scales, 0.01, a) == mutate_gaussian(parent, scales, 0.01, b));
    CHECK(mutate_cauchy(parent, scales, 0.01, a) == mutate_cauchy(parent, scales, 0.01, b));
}

TEST_CASE("gaussian step statistics on one link") {
    const NetworkTopology topo = parse_topology("link 1 1 2 56\n");
    const std::vector<double> scales = {56.0};
    const std::vector<double> zero = {0.0};
    Rng rng(123);
    const int n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double step = mutate_gaussian(zero, scales, 0.01, rng)[0];
        sum += step;
        sum_sq += step * step;
    }
    const double mean = sum / n;
    const double stdev = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(mean) <= 0.56 * 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(stdev == doctest::Approx(0.56).epsilon(0.05));
}

TEST_CASE("cauchy tail and median statistics") {
    Rng rng(321);
    const int n = 1000000;
    int beyond_ten = 0;
    std::vector<double> magnitudes(n);
    for (int i = 0; i < n; ++i) {
        const double c = rng.cauchy();
        magnitudes[i] = std::abs(c);
        if (std::abs(c) > 10.0) ++beyond_ten;
    }
    // P(|C| > 10) = 2 atan(1/10) / pi
    const double tail = static_cast<double>(beyond_ten) / n;
    CHECK(tail == doctest::Approx(2.0 * std::atan(0.1) / std::numbers::pi).epsilon(0.032));
    CHECK(std::abs(tail - 0.0635) <= 0.002);

    std::nth_element(magnitudes.begin(), magnitudes.begin() + n / 2, magnitudes.end());
    CHECK(std::abs(magnitudes[n / 2] - 1.0) <= 0.02);
}

TEST_CASE("hybrid offspring takes the fitter of the two children") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 549.6, 1000.0);
    const auto scales = capacity_scales(topo);
    Rng rng(9);
    Rng parent_rng(10);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::vector<double> parent =
            random_feasible_flow(topo, parent_rng.uniform(100.0, 800.0), parent_rng);
        Rng replay = rng; // same stream, replayed to rebuild both children
        const ScoredFlow chosen = hybrid_offspring(parent, scales, 0.01, rng, objective);

        std::vector<double> gaussian_child = mutate_gaussian(parent, scales, 0.01, replay);
        std::vector<double> cauchy_child = mutate_cauchy(parent, scales, 0.01, replay);
        clamp_to_bounds(objective, gaussian_child);
        clamp_to_bounds(objective, cauchy_child);
        const double gf = penalized_fitness(objective, gaussian_child);
        const double cf = penalized_fitness(objective, cauchy_child);
        CHECK(chosen.fitness == doctest::Approx(std::min(gf, cf)).epsilon(1e-15));
        if (gf <= cf)
            CHECK(chosen.flow == gaussian_child); // ties go to the gaussian child
        else
            CHECK(chosen.flow == cauchy_child);
    }
}

TEST_CASE("hybrid offspring at sigma zero returns the parent") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 549.6, 1000.0);
    const auto scales = capacity_scales(topo);
    const std::vector<double> parent(13, 20.0);
    Rng rng(4);
    const ScoredFlow chosen = hybrid_offspring(parent, scales, 0.0, rng, objective);
    CHECK(chosen.flow == parent);
}

TEST_CASE("a population of identical individuals is a fixed point under vanishing sigma") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 549.6, 1000.0);
    for (EpVariant variant : {EpVariant::Gaussian, EpVariant::Cauchy, EpVariant::Hybrid}) {
        EpConfig config = EpConfig::stock(variant);
        config.population_size = 10;
        Rng rng(5);
        EpState state = ep_init(config, objective, rng);
        for (auto& parent : state.parents) parent = state.parents.front();
        const auto before = state.parents;
        config.sigma = 1e-300; // sigma must stay positive; this is an exact no-op step
        ep_step(state, config, objective, rng);
        REQUIRE(state.parents.size() == before.size());
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(state.parents[i].flow == before[i].flow);
            CHECK(state.parents[i].fitness == before[i].fitness);
        }
        CHECK(state.best_history.back() == before.front().fitness);
    }
}

TEST_CASE("vanishing sigma never changes the best fitness") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 549.6, 1000.0);
    EpConfig config = EpConfig::stock(EpVariant::Gaussian);
    config.population_size = 10;
    Rng rng(5);
    EpState state = ep_init(config, objective, rng);
    const double best = state.parents.front().fitness;
    config.sigma = 1e-300;
    for (int step = 0; step < 5; ++step) ep_step(state, config, objective, rng);
    CHECK(state.parents.front().fitness == best);
    CHECK(state.parents.front().flow == state.parents.back().flow); // duplicates fill the pool
}

TEST_CASE("best fitness never worsens across generations") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 549.6);
    for (EpVariant variant : {EpVariant::Gaussian, EpVariant::Cauchy, EpVariant::Hybrid}) {
        EpConfig config = EpConfig::stock(variant);
        config.population_size = 30;
        Rng rng(6);
        EpState state = ep_init(config, objective, rng);
        for (int gen = 0; gen < 60; ++gen) ep_step(state, config, objective, rng);
        for (std::size_t i = 1; i < state.best_history.size(); ++i)
            CHECK(state.best_history[i] <= state.best_history[i - 1] + 1e-15);
    }
}

TEST_CASE("single-link toy converges to the full budget") {
    const NetworkTopology topo = parse_topology("link 1 1 2 56\n");
    const SearchObjective objective(topo, 28.0);
    EpConfig config = EpConfig::stock(EpVariant::Hybrid);
    config.population_size = 20;
    config.termination.max_generations = 100;
    const SearchResult result = run_ep(config, objective, 3);
    CHECK(result.best_flow[0] == doctest::Approx(28.0).epsilon(1e-3));
    CHECK(result.best_delay_msec == doctest::Approx(1000.0 / 28.0).epsilon(1e-3));
}

TEST_CASE("seeded runs are identical") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 400.0);
    EpConfig config = EpConfig::stock(EpVariant::Hybrid);
    config.population_size = 25;
    const SearchResult a = run_ep(config, objective, 77);
    const SearchResult b = run_ep(config, objective, 77);
    CHECK(a.best_flow.kbps == b.best_flow.kbps);
    CHECK(a.best_delay_msec == b.best_delay_msec);
    CHECK(a.generations == b.generations);
    CHECK(a.converged == b.converged);
}

TEST_CASE("results stay strictly inside capacity and on budget") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 549.6);
    for (EpVariant variant : {EpVariant::Gaussian, EpVariant::Cauchy, EpVariant::Hybrid}) {
        const SearchResult result = run_ep(EpConfig::stock(variant), objective, 1);
        for (std::size_t i = 0; i < topo.link_count(); ++i) {
            CHECK(result.best_flow[i] >= 0.0);
            CHECK(result.best_flow[i] < topo.capacity(i));
        }
        CHECK(result.constraint_residual <= 1e-3);
    }
}

TEST_CASE("hybrid search lands near the analytic optimum across loads") {
    const NetworkTopology topo = paper_topology();
    for (double load : {275.0, 549.6, 815.0}) {
        const SearchObjective objective(topo, load);
        const double oracle = delay_msec(topo, kkt_optimal_flow(topo, load));
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const SearchResult result = run_ep(EpConfig::stock(EpVariant::Hybrid), objective, seed);
            CHECK(result.best_delay_msec <= oracle * 1.015);
        }
    }
}

TEST_CASE("gaussian and cauchy searches stay within five percent of the optimum") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 549.6);
    const double oracle = delay_msec(topo, kkt_optimal_flow(topo, 549.6));
    for (EpVariant variant : {EpVariant::Gaussian, EpVariant::Cauchy}) {
        int within = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const SearchResult result = run_ep(EpConfig::stock(variant), objective, seed);
            if (result.best_delay_msec <= oracle * 1.05) ++within;
        }
        CHECK(within >= 8);
    }
}

TEST_CASE("hybrid trials do not trail pure gaussian trials") {
    const NetworkTopology topo = paper_topology();
    const SearchObjective objective(topo, 549.6);
    const TrialSummary hybrid =
        run_trials(make_optimizer(Method::EpHybrid), objective, 10, 1);
    const TrialSummary gaussian =
        run_trials(make_optimizer(Method::EpGaussian), objective, 10, 1);
    CHECK(hybrid.mean_delay_msec <= gaussian.mean_delay_msec + 0.5);
}

TEST_CASE("stock configurations follow the experiment setup") {
    CHECK(EpConfig::stock(EpVariant::Gaussian).population_size == 150);
    CHECK(EpConfig::stock(EpVariant::Cauchy).population_size == 150);
    CHECK(EpConfig::stock(EpVariant::Hybrid).population_size == 100);
    CHECK(EpConfig::stock(EpVariant::Gaussian).sigma == doctest::Approx(0.01));
    CHECK(EpConfig::stock(EpVariant::Gaussian).termination.stagnation_window == 20);
    CHECK(EpConfig::stock(EpVariant::Gaussian).termination.delta_threshold ==
          doctest::Approx(1e-8));
}

TEST_CASE("absolute sigma mode keeps literal kbps steps") {
    const NetworkTopology topo = paper_topology();
    const std::vector<double> unit_scales(13, 1.0);
    const std::vector<double> parent(13, 20.0);
    Rng rng(8);
    const auto offspring = mutate_gaussian(parent, unit_scales, 0.01, rng);
    for (std::size_t i = 0; i < offspring.size(); ++i)
        CHECK(std::abs(offspring[i] - parent[i]) < 0.1); // steps of stdev 0.01 kbps
}

TEST_SUITE_END();
