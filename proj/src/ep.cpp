#include "flowopt/ep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flowopt {

namespace {

std::vector<double> mutation_scales(const EpConfig& config, const NetworkTopology& topology) {
    std::vector<double> scales(topology.link_count(), 1.0);
    if (config.sigma_mode == SigmaMode::Relative)
        for (std::size_t i = 0; i < scales.size(); ++i) scales[i] = topology.capacity(i);
    return scales;
}

double best_relative_residual(const EpState& state, const SearchObjective& objective) {
    const double total = std::accumulate(state.parents.front().flow.begin(),
                                         state.parents.front().flow.end(), 0.0);
    return std::abs(total - objective.load_kbps) / objective.load_kbps;
}

void append_trace(GenerationTrace* trace, const EpState& state, const SearchObjective& objective) {
    if (!trace) return;
    double mean = 0.0;
    for (const ScoredFlow& p : state.parents) mean += p.fitness;
    mean /= static_cast<double>(state.parents.size());
    trace->push_back({state.generation, state.parents.front().fitness, mean,
                      best_relative_residual(state, objective)});
}

} // namespace

EpConfig EpConfig::stock(EpVariant variant) {
    EpConfig config;
    config.variant = variant;
    config.population_size = variant == EpVariant::Hybrid ? 100 : 150;
    config.sigma = 0.01;
    config.sigma_mode = SigmaMode::Relative;
    return config;
}

std::vector<double> mutate_gaussian(std::span<const double> parent,
                                    std::span<const double> scales, double sigma, Rng& rng) {
    std::vector<double> offspring(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i)
        offspring[i] = parent[i] + sigma * scales[i] * rng.gaussian();
    return offspring;
}

std::vector<double> mutate_cauchy(std::span<const double> parent,
                                  std::span<const double> scales, double sigma, Rng& rng) {
    std::vector<double> offspring(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i)
        offspring[i] = parent[i] + sigma * scales[i] * rng.cauchy();
    return offspring;
}

ScoredFlow hybrid_offspring(std::span<const double> parent, std::span<const double> scales,
                            double sigma, Rng& rng, const SearchObjective& objective) {
    std::vector<double> gaussian_child = mutate_gaussian(parent, scales, sigma, rng);
    std::vector<double> cauchy_child = mutate_cauchy(parent, scales, sigma, rng);
    clamp_to_bounds(objective, gaussian_child);
    clamp_to_bounds(objective, cauchy_child);
    const double gaussian_fit = penalized_fitness(objective, gaussian_child);
    const double cauchy_fit = penalized_fitness(objective, cauchy_child);
    if (cauchy_fit < gaussian_fit) return {std::move(cauchy_child), cauchy_fit};
    return {std::move(gaussian_child), gaussian_fit};
}

EpState ep_init(const EpConfig& config, const SearchObjective& objective, Rng& rng) {
    if (config.population_size < 2)
        throw std::invalid_argument("EP population size must be at least 2");
    if (!(config.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    config.termination.validate();

    EpState state;
    auto members = init_population(objective, config.population_size, rng);
    state.parents.reserve(members.size());
    for (auto& member : members) {
        clamp_to_bounds(objective, member);
        const double fitness = penalized_fitness(objective, member);
        state.parents.push_back({std::move(member), fitness});
    }
    std::stable_sort(state.parents.begin(), state.parents.end(),
                     [](const ScoredFlow& a, const ScoredFlow& b) { return a.fitness < b.fitness; });
    state.best_history.push_back(state.parents.front().fitness);
    return state;
}

void ep_step(EpState& state, const EpConfig& config, const SearchObjective& objective, Rng& rng) {
    const std::vector<double> scales = mutation_scales(config, *objective.topology);

    std::vector<ScoredFlow> pool = state.parents;
    pool.reserve(state.parents.size() * 2);
    for (const ScoredFlow& parent : state.parents) {
        ScoredFlow child;
        switch (config.variant) {
            case EpVariant::Gaussian:
                child.flow = mutate_gaussian(parent.flow, scales, config.sigma, rng);
                break;
            case EpVariant::Cauchy:
                child.flow = mutate_cauchy(parent.flow, scales, config.sigma, rng);
                break;
            case EpVariant::Hybrid:
                child = hybrid_offspring(parent.flow, scales, config.sigma, rng, objective);
                break;
        }
        if (config.variant != EpVariant::Hybrid) {
            clamp_to_bounds(objective, child.flow);
            child.fitness = penalized_fitness(objective, child.flow);
        }
        pool.push_back(std::move(child));
    }

    // Elitist truncation; stable sort gives a total order (fitness, then
    // original position with parents first) independent of evaluation order.
    std::stable_sort(pool.begin(), pool.end(),
                     [](const ScoredFlow& a, const ScoredFlow& b) { return a.fitness < b.fitness; });
    pool.resize(state.parents.size());
    state.parents = std::move(pool);
    state.generation += 1;
    state.best_history.push_back(state.parents.front().fitness);
}

SearchResult run_ep(const EpConfig& config, const SearchObjective& objective,
                    std::uint64_t seed, GenerationTrace* trace) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(seed);
    EpState state = ep_init(config, objective, rng);
    append_trace(trace, state, objective);

    bool converged = false;
    while (state.generation < config.termination.max_generations) {
        ep_step(state, config, objective, rng);
        append_trace(trace, state, objective);
        if (is_stagnant(state.best_history, config.termination)) {
            converged = true;
            break;
        }
    }

    SearchResult result;
    result.best_flow = repair_to_budget(objective, state.parents.front().flow);
    result.best_delay_msec = delay_msec(*objective.topology, result.best_flow);
    result.generations = state.generation;
    result.converged = converged;
    result.constraint_residual =
        std::abs(result.best_flow.total() - objective.load_kbps) / objective.load_kbps;
    result.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace flowopt
