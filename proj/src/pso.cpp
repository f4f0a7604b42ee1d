#include "flowopt/pso.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flowopt {

namespace {

std::size_t best_index(const std::vector<Particle>& particles) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < particles.size(); ++i)
        if (particles[i].best_fitness < particles[best].best_fitness) best = i;
    return best;
}

void append_trace(GenerationTrace* trace, const Swarm& swarm, const SearchObjective& objective) {
    if (!trace) return;
    double mean = 0.0;
    for (const Particle& p : swarm.particles) mean += p.fitness;
    mean /= static_cast<double>(swarm.particles.size());
    const auto& best = swarm.particles[swarm.global_best].best_position;
    const double total = std::accumulate(best.begin(), best.end(), 0.0);
    trace->push_back({swarm.generation, swarm.particles[swarm.global_best].best_fitness, mean,
                      std::abs(total - objective.load_kbps) / objective.load_kbps});
}

} // namespace

PsoConfig PsoConfig::stock(PsoVariant variant) {
    PsoConfig config;
    config.variant = variant;
    config.chi = variant == PsoVariant::Constriction ? 0.75 : 1.0;
    config.inertia_horizon = variant == PsoVariant::Constriction ? 120 : 100;
    return config;
}

double velocity_update(double velocity, double position, double personal_best,
                       double global_best, double w, double chi, double c1, double c2,
                       double r1, double r2) {
    return chi * (w * velocity + c1 * r1 * (personal_best - position) +
                  c2 * r2 * (global_best - position));
}

void update_velocity(Particle& particle, std::span<const double> global_best_position,
                     double w, const PsoConfig& config, Rng& rng) {
    for (std::size_t d = 0; d < particle.velocity.size(); ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        particle.velocity[d] =
            velocity_update(particle.velocity[d], particle.position[d], particle.best_position[d],
                            global_best_position[d], w, config.chi, config.c1, config.c2, r1, r2);
    }
}

void update_position(Particle& particle, const SearchObjective& objective) {
    const NetworkTopology& topo = *objective.topology;
    for (std::size_t d = 0; d < particle.position.size(); ++d) {
        const double hi = topo.capacity(d) - objective.epsilon_capacity_kbps;
        const double moved = particle.position[d] + particle.velocity[d];
        const double clamped = std::clamp(moved, 0.0, hi);
        if (clamped != moved) particle.velocity[d] = 0.0;
        particle.position[d] = clamped;
    }
}

double inertia_at(int generation, const PsoConfig& config) {
    if (generation < 0) throw std::invalid_argument("generation must be non-negative");
    const int horizon = config.inertia_horizon;
    if (generation >= horizon) return config.w_end;
    const double t = static_cast<double>(generation) / static_cast<double>(horizon);
    return config.w_start + (config.w_end - config.w_start) * t;
}

Swarm pso_init(const PsoConfig& config, const SearchObjective& objective, Rng& rng) {
    if (config.swarm_size < 2) throw std::invalid_argument("swarm size must be at least 2");
    if (config.variant == PsoVariant::Constriction && !(config.chi > 0.0 && config.chi <= 1.0))
        throw std::invalid_argument("chi must be in (0, 1]");
    if (config.w_start < config.w_end || config.w_end < 0.0)
        throw std::invalid_argument("inertia schedule requires w_start >= w_end >= 0");
    if (config.inertia_horizon < 1)
        throw std::invalid_argument("inertia horizon must be at least 1");
    config.termination.validate();

    const NetworkTopology& topo = *objective.topology;
    Swarm swarm;
    auto members = init_population(objective, config.swarm_size, rng);
    swarm.particles.reserve(members.size());
    for (auto& member : members) {
        Particle particle;
        clamp_to_bounds(objective, member);
        particle.position = std::move(member);
        particle.velocity.resize(particle.position.size());
        for (std::size_t d = 0; d < particle.velocity.size(); ++d) {
            const double span = topo.capacity(d) - objective.epsilon_capacity_kbps;
            particle.velocity[d] = rng.uniform(-config.velocity_init_frac * span,
                                               config.velocity_init_frac * span);
        }
        particle.fitness = penalized_fitness(objective, particle.position);
        particle.best_position = particle.position;
        particle.best_fitness = particle.fitness;
        swarm.particles.push_back(std::move(particle));
    }
    swarm.global_best = best_index(swarm.particles);
    swarm.best_history.push_back(swarm.particles[swarm.global_best].best_fitness);
    return swarm;
}

void pso_step(Swarm& swarm, const PsoConfig& config, const SearchObjective& objective, Rng& rng) {
    const double w = inertia_at(swarm.generation, config);
    // Snapshot so every particle sees the same attractor this generation.
    const std::vector<double> global_best_position = swarm.particles[swarm.global_best].best_position;

    for (Particle& particle : swarm.particles) {
        update_velocity(particle, global_best_position, w, config, rng);
        update_position(particle, objective);
        particle.fitness = penalized_fitness(objective, particle.position);
        if (particle.fitness < particle.best_fitness) {
            particle.best_fitness = particle.fitness;
            particle.best_position = particle.position;
        }
    }
    swarm.global_best = best_index(swarm.particles);
    swarm.generation += 1;
    swarm.best_history.push_back(swarm.particles[swarm.global_best].best_fitness);
}

SearchResult run_pso(const PsoConfig& config, const SearchObjective& objective,
                     std::uint64_t seed, GenerationTrace* trace) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(seed);
    Swarm swarm = pso_init(config, objective, rng);
    append_trace(trace, swarm, objective);

    bool converged = false;
    while (swarm.generation < config.termination.max_generations) {
        pso_step(swarm, config, objective, rng);
        append_trace(trace, swarm, objective);
        if (is_stagnant(swarm.best_history, config.termination)) {
            converged = true;
            break;
        }
    }

    SearchResult result;
    result.best_flow =
        repair_to_budget(objective, swarm.particles[swarm.global_best].best_position);
    result.best_delay_msec = delay_msec(*objective.topology, result.best_flow);
    result.generations = swarm.generation;
    result.converged = converged;
    result.constraint_residual =
        std::abs(result.best_flow.total() - objective.load_kbps) / objective.load_kbps;
    result.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace flowopt
