#pragma once

#include "flowopt/search.hpp"

#include <cstdint>
#include <vector>

namespace flowopt {

/// Global-variant swarm. Both variants apply the same update rule
///   v' = chi * (w v + c1 r1 (p - x) + c2 r2 (g - x));
/// the plain inertia variant is chi = 1, the constriction variant chi = 0.75
/// combined with the same decaying inertia schedule.
enum class PsoVariant { Inertia, Constriction };

struct PsoConfig {
    PsoVariant variant = PsoVariant::Constriction;
    int swarm_size = 300;
    double chi = 0.75;
    double w_start = 1.2;
    double w_end = 0.1;
    double c1 = 0.5;
    double c2 = 0.5;
    /// Generations over which the inertia weight decays from w_start to
    /// w_end; it holds at w_end after. Kept shorter than the termination cap:
    /// the swarm only refines steadily once the decay is underway, and a slow
    /// schedule leaves the plain variant divergent long enough for the
    /// stagnation rule to fire on a poor incumbent.
    int inertia_horizon = 120;
    /// Initial velocities are uniform in +-frac * bound per dimension; zero
    /// starts collapse the swarm onto the first incumbent before the
    /// personal bests can differentiate.
    double velocity_init_frac = 0.5;
    TerminationRule termination;

    static PsoConfig stock(PsoVariant variant);
};

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> best_position;
    double fitness = 0.0;
    double best_fitness = 0.0;
};

struct Swarm {
    std::vector<Particle> particles;
    std::size_t global_best = 0; // index into particles
    int generation = 0;
    std::vector<double> best_history; // global best fitness, index 0 = initial
};

/// One velocity component of the update rule; exposed for exact-value checks.
double velocity_update(double velocity, double position, double personal_best,
                       double global_best, double w, double chi, double c1, double c2,
                       double r1, double r2);

/// Fresh r1, r2 per dimension against a snapshot of the global best position.
void update_velocity(Particle& particle, std::span<const double> global_best_position,
                     double w, const PsoConfig& config, Rng& rng);

/// x += v componentwise, clamped into bounds; a clamped component has its
/// velocity zeroed (absorbing walls).
void update_position(Particle& particle, const SearchObjective& objective);

/// Inertia weight at a generation: linear from w_start at generation 0 to
/// w_end at inertia_horizon, held at w_end after.
double inertia_at(int generation, const PsoConfig& config);

Swarm pso_init(const PsoConfig& config, const SearchObjective& objective, Rng& rng);

/// Synchronous step: all particles move against the previous global best,
/// are re-scored, then personal and global bests update. Appends to
/// best_history.
void pso_step(Swarm& swarm, const PsoConfig& config, const SearchObjective& objective, Rng& rng);

SearchResult run_pso(const PsoConfig& config, const SearchObjective& objective,
                     std::uint64_t seed, GenerationTrace* trace = nullptr);

} // namespace flowopt
