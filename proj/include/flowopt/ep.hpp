#pragma once

#include "flowopt/search.hpp"

#include <cstdint>
#include <vector>

namespace flowopt {

enum class EpVariant { Gaussian, Cauchy, Hybrid };

/// How the per-component mutation step is scaled: Relative multiplies sigma by
/// the link capacity (step stdev = sigma * C_i), Absolute uses sigma in kbps
/// directly. Relative is the stock mode; literal kbps steps are too small to
/// traverse the search space at realistic budgets.
enum class SigmaMode { Relative, Absolute };

struct EpConfig {
    EpVariant variant = EpVariant::Hybrid;
    int population_size = 100;
    double sigma = 0.01;
    SigmaMode sigma_mode = SigmaMode::Relative;
    TerminationRule termination;

    /// Stock configuration: population 150 for Gaussian and Cauchy, 100 for
    /// Hybrid (each hybrid parent breeds two candidate offspring), sigma 0.01.
    static EpConfig stock(EpVariant variant);
};

struct ScoredFlow {
    std::vector<double> flow;
    double fitness = 0.0;
};

struct EpState {
    std::vector<ScoredFlow> parents; // kept sorted by (fitness, stable order)
    int generation = 0;
    std::vector<double> best_history; // best fitness after each generation, index 0 = initial
};

/// offspring_i = parent_i + sigma * scale_i * z_i, z standard normal.
std::vector<double> mutate_gaussian(std::span<const double> parent,
                                    std::span<const double> scales, double sigma, Rng& rng);

/// offspring_i = parent_i + sigma * scale_i * c_i, c standard Cauchy.
std::vector<double> mutate_cauchy(std::span<const double> parent,
                                  std::span<const double> scales, double sigma, Rng& rng);

/// Breeds one Gaussian and one Cauchy offspring and returns the one with the
/// better (lower) penalized fitness; ties go to the Gaussian child. The
/// returned candidate is clamped and scored.
ScoredFlow hybrid_offspring(std::span<const double> parent, std::span<const double> scales,
                            double sigma, Rng& rng, const SearchObjective& objective);

EpState ep_init(const EpConfig& config, const SearchObjective& objective, Rng& rng);

/// One generation: every parent breeds per the variant, offspring are clamped
/// and scored, and elitist truncation keeps the best population_size of
/// parents plus offspring. Appends to best_history.
void ep_step(EpState& state, const EpConfig& config, const SearchObjective& objective, Rng& rng);

SearchResult run_ep(const EpConfig& config, const SearchObjective& objective,
                    std::uint64_t seed, GenerationTrace* trace = nullptr);

} // namespace flowopt
