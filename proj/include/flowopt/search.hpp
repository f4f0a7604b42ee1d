#pragma once

#include "flowopt/network.hpp"
#include "flowopt/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowopt {

/// Default budget-penalty weight for a load: twice the analytic slope of the
/// optimal delay in the load, scaled to the relative-violation form (so one
/// unit of relative budget violation always costs at least twice what it
/// could buy in delay). This is the smallest scale that pins the penalized
/// optimum exactly on the budget at every load, and it keeps the penalty
/// valley shallow enough for the samplers to refine the flow split.
double default_penalty_weight(const NetworkTopology& topology, double load_kbps);

/// The penalized minimization target shared by every optimizer: average delay
/// at a fixed total load, with capacity bounds handled by clamping and the
/// load budget by a linear penalty.
struct SearchObjective {
    const NetworkTopology* topology = nullptr;
    double load_kbps = 0.0;
    double penalty_weight = 0.0;         // msec per unit relative budget violation
    double epsilon_capacity_kbps = 1e-3; // clamp headroom below each capacity

    /// Adaptive default weight (see default_penalty_weight).
    SearchObjective(const NetworkTopology& topo, double load);
    SearchObjective(const NetworkTopology& topo, double load, double penalty,
                    double epsilon = 1e-3);
};

/// Stop once the best fitness has changed by less than `delta_threshold`
/// between consecutive generations for `stagnation_window` generations.
struct TerminationRule {
    int stagnation_window = 20;
    double delta_threshold = 1e-8;
    int max_generations = 5000;

    void validate() const;
};

struct SearchResult {
    FlowVector best_flow;       // repaired: within bounds, on budget
    double best_delay_msec = 0.0;
    int generations = 0;
    double wall_time_sec = 0.0;
    bool converged = false;
    double constraint_residual = 0.0; // |sum - load| / load of best_flow

    std::string to_csv(bool include_wall_time = true) const;
};

struct TraceRow {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double residual = 0.0; // |sum - load| / load of the generation's best candidate
};

using GenerationTrace = std::vector<TraceRow>;

std::string trace_to_csv(const GenerationTrace& trace);

struct TrialSummary {
    std::vector<SearchResult> trials;
    double mean_generations = 0.0;
    double mean_time_sec = 0.0;
    double mean_delay_msec = 0.0;
    double mean_residual = 0.0;

    /// `trial,generations,time_sec,delay_msec,residual` rows plus a trailing
    /// mean row. Wall times are zeroed unless requested so that seeded runs
    /// serialize identically.
    std::string to_csv(bool include_wall_times = false) const;
};

/// Clamps a candidate into [0, C_i - epsilon] componentwise.
void clamp_to_bounds(const SearchObjective& objective, std::vector<double>& candidate);

/// Total, deterministic fitness: delay of the clamped candidate plus
/// penalty_weight * |sum - load| / load. A clamped candidate with zero total
/// contributes no delay term (the penalty alone prices it).
double penalized_fitness(const SearchObjective& objective, std::span<const double> candidate);

/// True iff the last `stagnation_window` consecutive generation-to-generation
/// absolute differences of `best_history` are all below `delta_threshold`.
bool is_stagnant(std::span<const double> best_history, const TerminationRule& rule);

/// `size` candidates with every component uniform in [lo, hi]; reproducible
/// from the generator state.
std::vector<std::vector<double>> init_population(const SearchObjective& objective,
                                                 int size, Rng& rng,
                                                 double lo = 1.0, double hi = 50.0);

/// Moves a near-feasible candidate exactly onto the budget: clamp, then scale
/// down if over, or distribute the deficit proportionally to per-link
/// headroom if under.
FlowVector repair_to_budget(const SearchObjective& objective, std::vector<double> candidate);

enum class Method { EpGaussian, EpCauchy, EpHybrid, Pso, PsoChi, Oracle };

std::optional<Method> parse_method(std::string_view name);
std::string_view method_name(Method method);
const std::vector<Method>& all_methods(); // optimizer methods, excludes Oracle

/// One optimizer run under a seed; implementations live in ep.cpp / pso.cpp.
using OptimizerFn = std::function<SearchResult(const SearchObjective&, std::uint64_t seed)>;

/// The named method with its stock configuration.
OptimizerFn make_optimizer(Method method);

/// Runs `n_trials` independent seeded trials (seeds base_seed .. base_seed+n-1)
/// and aggregates arithmetic means.
TrialSummary run_trials(const OptimizerFn& optimizer, const SearchObjective& objective,
                        int n_trials, std::uint64_t base_seed);

} // namespace flowopt
