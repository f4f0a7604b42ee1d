#include "flowopt/search.hpp"

#include "flowopt/ep.hpp"
#include "flowopt/errors.hpp"
#include "flowopt/io.hpp"
#include "flowopt/pso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace flowopt {

double default_penalty_weight(const NetworkTopology& topology, double load_kbps) {
    const double headroom = topology.total_capacity_kbps() - load_kbps;
    const double h = std::min({1.0, 1e-4 * load_kbps, 0.5 * headroom});
    const double below = delay_msec(topology, kkt_optimal_flow(topology, load_kbps - h));
    const double above = delay_msec(topology, kkt_optimal_flow(topology, load_kbps + h));
    const double slope = (above - below) / (2.0 * h); // msec per kbps of load
    const double at_load = 0.5 * (below + above);
    // The weight must exceed the optimal delay itself so even an all-zero
    // candidate (pure penalty) cannot undercut the optimum.
    return std::max({10.0, 2.0 * load_kbps * slope, 1.05 * at_load});
}

SearchObjective::SearchObjective(const NetworkTopology& topo, double load)
    : SearchObjective(topo, load, default_penalty_weight(topo, load)) {}

SearchObjective::SearchObjective(const NetworkTopology& topo, double load,
                                 double penalty, double epsilon)
    : topology(&topo), load_kbps(load), penalty_weight(penalty),
      epsilon_capacity_kbps(epsilon) {
    if (!(load > 0.0) || !(load < topo.total_capacity_kbps()))
        throw std::domain_error("load " + format_double(load) + " outside (0, " +
                                format_double(topo.total_capacity_kbps()) + ")");
    if (!(penalty > 0.0)) throw std::invalid_argument("penalty weight must be positive");
    double min_cap = topo.capacity(0);
    for (std::size_t i = 1; i < topo.link_count(); ++i)
        min_cap = std::min(min_cap, topo.capacity(i));
    if (!(epsilon > 0.0) || epsilon >= min_cap)
        throw std::invalid_argument("epsilon_capacity must be in (0, min capacity)");
}

void TerminationRule::validate() const {
    if (stagnation_window < 1)
        throw std::invalid_argument("stagnation window must be at least 1");
    if (!(delta_threshold > 0.0))
        throw std::invalid_argument("stagnation threshold must be positive");
    if (max_generations < stagnation_window)
        throw std::invalid_argument("max generations must be at least the stagnation window");
}

void clamp_to_bounds(const SearchObjective& objective, std::vector<double>& candidate) {
    const NetworkTopology& topo = *objective.topology;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        const double hi = topo.capacity(i) - objective.epsilon_capacity_kbps;
        candidate[i] = std::clamp(candidate[i], 0.0, hi);
    }
}

double penalized_fitness(const SearchObjective& objective, std::span<const double> candidate) {
    const NetworkTopology& topo = *objective.topology;
    if (candidate.size() != topo.link_count())
        throw std::invalid_argument("candidate length does not match link count");
    double total = 0.0;
    double sum_ratio = 0.0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        const double hi = topo.capacity(i) - objective.epsilon_capacity_kbps;
        const double f = std::clamp(candidate[i], 0.0, hi);
        total += f;
        sum_ratio += f / (topo.capacity(i) - f);
    }
    const double delay = total > 0.0 ? 1000.0 * sum_ratio / total : 0.0;
    const double violation = std::abs(total - objective.load_kbps) / objective.load_kbps;
    return delay + objective.penalty_weight * violation;
}

bool is_stagnant(std::span<const double> best_history, const TerminationRule& rule) {
    if (best_history.empty()) throw std::invalid_argument("empty fitness history");
    const std::size_t window = static_cast<std::size_t>(rule.stagnation_window);
    if (best_history.size() < window + 1) return false;
    for (std::size_t k = best_history.size() - window; k < best_history.size(); ++k) {
        if (std::abs(best_history[k] - best_history[k - 1]) >= rule.delta_threshold)
            return false;
    }
    return true;
}

std::vector<std::vector<double>> init_population(const SearchObjective& objective,
                                                 int size, Rng& rng, double lo, double hi) {
    if (size < 2) throw std::invalid_argument("population size must be at least 2");
    const std::size_t n = objective.topology->link_count();
    std::vector<std::vector<double>> population(static_cast<std::size_t>(size));
    for (auto& member : population) {
        member.resize(n);
        for (double& f : member) f = rng.uniform(lo, hi);
    }
    return population;
}

FlowVector repair_to_budget(const SearchObjective& objective, std::vector<double> candidate) {
    const NetworkTopology& topo = *objective.topology;
    clamp_to_bounds(objective, candidate);
    const double load = objective.load_kbps;
    for (int pass = 0; pass < 32; ++pass) {
        const double total = std::accumulate(candidate.begin(), candidate.end(), 0.0);
        if (std::abs(total - load) <= 1e-9 * load) break;
        if (total > load) {
            const double scale = load / total;
            for (double& f : candidate) f *= scale;
        } else {
            double headroom = 0.0;
            std::vector<double> room(candidate.size());
            for (std::size_t i = 0; i < candidate.size(); ++i) {
                room[i] = (topo.capacity(i) - objective.epsilon_capacity_kbps) - candidate[i];
                headroom += room[i];
            }
            if (!(headroom > 0.0)) break;
            const double deficit = std::min(load - total, headroom);
            for (std::size_t i = 0; i < candidate.size(); ++i)
                candidate[i] += deficit * room[i] / headroom;
        }
    }
    return FlowVector{std::move(candidate)};
}

std::string trace_to_csv(const GenerationTrace& trace) {
    std::string out = "generation,best_fitness,mean_fitness,residual\n";
    for (const TraceRow& row : trace) {
        out += std::to_string(row.generation);
        out += ',';
        out += format_double(row.best_fitness);
        out += ',';
        out += format_double(row.mean_fitness);
        out += ',';
        out += format_double(row.residual);
        out += '\n';
    }
    return out;
}

std::string SearchResult::to_csv(bool include_wall_time) const {
    std::string out = "delay_msec,generations,time_sec,converged,residual";
    const std::size_t n = best_flow.size();
    for (std::size_t i = 1; i <= n; ++i) out += ",f" + std::to_string(i);
    out += '\n';
    out += format_double(best_delay_msec);
    out += ',' + std::to_string(generations);
    out += ',' + format_double(include_wall_time ? wall_time_sec : 0.0);
    out += ',' + std::string(converged ? "1" : "0");
    out += ',' + format_double(constraint_residual);
    for (std::size_t i = 0; i < n; ++i) out += ',' + format_double(best_flow[i]);
    out += '\n';
    return out;
}

std::string TrialSummary::to_csv(bool include_wall_times) const {
    std::string out = "trial,generations,time_sec,delay_msec,residual\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const SearchResult& r = trials[i];
        out += std::to_string(i + 1);
        out += ',' + std::to_string(r.generations);
        out += ',' + format_double(include_wall_times ? r.wall_time_sec : 0.0);
        out += ',' + format_double(r.best_delay_msec);
        out += ',' + format_double(r.constraint_residual);
        out += '\n';
    }
    out += "mean," + format_double(mean_generations);
    out += ',' + format_double(include_wall_times ? mean_time_sec : 0.0);
    out += ',' + format_double(mean_delay_msec);
    out += ',' + format_double(mean_residual);
    out += '\n';
    return out;
}

std::optional<Method> parse_method(std::string_view name) {
    if (name == "ep-gauss") return Method::EpGaussian;
    if (name == "ep-cauchy") return Method::EpCauchy;
    if (name == "ep-hybrid") return Method::EpHybrid;
    if (name == "pso") return Method::Pso;
    if (name == "pso-chi") return Method::PsoChi;
    if (name == "oracle") return Method::Oracle;
    return std::nullopt;
}

std::string_view method_name(Method method) {
    switch (method) {
        case Method::EpGaussian: return "ep-gauss";
        case Method::EpCauchy: return "ep-cauchy";
        case Method::EpHybrid: return "ep-hybrid";
        case Method::Pso: return "pso";
        case Method::PsoChi: return "pso-chi";
        case Method::Oracle: return "oracle";
    }
    return "?";
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {
        Method::EpGaussian, Method::EpCauchy, Method::EpHybrid, Method::Pso, Method::PsoChi};
    return methods;
}

OptimizerFn make_optimizer(Method method) {
    switch (method) {
        case Method::EpGaussian:
        case Method::EpCauchy:
        case Method::EpHybrid: {
            const auto variant = method == Method::EpGaussian ? EpVariant::Gaussian
                                 : method == Method::EpCauchy ? EpVariant::Cauchy
                                                              : EpVariant::Hybrid;
            return [variant](const SearchObjective& obj, std::uint64_t seed) {
                return run_ep(EpConfig::stock(variant), obj, seed);
            };
        }
        case Method::Pso:
        case Method::PsoChi: {
            const auto variant = method == Method::Pso ? PsoVariant::Inertia : PsoVariant::Constriction;
            return [variant](const SearchObjective& obj, std::uint64_t seed) {
                return run_pso(PsoConfig::stock(variant), obj, seed);
            };
        }
        case Method::Oracle:
            return [](const SearchObjective& obj, std::uint64_t) {
                SearchResult result;
                result.best_flow = kkt_optimal_flow(*obj.topology, obj.load_kbps);
                result.best_delay_msec = delay_msec(*obj.topology, result.best_flow);
                result.generations = 0;
                result.converged = true;
                result.constraint_residual =
                    std::abs(result.best_flow.total() - obj.load_kbps) / obj.load_kbps;
                return result;
            };
    }
    throw std::invalid_argument("unknown method");
}

TrialSummary run_trials(const OptimizerFn& optimizer, const SearchObjective& objective,
                        int n_trials, std::uint64_t base_seed) {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
    TrialSummary summary;
    summary.trials.reserve(static_cast<std::size_t>(n_trials));
    for (int t = 0; t < n_trials; ++t)
        summary.trials.push_back(optimizer(objective, base_seed + static_cast<std::uint64_t>(t)));
    const double n = static_cast<double>(n_trials);
    for (const SearchResult& r : summary.trials) {
        summary.mean_generations += r.generations / n;
        summary.mean_time_sec += r.wall_time_sec / n;
        summary.mean_delay_msec += r.best_delay_msec / n;
        summary.mean_residual += r.constraint_residual / n;
    }
    return summary;
}

} // namespace flowopt
