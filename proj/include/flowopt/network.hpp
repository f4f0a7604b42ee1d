#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace flowopt {

struct LinkSpec {
    int id = 0; // 1-based, contiguous
    int node_a = 0;
    int node_b = 0;
    double capacity_kbps = 0.0;
};

/// Fixed network: an ordered set of capacitated links. Immutable after
/// construction and safe to share across concurrent optimizer runs.
class NetworkTopology {
public:
    NetworkTopology(std::vector<LinkSpec> links, int node_count);

    const std::vector<LinkSpec>& links() const { return links_; }
    std::size_t link_count() const { return links_.size(); }
    int node_count() const { return node_count_; }
    double capacity(std::size_t link_index) const { return links_[link_index].capacity_kbps; }
    double total_capacity_kbps() const { return total_capacity_; }
    std::vector<double> capacities() const;

private:
    std::vector<LinkSpec> links_;
    int node_count_ = 0;
    double total_capacity_ = 0.0;
};

/// Per-link flows in kbps; the optimization design variable. The carried
/// total load is the component sum.
struct FlowVector {
    std::vector<double> kbps;

    double total() const;
    std::size_t size() const { return kbps.size(); }
    double operator[](std::size_t i) const { return kbps[i]; }
};

/// Parses the topology line format: `link <id> <node_a> <node_b> <capacity_kbps>`,
/// one per line, ids contiguous from 1; `#` starts a comment. Throws ParseError
/// naming the offending line.
NetworkTopology parse_topology(std::string_view text);
NetworkTopology load_topology(const std::filesystem::path& path);

double total_capacity(const NetworkTopology& topology);

/// Average packet delay in milliseconds: 1000 * (1/sum f) * sum_i f_i/(C_i - f_i).
/// Requires 0 <= f_i < C_i for all i and a positive total; throws FlowError
/// otherwise.
double delay_msec(const NetworkTopology& topology, std::span<const double> flows_kbps);
double delay_msec(const NetworkTopology& topology, const FlowVector& flow);

/// Mean of f_i/C_i over links. Requires 0 <= f_i < C_i.
double mean_link_utilization(const NetworkTopology& topology, std::span<const double> flows_kbps);
double mean_link_utilization(const NetworkTopology& topology, const FlowVector& flow);

/// Analytic delay-minimizing split of `load_kbps` across the links: equalizes
/// the marginal delay C_i/(C_i - f_i)^2 on all carrying links (water-filling;
/// links priced out at low load are clamped to zero). Bisects on the
/// multiplier until the budget residual is below 1e-6 kbps. Throws
/// std::domain_error unless 0 < load < total capacity.
FlowVector kkt_optimal_flow(const NetworkTopology& topology, double load_kbps);

/// Feasibility label: 0 <= f_i < C_i on every link and the total within
/// `budget_rel_tol * load` of the load.
bool is_feasible(const NetworkTopology& topology, std::span<const double> flows_kbps,
                 double load_kbps, double budget_rel_tol = 1e-3);

} // namespace flowopt
