#include "flowopt/network.hpp"

#include "flowopt/errors.hpp"
#include "flowopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace flowopt {

namespace {

void require_length(const NetworkTopology& topology, std::size_t n) {
    if (n != topology.link_count()) {
        throw std::invalid_argument("flow vector length " + std::to_string(n) +
                                    " does not match link count " +
                                    std::to_string(topology.link_count()));
    }
}

} // namespace

NetworkTopology::NetworkTopology(std::vector<LinkSpec> links, int node_count)
    : links_(std::move(links)), node_count_(node_count) {
    if (links_.empty()) throw std::invalid_argument("topology needs at least one link");
    if (node_count_ <= 0) throw std::invalid_argument("node count must be positive");
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const LinkSpec& link = links_[i];
        if (link.id != static_cast<int>(i) + 1)
            throw std::invalid_argument("link ids must be contiguous from 1");
        if (link.node_a == link.node_b)
            throw std::invalid_argument("self-loop on link " + std::to_string(link.id));
        if (!(link.capacity_kbps > 0.0))
            throw std::invalid_argument("non-positive capacity on link " + std::to_string(link.id));
        total_capacity_ += link.capacity_kbps;
    }
}

std::vector<double> NetworkTopology::capacities() const {
    std::vector<double> caps(links_.size());
    for (std::size_t i = 0; i < links_.size(); ++i) caps[i] = links_[i].capacity_kbps;
    return caps;
}

double FlowVector::total() const {
    return std::accumulate(kbps.begin(), kbps.end(), 0.0);
}

NetworkTopology parse_topology(std::string_view text) {
    std::vector<LinkSpec> links;
    int max_node = 0;
    const auto lines = split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        std::string line(lines[li]);
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string keyword;
        if (!(ss >> keyword)) continue; // blank or comment-only line

        const auto fail = [&](const std::string& why) -> ParseError {
            return ParseError("line " + std::to_string(line_no) + ": " + why);
        };
        if (keyword != "link") throw fail("expected 'link', got '" + keyword + "'");
        LinkSpec link;
        std::string trailing;
        if (!(ss >> link.id >> link.node_a >> link.node_b >> link.capacity_kbps))
            throw fail("malformed link line");
        if (ss >> trailing) throw fail("unexpected trailing field '" + trailing + "'");
        if (link.id != static_cast<int>(links.size()) + 1) {
            if (std::any_of(links.begin(), links.end(),
                            [&](const LinkSpec& l) { return l.id == link.id; }))
                throw fail("duplicate link id " + std::to_string(link.id));
            throw fail("link ids must be contiguous from 1, got " + std::to_string(link.id));
        }
        if (link.node_a == link.node_b)
            throw fail("self-loop on link " + std::to_string(link.id));
        if (!(link.capacity_kbps > 0.0))
            throw fail("capacity must be positive on link " + std::to_string(link.id));
        max_node = std::max({max_node, link.node_a, link.node_b});
        links.push_back(link);
    }
    if (links.empty()) throw ParseError("topology file has no link lines");
    return NetworkTopology(std::move(links), max_node);
}

NetworkTopology load_topology(const std::filesystem::path& path) {
    try {
        return parse_topology(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

double total_capacity(const NetworkTopology& topology) {
    return topology.total_capacity_kbps();
}

double delay_msec(const NetworkTopology& topology, std::span<const double> flows_kbps) {
    require_length(topology, flows_kbps.size());
    double total = 0.0;
    double sum_ratio = 0.0;
    for (std::size_t i = 0; i < flows_kbps.size(); ++i) {
        const double f = flows_kbps[i];
        const double c = topology.capacity(i);
        if (f < 0.0 || f >= c)
            throw FlowError("infeasible flow: f_" + std::to_string(i + 1) + " = " +
                            format_double(f) + " outside [0, " + format_double(c) + ")");
        total += f;
        sum_ratio += f / (c - f);
    }
    if (!(total > 0.0)) throw FlowError("undefined delay: total flow is zero");
    return 1000.0 * sum_ratio / total;
}

double delay_msec(const NetworkTopology& topology, const FlowVector& flow) {
    return delay_msec(topology, std::span<const double>(flow.kbps));
}

double mean_link_utilization(const NetworkTopology& topology, std::span<const double> flows_kbps) {
    require_length(topology, flows_kbps.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < flows_kbps.size(); ++i) {
        const double f = flows_kbps[i];
        const double c = topology.capacity(i);
        if (f < 0.0 || f >= c)
            throw FlowError("infeasible flow: f_" + std::to_string(i + 1) + " = " +
                            format_double(f) + " outside [0, " + format_double(c) + ")");
        sum += f / c;
    }
    return sum / static_cast<double>(topology.link_count());
}

double mean_link_utilization(const NetworkTopology& topology, const FlowVector& flow) {
    return mean_link_utilization(topology, std::span<const double>(flow.kbps));
}

namespace {

// Water-filling flows for multiplier lambda: f_i = max(0, C_i - sqrt(C_i/lambda)).
double budget_at(const NetworkTopology& topology, double lambda, std::vector<double>* out) {
    double sum = 0.0;
    for (std::size_t i = 0; i < topology.link_count(); ++i) {
        const double c = topology.capacity(i);
        const double f = std::max(0.0, c - std::sqrt(c / lambda));
        if (out) (*out)[i] = f;
        sum += f;
    }
    return sum;
}

} // namespace

FlowVector kkt_optimal_flow(const NetworkTopology& topology, double load_kbps) {
    const double cap = topology.total_capacity_kbps();
    if (!(load_kbps > 0.0) || !(load_kbps < cap))
        throw std::domain_error("load " + format_double(load_kbps) +
                                " outside (0, " + format_double(cap) + ")");

    constexpr double kResidualTolKbps = 1e-6;
    constexpr int kMaxIterations = 200;

    // Bracket: flows vanish as lambda -> 0; grow lambda until the budget is covered.
    double lo = 0.0;
    double hi = 1.0;
    while (budget_at(topology, hi, nullptr) < load_kbps) hi *= 2.0;

    std::vector<double> flows(topology.link_count(), 0.0);
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double sum = budget_at(topology, mid, &flows);
        if (std::abs(sum - load_kbps) <= kResidualTolKbps) return FlowVector{std::move(flows)};
        if (sum < load_kbps)
            lo = mid;
        else
            hi = mid;
    }
    budget_at(topology, 0.5 * (lo + hi), &flows);
    const double residual = std::abs(std::accumulate(flows.begin(), flows.end(), 0.0) - load_kbps);
    if (residual > 1e-3)
        throw NumericError("water-filling bisection did not reach the budget (residual " +
                           format_double(residual) + " kbps)");
    return FlowVector{std::move(flows)};
}

bool is_feasible(const NetworkTopology& topology, std::span<const double> flows_kbps,
                 double load_kbps, double budget_rel_tol) {
    if (flows_kbps.size() != topology.link_count()) return false;
    double total = 0.0;
    for (std::size_t i = 0; i < flows_kbps.size(); ++i) {
        if (flows_kbps[i] < 0.0 || flows_kbps[i] >= topology.capacity(i)) return false;
        total += flows_kbps[i];
    }
    return std::abs(total - load_kbps) <= budget_rel_tol * load_kbps;
}

} // namespace flowopt
