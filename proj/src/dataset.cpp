#include "flowopt/dataset.hpp"

#include "flowopt/errors.hpp"
#include "flowopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowopt {

std::vector<double> load_schedule(const NetworkTopology& topology, double from_frac,
                                  double to_frac, int count, double offset_kbps) {
    if (count < 1) throw std::invalid_argument("schedule count must be at least 1");
    if (!(from_frac > 0.0) || !(from_frac < to_frac) || !(to_frac < 1.0))
        throw std::invalid_argument("schedule fractions must satisfy 0 < from < to < 1");
    const double cap = topology.total_capacity_kbps();
    const double first = std::round(from_frac * cap) + offset_kbps;
    const double last = std::round(to_frac * cap) + offset_kbps;
    std::vector<double> loads(static_cast<std::size_t>(count));
    if (count == 1) {
        loads[0] = first;
        return loads;
    }
    const double step = (last - first) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) loads[static_cast<std::size_t>(i)] = first + step * i;
    return loads;
}

Dataset build_dataset(const NetworkTopology& topology, const std::vector<double>& loads,
                      const OptimizerFn& optimizer, std::uint64_t base_seed,
                      DatasetRole role, std::optional<double> penalty_weight) {
    Dataset dataset;
    dataset.role = role;
    dataset.rows.reserve(loads.size());
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const double load = loads[i];
        if (!(load > 0.0) || !(load < topology.total_capacity_kbps()))
            throw std::domain_error("scheduled load " + format_double(load) +
                                    " outside (0, total capacity)");
        const SearchObjective objective =
            penalty_weight ? SearchObjective(topology, load, *penalty_weight)
                           : SearchObjective(topology, load);
        SearchResult result = optimizer(objective, base_seed + i);
        if (!result.converged) {
            // One retry on a disjoint seed stream; keep the better run.
            SearchResult retry = optimizer(objective, base_seed + i + 0x9e3779b9u);
            if (retry.best_delay_msec < result.best_delay_msec) result = std::move(retry);
        }
        DatasetRow row;
        row.load_kbps = load;
        row.flows_kbps = result.best_flow.kbps;
        row.delay_msec = delay_msec(topology, result.best_flow);
        row.mlu = mean_link_utilization(topology, result.best_flow);
        row.generations = result.generations;
        dataset.rows.push_back(std::move(row));
    }
    return dataset;
}

std::string dataset_to_csv(const Dataset& dataset) {
    const std::size_t n = dataset.rows.empty() ? 0 : dataset.rows.front().flows_kbps.size();
    std::string out = "load,delay_msec,mlu,generations";
    for (std::size_t i = 1; i <= n; ++i) out += ",f" + std::to_string(i);
    out += '\n';
    for (const DatasetRow& row : dataset.rows) {
        out += format_double(row.load_kbps);
        out += ',' + format_double(row.delay_msec);
        out += ',' + format_double(row.mlu);
        out += ',' + std::to_string(row.generations);
        for (double f : row.flows_kbps) out += ',' + format_double(f);
        out += '\n';
    }
    return out;
}

std::string dataset_to_rounded_csv(const Dataset& dataset) {
    const std::size_t n = dataset.rows.empty() ? 0 : dataset.rows.front().flows_kbps.size();
    std::string out = "load,delay_msec,mlu,generations";
    for (std::size_t i = 1; i <= n; ++i) out += ",f" + std::to_string(i);
    out += '\n';
    for (const DatasetRow& row : dataset.rows) {
        out += format_fixed(row.load_kbps, 0);
        out += ',' + format_fixed(row.delay_msec, 1);
        out += ',' + format_fixed(row.mlu, 4);
        out += ',' + std::to_string(row.generations);
        for (double f : row.flows_kbps) out += ',' + format_fixed(f, 0);
        out += '\n';
    }
    return out;
}

Dataset dataset_from_csv(std::string_view text, DatasetRole role) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("dataset file is empty");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 4 || header[0] != "load" || header[1] != "delay_msec" ||
        header[2] != "mlu" || header[3] != "generations")
        throw ParseError("line 1: bad dataset header (expected 'load,delay_msec,mlu,generations,f1,...')");
    for (std::size_t i = 4; i < header.size(); ++i) {
        if (header[i] != "f" + std::to_string(i - 3))
            throw ParseError("line 1: bad dataset header column '" + std::string(header[i]) + "'");
    }
    const std::size_t link_count = header.size() - 4;

    Dataset dataset;
    dataset.role = role;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = split_csv_line(lines[li]);
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(li + 1) + ": expected " +
                             std::to_string(header.size()) + " columns, got " +
                             std::to_string(fields.size()));
        DatasetRow row;
        const auto load = parse_double(fields[0]);
        const auto delay = parse_double(fields[1]);
        const auto mlu = parse_double(fields[2]);
        const auto generations = parse_int(fields[3]);
        if (!load || !delay || !mlu || !generations)
            throw ParseError("line " + std::to_string(li + 1) + ": non-numeric field");
        row.load_kbps = *load;
        row.delay_msec = *delay;
        row.mlu = *mlu;
        row.generations = static_cast<int>(*generations);
        row.flows_kbps.reserve(link_count);
        for (std::size_t f = 4; f < fields.size(); ++f) {
            const auto value = parse_double(fields[f]);
            if (!value)
                throw ParseError("line " + std::to_string(li + 1) + ": non-numeric flow field");
            row.flows_kbps.push_back(*value);
        }
        dataset.rows.push_back(std::move(row));
    }
    return dataset;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    write_text_file(path, dataset_to_csv(dataset));
}

Dataset read_dataset(const std::filesystem::path& path, DatasetRole role) {
    try {
        return dataset_from_csv(read_text_file(path), role);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace flowopt
