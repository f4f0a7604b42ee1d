#pragma once

#include "flowopt/network.hpp"
#include "flowopt/search.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace flowopt {

struct DatasetRow {
    double load_kbps = 0.0;
    double delay_msec = 0.0;
    double mlu = 0.0;
    int generations = 0;
    std::vector<double> flows_kbps;
};

enum class DatasetRole { Training, Test };

struct Dataset {
    std::vector<DatasetRow> rows;
    DatasetRole role = DatasetRole::Training;
};

/// `count` evenly spaced loads from from_frac to to_frac of total capacity,
/// shifted by `offset_kbps`. The fraction endpoints snap to whole kbps so the
/// stock sweep (0.30 .. 0.89, count 10) lands on round loads; the test sweep
/// is the same schedule at offset +30.
std::vector<double> load_schedule(const NetworkTopology& topology, double from_frac,
                                  double to_frac, int count, double offset_kbps = 0.0);

/// One optimizer run per load (seeds base_seed + row index); each row stores
/// the repaired flows with delay and utilization recomputed from them. A
/// non-converged run is retried once on a shifted seed and the better result
/// kept.
Dataset build_dataset(const NetworkTopology& topology, const std::vector<double>& loads,
                      const OptimizerFn& optimizer, std::uint64_t base_seed,
                      DatasetRole role = DatasetRole::Training,
                      std::optional<double> penalty_weight = std::nullopt);

/// CSV with header `load,delay_msec,mlu,generations,f1,...,fN`, full-precision
/// decimals, LF endings.
std::string dataset_to_csv(const Dataset& dataset);
Dataset dataset_from_csv(std::string_view text, DatasetRole role = DatasetRole::Training);

/// Integer-rounded presentation table (delay to 1 decimal, utilization to 4).
std::string dataset_to_rounded_csv(const Dataset& dataset);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path,
                     DatasetRole role = DatasetRole::Training);

} // namespace flowopt
