#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "flowopt/dataset.hpp"
#include "flowopt/ep.hpp"
#include "flowopt/errors.hpp"
#include "flowopt/mlp.hpp"
#include "flowopt/network.hpp"
#include "flowopt/pso.hpp"
#include "flowopt/search.hpp"

#include <optional>
#include <stdexcept>

namespace py = pybind11;
using namespace flowopt;

namespace {

OptimizerFn optimizer_from_name(const std::string& name) {
    const auto method = parse_method(name);
    if (!method) throw std::invalid_argument("unknown method '" + name + "'");
    return make_optimizer(*method);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Delay-minimizing traffic distribution: capacitated-link delay model, "
              "evolutionary and swarm searches, and a neural load-to-flow predictor.";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<FlowError>(m, "FlowError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    py::class_<LinkSpec>(m, "LinkSpec")
        .def_readonly("id", &LinkSpec::id)
        .def_readonly("node_a", &LinkSpec::node_a)
        .def_readonly("node_b", &LinkSpec::node_b)
        .def_readonly("capacity_kbps", &LinkSpec::capacity_kbps);

    py::class_<NetworkTopology>(m, "NetworkTopology")
        .def_property_readonly("link_count", &NetworkTopology::link_count)
        .def_property_readonly("node_count", &NetworkTopology::node_count)
        .def_property_readonly("total_capacity_kbps", &NetworkTopology::total_capacity_kbps)
        .def("capacities", &NetworkTopology::capacities)
        .def("links", &NetworkTopology::links);

    m.def("parse_topology", &parse_topology, py::arg("text"));
    m.def("load_topology", &load_topology, py::arg("path"));
    m.def("total_capacity", &total_capacity, py::arg("topology"));

    m.def(
        "delay_msec",
        [](const NetworkTopology& topo, const std::vector<double>& flows) {
            return delay_msec(topo, flows);
        },
        py::arg("topology"), py::arg("flows_kbps"));
    m.def(
        "mean_link_utilization",
        [](const NetworkTopology& topo, const std::vector<double>& flows) {
            return mean_link_utilization(topo, flows);
        },
        py::arg("topology"), py::arg("flows_kbps"));
    m.def(
        "kkt_optimal_flow",
        [](const NetworkTopology& topo, double load) {
            return kkt_optimal_flow(topo, load).kbps;
        },
        py::arg("topology"), py::arg("load_kbps"));
    m.def("default_penalty_weight", &default_penalty_weight, py::arg("topology"),
          py::arg("load_kbps"));

    py::class_<SearchObjective>(m, "SearchObjective")
        .def(py::init<const NetworkTopology&, double>(), py::arg("topology"),
             py::arg("load_kbps"), py::keep_alive<1, 2>())
        .def(py::init<const NetworkTopology&, double, double, double>(), py::arg("topology"),
             py::arg("load_kbps"), py::arg("penalty_weight"),
             py::arg("epsilon_capacity_kbps") = 1e-3, py::keep_alive<1, 2>())
        .def_readonly("load_kbps", &SearchObjective::load_kbps)
        .def_readonly("penalty_weight", &SearchObjective::penalty_weight)
        .def_readonly("epsilon_capacity_kbps", &SearchObjective::epsilon_capacity_kbps);

    m.def(
        "penalized_fitness",
        [](const SearchObjective& obj, const std::vector<double>& candidate) {
            return penalized_fitness(obj, candidate);
        },
        py::arg("objective"), py::arg("candidate"));

    py::class_<SearchResult>(m, "SearchResult")
        .def_property_readonly("best_flow",
                               [](const SearchResult& r) { return r.best_flow.kbps; })
        .def_readonly("best_delay_msec", &SearchResult::best_delay_msec)
        .def_readonly("generations", &SearchResult::generations)
        .def_readonly("wall_time_sec", &SearchResult::wall_time_sec)
        .def_readonly("converged", &SearchResult::converged)
        .def_readonly("constraint_residual", &SearchResult::constraint_residual);

    py::class_<TrialSummary>(m, "TrialSummary")
        .def_readonly("trials", &TrialSummary::trials)
        .def_readonly("mean_generations", &TrialSummary::mean_generations)
        .def_readonly("mean_time_sec", &TrialSummary::mean_time_sec)
        .def_readonly("mean_delay_msec", &TrialSummary::mean_delay_msec)
        .def_readonly("mean_residual", &TrialSummary::mean_residual)
        .def("to_csv", &TrialSummary::to_csv, py::arg("include_wall_times") = false);

    m.def(
        "run_method",
        [](const std::string& method, const SearchObjective& obj, std::uint64_t seed) {
            return optimizer_from_name(method)(obj, seed);
        },
        py::arg("method"), py::arg("objective"), py::arg("seed"),
        "One seeded run of ep-gauss|ep-cauchy|ep-hybrid|pso|pso-chi|oracle");
    m.def(
        "run_trials",
        [](const std::string& method, const SearchObjective& obj, int n_trials,
           std::uint64_t base_seed) {
            return run_trials(optimizer_from_name(method), obj, n_trials, base_seed);
        },
        py::arg("method"), py::arg("objective"), py::arg("n_trials"), py::arg("base_seed"));

    py::enum_<DatasetRole>(m, "DatasetRole")
        .value("Training", DatasetRole::Training)
        .value("Test", DatasetRole::Test);

    py::class_<DatasetRow>(m, "DatasetRow")
        .def_readonly("load_kbps", &DatasetRow::load_kbps)
        .def_readonly("delay_msec", &DatasetRow::delay_msec)
        .def_readonly("mlu", &DatasetRow::mlu)
        .def_readonly("generations", &DatasetRow::generations)
        .def_readonly("flows_kbps", &DatasetRow::flows_kbps);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("rows", &Dataset::rows);

    m.def("load_schedule", &load_schedule, py::arg("topology"), py::arg("from_frac"),
          py::arg("to_frac"), py::arg("count"), py::arg("offset_kbps") = 0.0);
    m.def(
        "build_dataset",
        [](const NetworkTopology& topo, const std::vector<double>& loads,
           const std::string& method, std::uint64_t base_seed) {
            return build_dataset(topo, loads, optimizer_from_name(method), base_seed);
        },
        py::arg("topology"), py::arg("loads"), py::arg("method") = "pso-chi",
        py::arg("base_seed") = 1);
    m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("path"));
    m.def("read_dataset", &read_dataset, py::arg("path"),
          py::arg("role") = DatasetRole::Training);

    py::class_<MlpModel>(m, "MlpModel")
        .def_readonly("hidden_count", &MlpModel::hidden_count)
        .def_readonly("output_count", &MlpModel::output_count)
        .def_readonly("input_min", &MlpModel::input_min)
        .def_readonly("input_max", &MlpModel::input_max)
        .def_readonly("output_scales", &MlpModel::output_scales)
        .def("forward", &MlpModel::forward, py::arg("load_kbps"));

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("momentum", &TrainConfig::momentum)
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("weight_init_lo", &TrainConfig::weight_init_lo)
        .def_readwrite("weight_init_hi", &TrainConfig::weight_init_hi)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("hidden_count", &TrainConfig::hidden_count);

    m.def(
        "train_mlp",
        [](const NetworkTopology& topo, const Dataset& dataset, const TrainConfig& config) {
            std::vector<TrainSample> samples;
            samples.reserve(dataset.rows.size());
            for (const DatasetRow& row : dataset.rows)
                samples.push_back({row.load_kbps, row.flows_kbps});
            TrainOutput out = train_mlp(topo, samples, config);
            return py::make_tuple(std::move(out.model), std::move(out.mse_history));
        },
        py::arg("topology"), py::arg("dataset"), py::arg("config"),
        "Returns (model, mse_history); history entry 0 is the pre-training error.");
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));
}
