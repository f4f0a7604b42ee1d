// flowopt: delay-minimizing traffic distribution over capacitated links.
//
// Subcommands: optimize, compare, gen-dataset, train, predict, eval.
// Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 numerical failure.

#include "flowopt/dataset.hpp"
#include "flowopt/ep.hpp"
#include "flowopt/errors.hpp"
#include "flowopt/io.hpp"
#include "flowopt/mlp.hpp"
#include "flowopt/network.hpp"
#include "flowopt/pso.hpp"
#include "flowopt/search.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace flowopt;

namespace {

struct CommonArgs {
    std::string topology_path;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

struct LoadArgs {
    double load_kbps = 0.0;
    double load_fraction = 0.0;
    bool has_load = false;
    bool has_fraction = false;

    double resolve(const NetworkTopology& topo) const {
        return has_load ? load_kbps : load_fraction * topo.total_capacity_kbps();
    }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_topology = true) {
    auto* topo = cmd->add_option("--topology", args.topology_path, "Topology file");
    if (needs_topology) topo->required();
    cmd->add_option("--seed", args.seed, "Random seed")->envname("FLOWOPT_SEED");
    cmd->add_option("--out", args.out_dir, "Output directory");
}

void add_load(CLI::App* cmd, LoadArgs& args) {
    auto* load = cmd->add_option("--load", args.load_kbps, "Total load in kbps");
    auto* frac = cmd->add_option("--load-fraction", args.load_fraction,
                                 "Total load as a fraction of total capacity");
    load->excludes(frac);
    frac->excludes(load);
    cmd->parse_complete_callback([load, frac, &args] {
        args.has_load = load->count() > 0;
        args.has_fraction = frac->count() > 0;
        if (args.has_load == args.has_fraction)
            throw CLI::ValidationError("exactly one of --load / --load-fraction is required");
    });
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path path(dir);
    fs::create_directories(path);
    return path;
}

void write_out(const fs::path& path, std::string_view content) {
    write_text_file(path, content);
    std::cout << "wrote " << path.string() << "\n";
}

std::string flows_line(std::span<const double> flows) {
    std::string line;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        if (i > 0) line += ' ';
        line += format_fixed(flows[i], 3);
    }
    return line;
}

OptimizerFn optimizer_or_die(const std::string& name) {
    const auto method = parse_method(name);
    if (!method) throw std::invalid_argument("unknown method '" + name + "'");
    return make_optimizer(*method);
}

int cmd_optimize(const CommonArgs& common, const LoadArgs& load_args,
                 const std::string& method_name, bool wall_times) {
    const NetworkTopology topo = load_topology(common.topology_path);
    const double load = load_args.resolve(topo);
    const SearchObjective objective(topo, load);

    const auto method = parse_method(method_name);
    if (!method) throw std::invalid_argument("unknown method '" + method_name + "'");

    GenerationTrace trace;
    SearchResult result;
    switch (*method) {
        case Method::EpGaussian:
        case Method::EpCauchy:
        case Method::EpHybrid: {
            const auto variant = *method == Method::EpGaussian  ? EpVariant::Gaussian
                                 : *method == Method::EpCauchy ? EpVariant::Cauchy
                                                               : EpVariant::Hybrid;
            result = run_ep(EpConfig::stock(variant), objective, common.seed, &trace);
            break;
        }
        case Method::Pso:
        case Method::PsoChi: {
            const auto variant =
                *method == Method::Pso ? PsoVariant::Inertia : PsoVariant::Constriction;
            result = run_pso(PsoConfig::stock(variant), objective, common.seed, &trace);
            break;
        }
        case Method::Oracle:
            result = make_optimizer(Method::Oracle)(objective, common.seed);
            break;
    }

    const fs::path out = prepare_out_dir(common.out_dir);
    write_out(out / "result.csv", result.to_csv(wall_times));
    write_out(out / "trace.csv", trace_to_csv(trace));

    std::cout << "method " << method_name << ", load " << format_fixed(load, 3) << " kbps\n"
              << "best delay " << format_fixed(result.best_delay_msec, 4) << " msec, "
              << "mean link utilization "
              << format_fixed(mean_link_utilization(topo, result.best_flow), 4) << ", "
              << "generations " << result.generations << "\n"
              << "flows: " << flows_line(result.best_flow.kbps) << "\n";
    std::cerr << "wall time " << format_fixed(result.wall_time_sec, 3) << " s\n";
    return 0;
}

int cmd_compare(const CommonArgs& common, const LoadArgs& load_args,
                std::vector<std::string> method_names, int trials, bool wall_times) {
    const NetworkTopology topo = load_topology(common.topology_path);
    const double load = load_args.resolve(topo);
    const SearchObjective objective(topo, load);

    if (method_names.empty())
        for (Method m : all_methods()) method_names.emplace_back(method_name(m));

    const fs::path out = prepare_out_dir(common.out_dir);
    std::vector<TrialSummary> summaries;
    for (const std::string& name : method_names) {
        const OptimizerFn optimizer = optimizer_or_die(name);
        summaries.push_back(run_trials(optimizer, objective, trials, common.seed));
        write_out(out / ("compare_" + name + ".csv"), summaries.back().to_csv(wall_times));
        std::cerr << name << " mean wall time " << format_fixed(summaries.back().mean_time_sec, 3)
                  << " s\n";
    }
    std::cout << "load " << format_fixed(load, 3) << " kbps, " << trials
              << " trials, base seed " << common.seed << "\n";
    std::cout << "method     mean_gens  mean_delay_msec  mean_residual\n";
    for (std::size_t i = 0; i < method_names.size(); ++i)
        std::printf("%-10s %9.1f %16.4f %14.3e\n", method_names[i].c_str(),
                    summaries[i].mean_generations, summaries[i].mean_delay_msec,
                    summaries[i].mean_residual);
    return 0;
}

int cmd_gen_dataset(const CommonArgs& common, double from_frac, double to_frac, int count,
                    bool paper_rounding) {
    const NetworkTopology topo = load_topology(common.topology_path);
    const std::vector<double> train_loads = load_schedule(topo, from_frac, to_frac, count);
    // Test loads sit halfway between training loads; the half-step overshoot
    // past the last training load is capped so it stays clear of capacity.
    const double step = count > 1 ? train_loads[1] - train_loads[0] : 0.0;
    const double cap_room = 0.5 * (0.97 * topo.total_capacity_kbps() - train_loads.back());
    const double offset = std::max(0.0, std::min(0.5 * step, cap_room));
    const std::vector<double> test_loads = load_schedule(topo, from_frac, to_frac, count, offset);

    const OptimizerFn optimizer = make_optimizer(Method::PsoChi);
    const Dataset train =
        build_dataset(topo, train_loads, optimizer, common.seed, DatasetRole::Training);
    const Dataset test =
        build_dataset(topo, test_loads, optimizer, common.seed + 1000, DatasetRole::Test);

    const fs::path out = prepare_out_dir(common.out_dir);
    write_out(out / "train.csv", dataset_to_csv(train));
    write_out(out / "test.csv", dataset_to_csv(test));
    if (paper_rounding) {
        write_out(out / "train_rounded.csv", dataset_to_rounded_csv(train));
        write_out(out / "test_rounded.csv", dataset_to_rounded_csv(test));
    }
    return 0;
}

std::vector<TrainSample> to_samples(const Dataset& dataset) {
    std::vector<TrainSample> samples;
    samples.reserve(dataset.rows.size());
    for (const DatasetRow& row : dataset.rows) samples.push_back({row.load_kbps, row.flows_kbps});
    return samples;
}

int cmd_train(const CommonArgs& common, const std::string& dataset_path,
              const std::string& model_path, const TrainConfig& base_config) {
    const NetworkTopology topo = load_topology(common.topology_path);
    const Dataset dataset = read_dataset(dataset_path, DatasetRole::Training);
    if (dataset.rows.empty()) {
        std::cerr << "warning: dataset " << dataset_path << " has no rows\n";
        throw ParseError(dataset_path + ": cannot train on an empty dataset");
    }
    TrainConfig config = base_config;
    config.seed = common.seed;
    const auto samples = to_samples(dataset);
    const TrainOutput trained = train_mlp(topo, samples, config);

    save_model(trained.model, model_path);
    std::cout << "wrote " << model_path << "\n";

    std::string curve = "epoch,mse\n";
    for (std::size_t e = 0; e < trained.mse_history.size(); ++e)
        curve += std::to_string(e) + ',' + format_double(trained.mse_history[e]) + '\n';
    const fs::path out = prepare_out_dir(common.out_dir);
    write_out(out / "learning_curve.csv", curve);

    std::cout << "trained " << config.max_epochs << " epochs, mse "
              << format_double(trained.mse_history.front()) << " -> "
              << format_double(trained.mse_history.back()) << "\n";
    return 0;
}

// Scales predicted flows so they sum exactly to the queried load. Off by
// default: raw predictions are reported as the network emits them.
std::vector<double> renormalize_prediction(const NetworkTopology& topo,
                                           std::vector<double> flows, double load) {
    SearchObjective objective(topo, load, 1000.0);
    return repair_to_budget(objective, std::move(flows)).kbps;
}

int cmd_predict(const CommonArgs& common, const LoadArgs& load_args,
                const std::string& model_path, bool write_file, bool renormalize) {
    const NetworkTopology topo = load_topology(common.topology_path);
    const MlpModel model = load_model(model_path);
    if (model.output_count != static_cast<int>(topo.link_count()))
        throw ParseError(model_path + ": model has " + std::to_string(model.output_count) +
                         " outputs but the topology has " + std::to_string(topo.link_count()) +
                         " links");
    const double load = load_args.resolve(topo);
    std::vector<double> flows = model.forward(load);
    if (renormalize) flows = renormalize_prediction(topo, std::move(flows), load);
    const double delay = delay_msec(topo, flows);
    const double mlu = mean_link_utilization(topo, flows);

    std::cout << "load " << format_fixed(load, 3) << " kbps\n"
              << "predicted flows: " << flows_line(flows) << "\n"
              << "delay " << format_fixed(delay, 4) << " msec, mean link utilization "
              << format_fixed(mlu, 4) << "\n";

    if (write_file) {
        std::string csv = "load,delay_msec,mlu";
        for (std::size_t i = 1; i <= flows.size(); ++i) csv += ",f" + std::to_string(i);
        csv += '\n';
        csv += format_double(load);
        csv += ',' + format_double(delay);
        csv += ',' + format_double(mlu);
        for (double f : flows) csv += ',' + format_double(f);
        csv += '\n';
        const fs::path out = prepare_out_dir(common.out_dir);
        write_out(out / "prediction.csv", csv);
    }
    return 0;
}

int cmd_eval(const CommonArgs& common, const std::string& dataset_path,
             const std::string& model_path, bool renormalize) {
    const NetworkTopology topo = load_topology(common.topology_path);
    const MlpModel model = load_model(model_path);
    if (model.output_count != static_cast<int>(topo.link_count()))
        throw ParseError(model_path + ": model/topology dimension mismatch");
    const Dataset dataset = read_dataset(dataset_path, DatasetRole::Test);
    if (dataset.rows.empty()) std::cerr << "warning: dataset " << dataset_path << " is empty\n";

    // All reported numbers are recomputed from flows, not the stored columns.
    std::string eval_csv =
        "load,optimal_delay_msec,predicted_delay_msec,delay_rel_err,"
        "optimal_mlu,predicted_mlu,mlu_abs_err\n";
    std::string plot_delay = "load,optimal_delay_msec,predicted_delay_msec\n";
    std::string plot_mlu = "load,optimal_mlu,predicted_mlu\n";

    double mlu_mae = 0.0;
    for (const DatasetRow& row : dataset.rows) {
        const double opt_delay = delay_msec(topo, row.flows_kbps);
        const double opt_mlu = mean_link_utilization(topo, row.flows_kbps);
        std::vector<double> pred = model.forward(row.load_kbps);
        if (renormalize) pred = renormalize_prediction(topo, std::move(pred), row.load_kbps);
        const double pred_delay = delay_msec(topo, pred);
        const double pred_mlu = mean_link_utilization(topo, pred);
        const double rel = std::abs(pred_delay - opt_delay) / opt_delay;
        const double mlu_err = std::abs(pred_mlu - opt_mlu);
        mlu_mae += mlu_err;

        eval_csv += format_double(row.load_kbps);
        eval_csv += ',' + format_double(opt_delay) + ',' + format_double(pred_delay);
        eval_csv += ',' + format_double(rel);
        eval_csv += ',' + format_double(opt_mlu) + ',' + format_double(pred_mlu);
        eval_csv += ',' + format_double(mlu_err) + '\n';
        plot_delay += format_double(row.load_kbps) + ',' + format_double(opt_delay) + ',' +
                      format_double(pred_delay) + '\n';
        plot_mlu += format_double(row.load_kbps) + ',' + format_double(opt_mlu) + ',' +
                    format_double(pred_mlu) + '\n';

        std::cout << "load " << format_fixed(row.load_kbps, 1) << ": delay "
                  << format_fixed(pred_delay, 2) << " vs optimal " << format_fixed(opt_delay, 2)
                  << " (" << format_fixed(rel * 100.0, 2) << "%), mlu "
                  << format_fixed(pred_mlu, 4) << " vs " << format_fixed(opt_mlu, 4) << "\n";
    }
    if (!dataset.rows.empty()) mlu_mae /= static_cast<double>(dataset.rows.size());
    std::cout << "mean absolute mlu error " << format_fixed(mlu_mae, 4) << "\n";

    const fs::path out = prepare_out_dir(common.out_dir);
    write_out(out / "eval.csv", eval_csv);
    write_out(out / "plot_delay.csv", plot_delay);
    write_out(out / "plot_mlu.csv", plot_mlu);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-minimizing traffic distribution: metaheuristic search over link "
                 "flows plus a neural predictor"};
    app.require_subcommand(1);

    CommonArgs common;
    LoadArgs load_args;
    std::string method = "pso-chi";
    std::vector<std::string> methods;
    int trials = 10;
    bool wall_times = false;
    bool paper_rounding = false;
    double from_frac = 0.30, to_frac = 0.89;
    int count = 10;
    std::string model_path, dataset_path;
    TrainConfig train_config;

    const std::vector<std::string> known_methods = {"ep-gauss", "ep-cauchy", "ep-hybrid",
                                                    "pso",      "pso-chi",   "oracle"};

    auto* optimize = app.add_subcommand("optimize", "Minimize delay for one load");
    add_common(optimize, common);
    add_load(optimize, load_args);
    optimize->add_option("--method", method, "ep-gauss|ep-cauchy|ep-hybrid|pso|pso-chi|oracle")
        ->check(CLI::IsMember(known_methods));
    optimize->add_flag("--wall-times", wall_times,
                       "Record wall-clock times in output files (non-reproducible)");

    auto* compare = app.add_subcommand("compare", "Seeded trials across methods");
    add_common(compare, common);
    add_load(compare, load_args);
    compare->add_option("--method", methods, "Methods to compare (default: all five)")
        ->check(CLI::IsMember(known_methods));
    compare->add_option("--trials", trials, "Independent trials per method");
    compare->add_flag("--wall-times", wall_times,
                      "Record wall-clock times in output files (non-reproducible)");

    auto* gen = app.add_subcommand("gen-dataset",
                                   "Sweep loads, solve each with pso-chi, write train/test CSVs");
    add_common(gen, common);
    gen->add_option("--from-frac", from_frac, "Sweep start as a fraction of capacity");
    gen->add_option("--to-frac", to_frac, "Sweep end as a fraction of capacity");
    gen->add_option("--count", count, "Loads per dataset");
    gen->add_flag("--paper-rounding", paper_rounding, "Also write integer-rounded tables");

    auto* train = app.add_subcommand("train", "Train the load-to-flow predictor");
    add_common(train, common);
    train->add_option("--dataset", dataset_path, "Training dataset CSV")->required();
    train->add_option("--model", model_path, "Output model path")->required();
    train->add_option("--epochs", train_config.max_epochs, "Training epochs");
    train->add_option("--lr", train_config.learning_rate, "Learning rate");
    train->add_option("--momentum", train_config.momentum, "Momentum constant");
    train->add_option("--hidden", train_config.hidden_count, "Hidden layer size");

    bool renormalize = false;

    auto* predict = app.add_subcommand("predict", "Predict the optimal flow split for a load");
    add_common(predict, common);
    add_load(predict, load_args);
    predict->add_option("--model", model_path, "Model path")->required();
    bool predict_write = false;
    predict->add_flag("--write", predict_write, "Also write prediction.csv to --out");
    predict->add_flag("--renormalize", renormalize,
                      "Scale predicted flows to sum exactly to the load");

    auto* eval = app.add_subcommand("eval", "Compare predictions against a dataset");
    add_common(eval, common);
    eval->add_option("--dataset", dataset_path, "Dataset CSV to evaluate against")->required();
    eval->add_option("--model", model_path, "Model path")->required();
    eval->add_flag("--renormalize", renormalize,
                   "Scale predicted flows to sum exactly to each load");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(optimize))
            return cmd_optimize(common, load_args, method, wall_times);
        if (app.got_subcommand(compare))
            return cmd_compare(common, load_args, methods, trials, wall_times);
        if (app.got_subcommand(gen))
            return cmd_gen_dataset(common, from_frac, to_frac, count, paper_rounding);
        if (app.got_subcommand(train))
            return cmd_train(common, dataset_path, model_path, train_config);
        if (app.got_subcommand(predict))
            return cmd_predict(common, load_args, model_path, predict_write, renormalize);
        if (app.got_subcommand(eval))
            return cmd_eval(common, dataset_path, model_path, renormalize);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FlowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
