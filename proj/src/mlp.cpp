#include "flowopt/mlp.hpp"

#include "flowopt/errors.hpp"
#include "flowopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace flowopt {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr std::string_view kModelHeader = "flowopt-mlp v1";

void check_dimensions(const MlpModel& model) {
    if (model.hidden_count < 1 || model.output_count < 1)
        throw std::invalid_argument("model layer sizes must be positive");
    if (model.hidden_weights.size() != static_cast<std::size_t>(model.hidden_count) * 2)
        throw std::invalid_argument("hidden weight count does not match layer size");
    if (model.output_weights.size() !=
        static_cast<std::size_t>(model.output_count) * static_cast<std::size_t>(model.hidden_count))
        throw std::invalid_argument("output weight count does not match layer sizes");
    if (model.output_scales.size() != static_cast<std::size_t>(model.output_count))
        throw std::invalid_argument("output scale count does not match layer size");
    if (!(model.input_min < model.input_max))
        throw std::invalid_argument("input scale bounds must satisfy min < max");
}

std::vector<double> normalized_targets(const MlpModel& model, std::span<const double> target_flows) {
    if (target_flows.size() != static_cast<std::size_t>(model.output_count))
        throw std::invalid_argument("target length does not match output count");
    std::vector<double> targets(target_flows.size());
    for (std::size_t k = 0; k < targets.size(); ++k)
        targets[k] = target_flows[k] / model.output_scales[k];
    return targets;
}

} // namespace

void MlpModel::forward_normalized(double load_kbps, std::span<double> hidden_out,
                                  std::span<double> output_out) const {
    const double x = (load_kbps - input_min) / (input_max - input_min);
    for (int j = 0; j < hidden_count; ++j) {
        const double w = hidden_weights[static_cast<std::size_t>(j) * 2];
        const double b = hidden_weights[static_cast<std::size_t>(j) * 2 + 1];
        hidden_out[static_cast<std::size_t>(j)] = sigmoid(w * x + b);
    }
    for (int k = 0; k < output_count; ++k) {
        double z = 0.0;
        const std::size_t row = static_cast<std::size_t>(k) * static_cast<std::size_t>(hidden_count);
        for (int j = 0; j < hidden_count; ++j)
            z += output_weights[row + static_cast<std::size_t>(j)] *
                 hidden_out[static_cast<std::size_t>(j)];
        output_out[static_cast<std::size_t>(k)] = sigmoid(z);
    }
}

std::vector<double> MlpModel::forward(double load_kbps) const {
    std::vector<double> hidden(static_cast<std::size_t>(hidden_count));
    std::vector<double> outputs(static_cast<std::size_t>(output_count));
    forward_normalized(load_kbps, hidden, outputs);
    for (int k = 0; k < output_count; ++k)
        outputs[static_cast<std::size_t>(k)] *= output_scales[static_cast<std::size_t>(k)];
    return outputs;
}

MlpModel make_model(const NetworkTopology& topology, int hidden_count) {
    if (hidden_count < 1) throw std::invalid_argument("hidden count must be positive");
    MlpModel model;
    model.hidden_count = hidden_count;
    model.output_count = static_cast<int>(topology.link_count());
    model.hidden_weights.assign(static_cast<std::size_t>(hidden_count) * 2, 0.0);
    model.output_weights.assign(
        static_cast<std::size_t>(model.output_count) * static_cast<std::size_t>(hidden_count), 0.0);
    model.input_min = 0.0;
    model.input_max = topology.total_capacity_kbps();
    model.output_scales = topology.capacities();
    return model;
}

double sample_loss(const MlpModel& model, double load_kbps, std::span<const double> target_flows) {
    const std::vector<double> targets = normalized_targets(model, target_flows);
    std::vector<double> hidden(static_cast<std::size_t>(model.hidden_count));
    std::vector<double> outputs(static_cast<std::size_t>(model.output_count));
    model.forward_normalized(load_kbps, hidden, outputs);
    double loss = 0.0;
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        const double err = outputs[k] - targets[k];
        loss += 0.5 * err * err;
    }
    return loss;
}

void sample_gradients(const MlpModel& model, double load_kbps,
                      std::span<const double> target_flows,
                      std::span<double> hidden_grad, std::span<double> output_grad) {
    const std::vector<double> targets = normalized_targets(model, target_flows);
    const double x = (load_kbps - model.input_min) / (model.input_max - model.input_min);
    std::vector<double> hidden(static_cast<std::size_t>(model.hidden_count));
    std::vector<double> outputs(static_cast<std::size_t>(model.output_count));
    model.forward_normalized(load_kbps, hidden, outputs);

    std::vector<double> output_delta(outputs.size());
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        const double o = outputs[k];
        output_delta[k] = (o - targets[k]) * o * (1.0 - o);
    }
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        const std::size_t row = k * static_cast<std::size_t>(model.hidden_count);
        for (std::size_t j = 0; j < hidden.size(); ++j)
            output_grad[row + j] = output_delta[k] * hidden[j];
    }
    for (std::size_t j = 0; j < hidden.size(); ++j) {
        double back = 0.0;
        for (std::size_t k = 0; k < outputs.size(); ++k)
            back += output_delta[k] *
                    model.output_weights[k * static_cast<std::size_t>(model.hidden_count) + j];
        const double hidden_delta = back * hidden[j] * (1.0 - hidden[j]);
        hidden_grad[j * 2] = hidden_delta * x;
        hidden_grad[j * 2 + 1] = hidden_delta;
    }
}

void backprop_step(MlpModel& model, double load_kbps, std::span<const double> target_flows,
                   const TrainConfig& config, MlpVelocity& velocity) {
    std::vector<double> hidden_grad(model.hidden_weights.size());
    std::vector<double> output_grad(model.output_weights.size());
    sample_gradients(model, load_kbps, target_flows, hidden_grad, output_grad);
    for (std::size_t i = 0; i < model.hidden_weights.size(); ++i) {
        velocity.hidden[i] = config.momentum * velocity.hidden[i] -
                             config.learning_rate * hidden_grad[i];
        model.hidden_weights[i] += velocity.hidden[i];
    }
    for (std::size_t i = 0; i < model.output_weights.size(); ++i) {
        velocity.output[i] = config.momentum * velocity.output[i] -
                             config.learning_rate * output_grad[i];
        model.output_weights[i] += velocity.output[i];
    }
}

TrainOutput train_mlp(const NetworkTopology& topology, std::span<const TrainSample> samples,
                      const TrainConfig& config) {
    if (samples.empty()) throw std::invalid_argument("training dataset is empty");
    if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (config.momentum < 0.0 || config.momentum >= 1.0)
        throw std::invalid_argument("momentum must be in [0, 1)");
    if (config.max_epochs < 1) throw std::invalid_argument("max_epochs must be at least 1");
    for (const TrainSample& s : samples) {
        if (s.flows_kbps.size() != topology.link_count())
            throw std::invalid_argument("sample flow length does not match link count");
        for (std::size_t i = 0; i < s.flows_kbps.size(); ++i)
            if (s.flows_kbps[i] < 0.0 || s.flows_kbps[i] >= topology.capacity(i))
                throw std::invalid_argument("sample target flows must be capacity-feasible");
    }

    Rng rng(config.seed);
    MlpModel model = make_model(topology, config.hidden_count);
    for (double& w : model.hidden_weights)
        w = rng.uniform(config.weight_init_lo, config.weight_init_hi);
    for (double& w : model.output_weights)
        w = rng.uniform(config.weight_init_lo, config.weight_init_hi);

    MlpVelocity velocity;
    velocity.hidden.assign(model.hidden_weights.size(), 0.0);
    velocity.output.assign(model.output_weights.size(), 0.0);

    const auto dataset_mse = [&]() {
        double total = 0.0;
        for (const TrainSample& s : samples) total += sample_loss(model, s.load_kbps, s.flows_kbps);
        // 0.5 * sum of squares per sample -> plain mean squared error
        return 2.0 * total / (static_cast<double>(samples.size()) *
                              static_cast<double>(model.output_count));
    };

    TrainOutput out;
    out.mse_history.reserve(static_cast<std::size_t>(config.max_epochs) + 1);
    out.mse_history.push_back(dataset_mse());

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        // Fisher-Yates off the run generator; the shuffle stream is part of
        // the seed contract.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
        for (const std::size_t idx : order)
            backprop_step(model, samples[idx].load_kbps, samples[idx].flows_kbps, config, velocity);
        out.mse_history.push_back(dataset_mse());
    }
    out.model = std::move(model);
    return out;
}

std::string model_to_text(const MlpModel& model) {
    check_dimensions(model);
    std::string out(kModelHeader);
    out += "\n1 " + std::to_string(model.hidden_count) + ' ' + std::to_string(model.output_count);
    out += '\n' + format_double(model.input_min) + ' ' + format_double(model.input_max);
    for (double s : model.output_scales) out += ' ' + format_double(s);
    out += '\n';
    for (int j = 0; j < model.hidden_count; ++j) {
        out += format_double(model.hidden_weights[static_cast<std::size_t>(j) * 2]);
        out += ' ' + format_double(model.hidden_weights[static_cast<std::size_t>(j) * 2 + 1]);
        out += '\n';
    }
    for (int k = 0; k < model.output_count; ++k) {
        const std::size_t row = static_cast<std::size_t>(k) * static_cast<std::size_t>(model.hidden_count);
        for (int j = 0; j < model.hidden_count; ++j) {
            if (j > 0) out += ' ';
            out += format_double(model.output_weights[row + static_cast<std::size_t>(j)]);
        }
        out += '\n';
    }
    return out;
}

MlpModel model_from_text(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("malformed model file: empty");
    if (lines[0] != kModelHeader)
        throw ParseError("unsupported model version: '" + std::string(lines[0]) + "'");
    if (lines.size() < 3) throw ParseError("malformed model file: missing layer sizes or scales");

    const auto parse_row = [](std::string_view line, std::size_t line_no) {
        std::vector<double> values;
        std::istringstream ss{std::string(line)};
        double v = 0.0;
        while (ss >> v) values.push_back(v);
        std::string trailing;
        ss.clear();
        if (ss >> trailing)
            throw ParseError("line " + std::to_string(line_no) + ": non-numeric field");
        return values;
    };

    std::istringstream sizes{std::string(lines[1])};
    int inputs = 0, hidden = 0, outputs = 0;
    if (!(sizes >> inputs >> hidden >> outputs) || inputs != 1 || hidden < 1 || outputs < 1)
        throw ParseError("line 2: bad layer sizes (expected '1 <hidden> <outputs>')");

    MlpModel model;
    model.hidden_count = hidden;
    model.output_count = outputs;

    const std::vector<double> scales = parse_row(lines[2], 3);
    if (scales.size() != static_cast<std::size_t>(outputs) + 2)
        throw ParseError("line 3: expected input bounds plus one scale per output");
    model.input_min = scales[0];
    model.input_max = scales[1];
    model.output_scales.assign(scales.begin() + 2, scales.end());

    const std::size_t expected_lines = 3 + static_cast<std::size_t>(hidden) +
                                       static_cast<std::size_t>(outputs);
    if (lines.size() < expected_lines)
        throw ParseError("model file truncated: expected " + std::to_string(expected_lines) +
                         " lines, got " + std::to_string(lines.size()));

    for (int j = 0; j < hidden; ++j) {
        const std::size_t line_no = 4 + static_cast<std::size_t>(j);
        const auto row = parse_row(lines[line_no - 1], line_no);
        if (row.size() != 2)
            throw ParseError("line " + std::to_string(line_no) +
                             ": hidden row needs weight and bias");
        model.hidden_weights.push_back(row[0]);
        model.hidden_weights.push_back(row[1]);
    }
    for (int k = 0; k < outputs; ++k) {
        const std::size_t line_no = 4 + static_cast<std::size_t>(hidden) + static_cast<std::size_t>(k);
        const auto row = parse_row(lines[line_no - 1], line_no);
        if (row.size() != static_cast<std::size_t>(hidden))
            throw ParseError("line " + std::to_string(line_no) + ": output row needs " +
                             std::to_string(hidden) + " weights");
        model.output_weights.insert(model.output_weights.end(), row.begin(), row.end());
    }
    check_dimensions(model);
    return model;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
    write_text_file(path, model_to_text(model));
}

MlpModel load_model(const std::filesystem::path& path) {
    try {
        return model_from_text(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace flowopt
