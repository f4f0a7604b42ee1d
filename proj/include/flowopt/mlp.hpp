#pragma once

#include "flowopt/network.hpp"
#include "flowopt/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace flowopt {

/// Feed-forward load-to-flow predictor: one input (total load), a sigmoid
/// hidden layer with bias, and one sigmoid output per link with no output
/// bias. The input is normalized by the load bounds and each output is scaled
/// by its link capacity, so predictions are capacity-feasible by construction.
struct MlpModel {
    int hidden_count = 7;
    int output_count = 0;
    std::vector<double> hidden_weights; // hidden_count rows of [weight, bias]
    std::vector<double> output_weights; // output_count rows of hidden_count weights
    double input_min = 0.0;
    double input_max = 1.0;
    std::vector<double> output_scales; // per-link denormalization constants

    /// Predicted per-link flows in kbps. Extrapolation beyond the input
    /// bounds is permitted; outputs stay within [0, scale_j] regardless.
    std::vector<double> forward(double load_kbps) const;

    /// Hidden activations and normalized outputs for one input; used by
    /// training and the tests.
    void forward_normalized(double load_kbps, std::span<double> hidden_out,
                            std::span<double> output_out) const;
};

struct TrainConfig {
    double learning_rate = 0.9;
    double momentum = 0.2;
    int max_epochs = 5000;
    double weight_init_lo = -0.5;
    double weight_init_hi = 0.5;
    std::uint64_t seed = 1;
    int hidden_count = 7;
};

struct TrainSample {
    double load_kbps = 0.0;
    std::vector<double> flows_kbps;
};

/// Momentum state: previous weight deltas, same layout as the model weights.
struct MlpVelocity {
    std::vector<double> hidden;
    std::vector<double> output;
};

/// Zero-weight model shaped for a topology: output scales are the link
/// capacities and the input range is [0, total capacity].
MlpModel make_model(const NetworkTopology& topology, int hidden_count = 7);

/// Squared-error loss 0.5 * sum_k (o_k - t_k)^2 over normalized outputs.
double sample_loss(const MlpModel& model, double load_kbps, std::span<const double> target_flows);

/// Analytic loss gradients for one sample, laid out like the weight vectors.
void sample_gradients(const MlpModel& model, double load_kbps,
                      std::span<const double> target_flows,
                      std::span<double> hidden_grad, std::span<double> output_grad);

/// One online update: delta = momentum * previous_delta - lr * gradient.
void backprop_step(MlpModel& model, double load_kbps, std::span<const double> target_flows,
                   const TrainConfig& config, MlpVelocity& velocity);

struct TrainOutput {
    MlpModel model;
    std::vector<double> mse_history; // entry 0 = before training, then one per epoch
};

/// Online training over shuffled epochs with uniform weight init in
/// [weight_init_lo, weight_init_hi]; fully reproducible from the seed.
TrainOutput train_mlp(const NetworkTopology& topology, std::span<const TrainSample> samples,
                      const TrainConfig& config);

/// Versioned text format; decimal serialization round-trips exactly.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

std::string model_to_text(const MlpModel& model);
MlpModel model_from_text(std::string_view text);

} // namespace flowopt
