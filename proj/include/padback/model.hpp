#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "padback/features.hpp"
#include "padback/matrix.hpp"

namespace padback {

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out

  double weight(std::size_t row, std::size_t col) const { return weights[row * in + col]; }
  bool operator==(const DenseLayer&) const = default;
};

// Multilayer perceptron: ReLU hidden layers, softmax output. Inputs pass
// through a fixed per-dimension standardization first (identity until fitted
// by train()). prune_mask gates the last hidden layer; 1 = active.
struct Classifier {
  std::vector<DenseLayer> layers;
  std::vector<std::uint8_t> prune_mask;
  std::vector<double> input_mean;
  std::vector<double> input_scale;
  std::string feature_fingerprint;

  std::size_t input_dim() const { return layers.front().in; }
  std::size_t num_classes() const { return layers.back().out; }
  std::size_t last_hidden_width() const { return prune_mask.size(); }
  std::size_t masked_count() const;
  std::vector<std::size_t> layer_dims() const;
  std::size_t parameter_count() const;

  bool operator==(const Classifier&) const = default;
};

// Checks dimension chaining and that every parameter is finite.
void validate_classifier(const Classifier& model);

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases. Needs at least
// one hidden layer: dims = [input, hidden..., classes].
Classifier init_classifier(std::span<const std::size_t> dims, std::uint64_t seed);

// Per-sample scratch: activations by layer (act[0] is the standardized
// input, act.back() the logits), softmax output and backpropagated deltas.
struct Workspace {
  std::vector<std::vector<double>> act;
  std::vector<std::vector<double>> delta;
  std::vector<double> probs;
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;

  static Gradients zeros_like(const Classifier& model);
  void set_zero();
  void scale(double factor);
  bool all_finite() const;
};

void forward_into(const Classifier& model, std::span<const double> features, Workspace& ws);
// Requires forward_into on the same workspace. Fills ws.delta and returns the loss.
double backprop_deltas(const Classifier& model, std::size_t label, Workspace& ws);
// grads += d loss / d params for the sample held in ws.
void add_sample_gradient(const Workspace& ws, Gradients& grads);

std::vector<double> forward(const Classifier& model, std::span<const double> features);
std::size_t predict(const Classifier& model, std::span<const double> features);
std::size_t argmax(std::span<const double> values);

// -log(max(probs[label], 1e-12)).
double cross_entropy(std::span<const double> probs, std::size_t label);

Gradients backward(const Classifier& model, std::span<const double> features, std::size_t label);

enum class Optimizer { SGD, Momentum };

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  Optimizer optimizer = Optimizer::Momentum;
  double momentum = 0.9;
  double weight_decay = 0.0;  // L2 penalty on weights (not biases)
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
  bool standardize_inputs = true;
  // Floor on the per-dimension std of the fitted standardizer. Pooled std
  // features of stationary bands barely vary across utterances; without a
  // floor a tiny shift in them becomes a huge standardized input.
  double min_std = 0.75;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;      // mean cross-entropy over the training set after the epoch
  double accuracy = 0.0;  // training accuracy after the epoch
};

struct TrainResult {
  Classifier model;
  std::vector<EpochStats> trace;
};

// Mini-batch empirical risk minimization of mean cross-entropy. Throws
// NumericError naming the epoch and batch on a non-finite loss or gradient.
TrainResult train(Classifier model, const Matrix& features, std::span<const std::size_t> labels,
                  const TrainConfig& config);

// Mean activation (post-ReLU, before masking) of each last-hidden neuron.
std::vector<double> mean_last_hidden_activation(const Classifier& model, const Matrix& features);

// Masks the floor(ratio * width) least-active last-hidden neurons on clean
// validation data. Already-masked neurons count toward the total and stay
// masked.
Classifier prune_last_hidden(Classifier model, const Matrix& clean_validation_features,
                             double ratio);

}  // namespace padback
