#include "padback/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "padback/errors.hpp"
#include "padback/kernels.hpp"
#include "padback/rng.hpp"

namespace padback {

std::size_t Classifier::masked_count() const {
  return static_cast<std::size_t>(std::count(prune_mask.begin(), prune_mask.end(), 0));
}

std::vector<std::size_t> Classifier::layer_dims() const {
  std::vector<std::size_t> dims;
  if (layers.empty()) return dims;
  dims.push_back(layers.front().in);
  for (const auto& l : layers) dims.push_back(l.out);
  return dims;
}

std::size_t Classifier::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void validate_classifier(const Classifier& model) {
  require(model.layers.size() >= 2, "classifier: needs at least one hidden layer");
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    const std::string where = "classifier layer " + std::to_string(l);
    require(layer.in > 0 && layer.out > 0, where + ": zero width");
    require(layer.weights.size() == layer.in * layer.out, where + ": weight size mismatch");
    require(layer.bias.size() == layer.out, where + ": bias size mismatch");
    if (l > 0) require(model.layers[l - 1].out == layer.in, where + ": dimensions do not chain");
    for (double w : layer.weights) require(std::isfinite(w), where + ": non-finite weight");
    for (double b : layer.bias) require(std::isfinite(b), where + ": non-finite bias");
  }
  require(model.prune_mask.size() == model.layers[model.layers.size() - 2].out,
          "classifier: prune mask width does not match the last hidden layer");
  require(model.input_mean.size() == model.input_dim() &&
              model.input_scale.size() == model.input_dim(),
          "classifier: input standardization size mismatch");
}

Classifier init_classifier(std::span<const std::size_t> dims, std::uint64_t seed) {
  require(dims.size() >= 3, "init: need [input, hidden..., classes]");
  for (std::size_t d : dims) require(d > 0, "init: layer width must be positive");
  Rng rng(seed);
  Classifier model;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    layer.weights.resize(layer.in * layer.out);
    for (double& w : layer.weights) w = rng.uniform(-bound, bound);
    layer.bias.assign(layer.out, 0.0);
    model.layers.push_back(std::move(layer));
  }
  model.prune_mask.assign(dims[dims.size() - 2], 1);
  model.input_mean.assign(dims.front(), 0.0);
  model.input_scale.assign(dims.front(), 1.0);
  return model;
}

Gradients Gradients::zeros_like(const Classifier& model) {
  Gradients g;
  for (const auto& l : model.layers) {
    g.weights.emplace_back(l.weights.size(), 0.0);
    g.bias.emplace_back(l.bias.size(), 0.0);
  }
  return g;
}

void Gradients::set_zero() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
}

void Gradients::scale(double factor) {
  for (auto& w : weights) for (double& x : w) x *= factor;
  for (auto& b : bias) for (double& x : b) x *= factor;
}

bool Gradients::all_finite() const {
  for (const auto& w : weights) for (double x : w) if (!std::isfinite(x)) return false;
  for (const auto& b : bias) for (double x : b) if (!std::isfinite(x)) return false;
  return true;
}

void forward_into(const Classifier& model, std::span<const double> features, Workspace& ws) {
  if (features.size() != model.input_dim()) {
    throw ValidationError("forward: feature dimension " + std::to_string(features.size()) +
                          " does not match classifier input " +
                          std::to_string(model.input_dim()));
  }
  const std::size_t num_layers = model.layers.size();
  ws.act.resize(num_layers + 1);
  ws.act[0].resize(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    ws.act[0][i] = (features[i] - model.input_mean[i]) * model.input_scale[i];
  }
  for (std::size_t l = 0; l < num_layers; ++l) {
    const auto& layer = model.layers[l];
    const auto& in = ws.act[l];
    auto& out = ws.act[l + 1];
    out.resize(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* w = layer.weights.data() + r * layer.in;
      double z = layer.bias[r];
      for (std::size_t c = 0; c < layer.in; ++c) z += w[c] * in[c];
      out[r] = z;
    }
    if (l + 1 < num_layers) {
      for (double& v : out) v = v > 0.0 ? v : 0.0;
      if (l + 2 == num_layers) {
        for (std::size_t r = 0; r < layer.out; ++r) {
          if (!model.prune_mask[r]) out[r] = 0.0;
        }
      }
    }
  }

  const auto& logits = ws.act[num_layers];
  ws.probs.resize(logits.size());
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    ws.probs[k] = std::exp(logits[k] - peak);
    sum += ws.probs[k];
  }
  for (double& p : ws.probs) p /= sum;
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
  require(label < probs.size(), "cross_entropy: label " + std::to_string(label) +
                                    " out of range for " + std::to_string(probs.size()) +
                                    " classes");
  return -std::log(std::max(probs[label], 1e-12));
}

double backprop_deltas(const Classifier& model, std::size_t label, Workspace& ws) {
  const double loss = cross_entropy(ws.probs, label);
  const std::size_t num_layers = model.layers.size();
  ws.delta.resize(num_layers);
  auto& top = ws.delta[num_layers - 1];
  top = ws.probs;
  top[label] -= 1.0;
  for (std::size_t l = num_layers - 1; l-- > 0;) {
    const auto& next = model.layers[l + 1];
    const auto& next_delta = ws.delta[l + 1];
    auto& d = ws.delta[l];
    d.assign(next.in, 0.0);
    for (std::size_t r = 0; r < next.out; ++r) {
      const double g = next_delta[r];
      const double* w = next.weights.data() + r * next.in;
      for (std::size_t c = 0; c < next.in; ++c) d[c] += w[c] * g;
    }
    // act[l + 1] is zero for inactive ReLUs and for masked neurons.
    const auto& a = ws.act[l + 1];
    for (std::size_t c = 0; c < d.size(); ++c) {
      if (!(a[c] > 0.0)) d[c] = 0.0;
    }
  }
  return loss;
}

void add_sample_gradient(const Workspace& ws, Gradients& grads) {
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    const auto& d = ws.delta[l];
    const auto& a = ws.act[l];
    auto& gw = grads.weights[l];
    const std::size_t in = a.size();
    for (std::size_t r = 0; r < d.size(); ++r) {
      double* row = gw.data() + r * in;
      for (std::size_t c = 0; c < in; ++c) row[c] += d[r] * a[c];
      grads.bias[l][r] += d[r];
    }
  }
}

std::vector<double> forward(const Classifier& model, std::span<const double> features) {
  Workspace ws;
  forward_into(model, features, ws);
  return ws.probs;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::size_t predict(const Classifier& model, std::span<const double> features) {
  Workspace ws;
  forward_into(model, features, ws);
  return argmax(ws.probs);
}

Gradients backward(const Classifier& model, std::span<const double> features, std::size_t label) {
  require(label < model.num_classes(), "backward: label out of range");
  Workspace ws;
  forward_into(model, features, ws);
  backprop_deltas(model, label, ws);
  Gradients g = Gradients::zeros_like(model);
  add_sample_gradient(ws, g);
  return g;
}

void TrainConfig::validate() const {
  require(epochs >= 1, "train: epochs must be >= 1");
  require(batch_size >= 1, "train: batch_size must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "train: learning_rate must be > 0");
  require(momentum >= 0.0 && momentum < 1.0, "train: momentum must be in [0, 1)");
  require(min_std >= 0.0 && std::isfinite(min_std), "train: min_std must be >= 0");
  require(weight_decay >= 0.0 && std::isfinite(weight_decay), "train: weight_decay must be >= 0");
}

namespace {

void fit_standardizer(Classifier& model, const Matrix& features, double min_std) {
  const std::size_t n = features.rows, d = features.cols;
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += features(r, c);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = features(r, c) - mean;
      sq += dev * dev;
    }
    const double sd = std::max(std::sqrt(sq / static_cast<double>(n)), min_std);
    model.input_mean[c] = mean;
    model.input_scale[c] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
}

}  // namespace

TrainResult train(Classifier model, const Matrix& features, std::span<const std::size_t> labels,
                  const TrainConfig& config) {
  config.validate();
  validate_classifier(model);
  require(features.rows > 0, "train: empty dataset");
  require(features.rows == labels.size(), "train: feature/label count mismatch");
  require(features.cols == model.input_dim(),
          "train: feature dimension " + std::to_string(features.cols) +
              " does not match classifier input " + std::to_string(model.input_dim()));
  for (std::size_t y : labels) require(y < model.num_classes(), "train: label out of range");

  if (config.standardize_inputs) fit_standardizer(model, features, config.min_std);

  Gradients grads = Gradients::zeros_like(model);
  Gradients velocity = Gradients::zeros_like(model);
  kernels::BatchScratch scratch;
  Rng rng(config.seed);
  std::vector<std::size_t> order(features.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) shuffle(std::span<std::size_t>(order), rng);
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      const double loss = kernels::omp::accumulate_gradients(model, features, labels, batch,
                                                             scratch, grads);
      grads.scale(1.0 / static_cast<double>(batch.size()));
      if (config.weight_decay > 0.0) {
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
          const auto& w = model.layers[l].weights;
          auto& g = grads.weights[l];
          for (std::size_t i = 0; i < w.size(); ++i) g[i] += config.weight_decay * w[i];
        }
      }
      if (!std::isfinite(loss) || !grads.all_finite()) {
        throw NumericError("train: non-finite loss or gradient at epoch " +
                           std::to_string(epoch + 1) + ", batch " + std::to_string(batch_no + 1));
      }
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& layer = model.layers[l];
        if (config.optimizer == Optimizer::Momentum) {
          auto& vw = velocity.weights[l];
          auto& vb = velocity.bias[l];
          for (std::size_t i = 0; i < vw.size(); ++i) {
            vw[i] = config.momentum * vw[i] - config.learning_rate * grads.weights[l][i];
            layer.weights[i] += vw[i];
          }
          for (std::size_t i = 0; i < vb.size(); ++i) {
            vb[i] = config.momentum * vb[i] - config.learning_rate * grads.bias[l][i];
            layer.bias[i] += vb[i];
          }
        } else {
          for (std::size_t i = 0; i < layer.weights.size(); ++i) {
            layer.weights[i] -= config.learning_rate * grads.weights[l][i];
          }
          for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            layer.bias[i] -= config.learning_rate * grads.bias[l][i];
          }
        }
      }
    }

    const auto summary = kernels::omp::evaluate(model, features, labels);
    const double n = static_cast<double>(features.rows);
    if (!std::isfinite(summary.loss_sum)) {
      throw NumericError("train: non-finite training loss after epoch " + std::to_string(epoch + 1));
    }
    result.trace.push_back({epoch + 1, summary.loss_sum / n, static_cast<double>(summary.correct) / n});
  }
  result.model = std::move(model);
  return result;
}

std::vector<double> mean_last_hidden_activation(const Classifier& model, const Matrix& features) {
  return kernels::omp::mean_last_hidden_activation(model, features);
}

Classifier prune_last_hidden(Classifier model, const Matrix& clean_validation_features,
                             double ratio) {
  require(ratio >= 0.0 && ratio < 1.0, "prune: ratio must be in [0, 1)");
  require(clean_validation_features.rows > 0, "prune: empty validation set");
  validate_classifier(model);
  const std::size_t width = model.last_hidden_width();
  const auto target = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(width) + 1e-9));
  if (target <= model.masked_count()) return model;

  const auto activation = mean_last_hidden_activation(model, clean_validation_features);
  std::vector<std::size_t> order(width);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool ma = !model.prune_mask[a], mb = !model.prune_mask[b];
    if (ma != mb) return ma;
    return activation[a] < activation[b];
  });
  for (std::size_t i = 0; i < target; ++i) model.prune_mask[order[i]] = 0;
  return model;
}

}  // namespace padback
