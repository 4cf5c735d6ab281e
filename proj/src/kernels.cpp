#include "padback/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <string>

#include "padback/errors.hpp"

namespace padback::kernels {
namespace {

void check_batch(const Classifier& model, const Matrix& features,
                 std::span<const std::size_t> labels, std::span<const std::size_t> batch) {
  require(features.cols == model.input_dim(), "kernels: feature dimension mismatch");
  require(labels.size() == features.rows, "kernels: feature/label count mismatch");
  for (std::size_t i : batch) {
    require(i < features.rows, "kernels: batch index out of range");
    require(labels[i] < model.num_classes(), "kernels: label out of range");
  }
}

Classifier unmasked(const Classifier& model) {
  Classifier copy = model;
  std::fill(copy.prune_mask.begin(), copy.prune_mask.end(), std::uint8_t{1});
  return copy;
}

// Runs body(i) for i in [0, n) in parallel and rethrows the first exception
// on the calling thread.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(padback_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

namespace serial {

Matrix extract_features(std::span<const AudioClip* const> clips, const FeatureExtractor& extractor) {
  Matrix out(clips.size(), extractor.config().dim());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto v = extractor(*clips[i]);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

double accumulate_gradients(const Classifier& model, const Matrix& features,
                            std::span<const std::size_t> labels,
                            std::span<const std::size_t> batch, BatchScratch& scratch,
                            Gradients& out) {
  check_batch(model, features, labels, batch);
  out.set_zero();
  if (scratch.slots.empty()) scratch.slots.resize(1);
  auto& ws = scratch.slots.front();
  double loss = 0.0;
  for (std::size_t i : batch) {
    forward_into(model, features.row(i), ws);
    loss += backprop_deltas(model, labels[i], ws);
    add_sample_gradient(ws, out);
  }
  return loss;
}

std::vector<std::size_t> predict(const Classifier& model, const Matrix& features) {
  std::vector<std::size_t> out(features.rows);
  Workspace ws;
  for (std::size_t i = 0; i < features.rows; ++i) {
    forward_into(model, features.row(i), ws);
    out[i] = argmax(ws.probs);
  }
  return out;
}

EvalSummary evaluate(const Classifier& model, const Matrix& features,
                     std::span<const std::size_t> labels) {
  require(labels.size() == features.rows, "kernels: feature/label count mismatch");
  EvalSummary s;
  Workspace ws;
  for (std::size_t i = 0; i < features.rows; ++i) {
    forward_into(model, features.row(i), ws);
    s.loss_sum += cross_entropy(ws.probs, labels[i]);
    if (argmax(ws.probs) == labels[i]) ++s.correct;
  }
  return s;
}

std::vector<double> mean_last_hidden_activation(const Classifier& model, const Matrix& features) {
  require(features.rows > 0, "kernels: empty feature matrix");
  const Classifier open = unmasked(model);
  const std::size_t hidden = open.layers.size() - 1;
  std::vector<double> sum(open.last_hidden_width(), 0.0);
  Workspace ws;
  for (std::size_t i = 0; i < features.rows; ++i) {
    forward_into(open, features.row(i), ws);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += ws.act[hidden][j];
  }
  for (double& v : sum) v /= static_cast<double>(features.rows);
  return sum;
}

}  // namespace serial

namespace omp {

Matrix extract_features(std::span<const AudioClip* const> clips, const FeatureExtractor& extractor) {
  Matrix out(clips.size(), extractor.config().dim());
  parallel_for(static_cast<std::int64_t>(clips.size()), [&](std::size_t i) {
    const auto v = extractor(*clips[i]);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  });
  return out;
}

double accumulate_gradients(const Classifier& model, const Matrix& features,
                            std::span<const std::size_t> labels,
                            std::span<const std::size_t> batch, BatchScratch& scratch,
                            Gradients& out) {
  check_batch(model, features, labels, batch);
  if (scratch.slots.size() < batch.size()) scratch.slots.resize(batch.size());
  std::vector<double> losses(batch.size());

  // Phase 1: per-sample forward and delta propagation.
  parallel_for(static_cast<std::int64_t>(batch.size()), [&](std::size_t s) {
    auto& ws = scratch.slots[s];
    forward_into(model, features.row(batch[s]), ws);
    losses[s] = backprop_deltas(model, labels[batch[s]], ws);
  });

  // Phase 2: parameter rows in parallel, samples summed in batch order so the
  // result matches the serial accumulation exactly.
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (std::size_t r = 0; r < model.layers[l].out; ++r) rows.emplace_back(l, r);
  }
  parallel_for(static_cast<std::int64_t>(rows.size()), [&](std::size_t k) {
    const auto [l, r] = rows[k];
    const std::size_t in = model.layers[l].in;
    double* gw = out.weights[l].data() + r * in;
    std::fill(gw, gw + in, 0.0);
    double gb = 0.0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
      const auto& ws = scratch.slots[s];
      const double d = ws.delta[l][r];
      const double* a = ws.act[l].data();
      for (std::size_t c = 0; c < in; ++c) gw[c] += d * a[c];
      gb += d;
    }
    out.bias[l][r] = gb;
  });

  double loss = 0.0;
  for (double v : losses) loss += v;
  return loss;
}

std::vector<std::size_t> predict(const Classifier& model, const Matrix& features) {
  std::vector<std::size_t> out(features.rows);
  parallel_for(static_cast<std::int64_t>(features.rows), [&](std::size_t i) {
    thread_local Workspace ws;
    forward_into(model, features.row(i), ws);
    out[i] = argmax(ws.probs);
  });
  return out;
}

EvalSummary evaluate(const Classifier& model, const Matrix& features,
                     std::span<const std::size_t> labels) {
  require(labels.size() == features.rows, "kernels: feature/label count mismatch");
  std::vector<double> losses(features.rows);
  std::vector<std::uint8_t> hit(features.rows);
  parallel_for(static_cast<std::int64_t>(features.rows), [&](std::size_t i) {
    thread_local Workspace ws;
    forward_into(model, features.row(i), ws);
    losses[i] = cross_entropy(ws.probs, labels[i]);
    hit[i] = argmax(ws.probs) == labels[i];
  });
  EvalSummary s;
  for (std::size_t i = 0; i < features.rows; ++i) {
    s.loss_sum += losses[i];
    s.correct += hit[i];
  }
  return s;
}

std::vector<double> mean_last_hidden_activation(const Classifier& model, const Matrix& features) {
  require(features.rows > 0, "kernels: empty feature matrix");
  const Classifier open = unmasked(model);
  const std::size_t hidden = open.layers.size() - 1;
  const std::size_t width = open.last_hidden_width();
  Matrix acts(features.rows, width);
  parallel_for(static_cast<std::int64_t>(features.rows), [&](std::size_t i) {
    thread_local Workspace ws;
    forward_into(open, features.row(i), ws);
    std::copy(ws.act[hidden].begin(), ws.act[hidden].end(), acts.row(i).begin());
  });
  std::vector<double> sum(width, 0.0);
  for (std::size_t i = 0; i < features.rows; ++i) {
    for (std::size_t j = 0; j < width; ++j) sum[j] += acts(i, j);
  }
  for (double& v : sum) v /= static_cast<double>(features.rows);
  return sum;
}

}  // namespace omp

}  // namespace padback::kernels
