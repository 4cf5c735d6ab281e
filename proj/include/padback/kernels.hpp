#pragma once

// Data-parallel hot loops. Each kernel has a straightforward serial
// reference and an OpenMP version; the two produce bit-identical results
// (reductions run in a fixed index order), which the kernel tests assert.

#include <cstddef>
#include <span>
#include <vector>

#include "padback/audio.hpp"
#include "padback/features.hpp"
#include "padback/matrix.hpp"
#include "padback/model.hpp"

namespace padback::kernels {

// Reusable per-sample workspaces for batched backpropagation.
struct BatchScratch {
  std::vector<Workspace> slots;
};

struct EvalSummary {
  double loss_sum = 0.0;
  std::size_t correct = 0;
};

namespace serial {

// One pooled feature vector per clip, one clip per row.
Matrix extract_features(std::span<const AudioClip* const> clips, const FeatureExtractor& extractor);

// out = sum over batch of per-sample gradients; returns the summed loss.
double accumulate_gradients(const Classifier& model, const Matrix& features,
                            std::span<const std::size_t> labels,
                            std::span<const std::size_t> batch, BatchScratch& scratch,
                            Gradients& out);

std::vector<std::size_t> predict(const Classifier& model, const Matrix& features);

EvalSummary evaluate(const Classifier& model, const Matrix& features,
                     std::span<const std::size_t> labels);

std::vector<double> mean_last_hidden_activation(const Classifier& model, const Matrix& features);

}  // namespace serial

namespace omp {

Matrix extract_features(std::span<const AudioClip* const> clips, const FeatureExtractor& extractor);

double accumulate_gradients(const Classifier& model, const Matrix& features,
                            std::span<const std::size_t> labels,
                            std::span<const std::size_t> batch, BatchScratch& scratch,
                            Gradients& out);

std::vector<std::size_t> predict(const Classifier& model, const Matrix& features);

EvalSummary evaluate(const Classifier& model, const Matrix& features,
                     std::span<const std::size_t> labels);

std::vector<double> mean_last_hidden_activation(const Classifier& model, const Matrix& features);

}  // namespace omp

}  // namespace padback::kernels
