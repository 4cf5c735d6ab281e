#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <span>
#include <vector>

#include "padback/dataset.hpp"
#include "padback/eval.hpp"
#include "padback/features.hpp"
#include "padback/model.hpp"
#include "padback/report.hpp"

namespace padback {

struct ExperimentSettings {
  FeatureConfig features;
  TrainConfig train;
  std::vector<std::size_t> hidden{128, 128};
  std::uint64_t init_seed = 0;
};

// Untrained classifier [features.dim(), hidden..., num_classes] seeded from
// settings.init_seed and tagged with the feature fingerprint.
Classifier fresh_classifier(const ExperimentSettings& settings, int num_classes);

// Extracts features of `dataset` and trains a fresh classifier on its labels.
TrainResult train_classifier(const Corpus& dataset, const ExperimentSettings& settings);

// Train/evaluate cycles over a fixed split. Clean features are extracted
// once; poisoned cells only re-extract the poisoned rows. Every cell uses
// the same initialization and shuffle seeds, so only the swept variable
// changes between cells.
class AttackExperiment {
 public:
  AttackExperiment(Corpus train, Corpus eval, ExperimentSettings settings);

  const Corpus& train_corpus() const { return train_; }
  const Corpus& eval_corpus() const { return eval_; }
  const ExperimentSettings& settings() const { return settings_; }
  const FeatureExtractor& extractor() const { return extractor_; }
  const Matrix& clean_train_features() const { return train_features_; }
  const Matrix& clean_eval_features() const { return eval_set(TriggerSpec{}, 0).clean; }

  // Cached per (trigger, target).
  const EvalSet& eval_set(const TriggerSpec& trigger, int target_label) const;

  // Features of D_b: the clean rows reused, poisoned rows re-extracted.
  Matrix dataset_features(const Corpus& dataset) const;

  TrainResult train_on(const Corpus& dataset) const;

  // The no-attack model, trained once on the clean training split.
  const TrainResult& clean_model() const;

  struct Cell {
    TrainResult trained;
    PoisonReport report;
    AttackMetrics metrics;  // dacc relative to the clean model, dasr = 0
  };
  Cell run_attack(const PoisonPlan& plan) const;

  // Metrics of the clean model under a given trigger (the "no attack" row).
  AttackMetrics clean_metrics(const TriggerSpec& trigger, int target_label) const;

 private:
  Corpus train_;
  Corpus eval_;
  ExperimentSettings settings_;
  FeatureExtractor extractor_;
  Matrix train_features_;
  mutable std::map<std::tuple<int, std::size_t, int>, EvalSet> eval_cache_;
  mutable std::optional<TrainResult> clean_;
};

std::vector<ResultRow> sweep_poisoning_rate(const AttackExperiment& experiment,
                                            std::span<const double> rates, const PoisonPlan& base);

// Poisoning and evaluation use the same length within each cell.
std::vector<ResultRow> sweep_trigger_length(const AttackExperiment& experiment,
                                            std::span<const std::size_t> lengths,
                                            const PoisonPlan& base);

// One model evaluated under several trigger lengths (train/test mismatch).
std::vector<ResultRow> evaluate_trigger_lengths(const AttackExperiment& experiment,
                                                const Classifier& model, PaddingMode mode,
                                                std::span<const std::size_t> lengths,
                                                int target_label, double rate_percent);

// Sequential pruning of the last hidden layer (the mask accumulates).
// dacc/dasr are relative to the unpruned model.
std::vector<ResultRow> pruning_curve(const Classifier& attack_model,
                                     const Matrix& clean_validation,
                                     std::span<const double> ratios, const EvalSet& eval,
                                     double rate_percent);

}  // namespace padback
