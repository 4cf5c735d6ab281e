#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "padback/audio.hpp"
#include "padback/dataset.hpp"
#include "padback/features.hpp"
#include "padback/matrix.hpp"
#include "padback/model.hpp"

namespace padback {

// Benign accuracy (BA) and attack success rate (ASR) as exact ratios of
// integer counts, plus degradations against a reference model.
struct AttackMetrics {
  double ba = 0.0;
  double asr = 0.0;
  double dacc = 0.0;
  double dasr = 0.0;
  std::size_t ba_correct = 0;
  std::size_t n_eval_clean = 0;
  std::size_t asr_hits = 0;
  std::size_t n_eval_triggered = 0;
  std::string eval_fingerprint;
};

// Features of a clean evaluation corpus, with and without the trigger.
// ASR is only counted over rows whose ground truth differs from the target.
struct EvalSet {
  Matrix clean;
  Matrix triggered;  // row i = features(apply_trigger(sample i))
  std::vector<std::size_t> original_labels;
  TriggerSpec trigger;
  int target_label = 0;
  std::string fingerprint;  // Corpus::fingerprint() of the eval corpus
};

// Rejects poisoned samples: benign metrics are only defined on clean data.
void require_clean_corpus(const Corpus& eval);

EvalSet make_eval_set(const Corpus& eval, const TriggerSpec& trigger, int target_label,
                      const FeatureExtractor& extractor);

// Fraction of rows whose prediction equals the label.
std::size_t count_correct(const Classifier& model, const Matrix& features,
                          std::span<const std::size_t> labels);
// Returns {hits, qualifying rows}: rows with label != target predicted as target.
std::pair<std::size_t, std::size_t> count_attack_hits(const Classifier& model,
                                                      const Matrix& triggered,
                                                      std::span<const std::size_t> labels,
                                                      int target_label);

AttackMetrics measure(const Classifier& model, const EvalSet& eval);

double benign_accuracy(const Classifier& model, const Corpus& eval, const FeatureConfig& config);
double attack_success_rate(const Classifier& model, const Corpus& eval, const TriggerSpec& trigger,
                           int target_label, const FeatureConfig& config);

struct Degradation {
  double dacc = 0.0;  // reference BA - current BA
  double dasr = 0.0;  // reference ASR - current ASR
};

// Both metric sets must come from the same evaluation corpus.
Degradation degradation_metrics(const AttackMetrics& reference, const AttackMetrics& current);

}  // namespace padback
