#include "padback/eval.hpp"

#include <string>

#include "padback/errors.hpp"
#include "padback/kernels.hpp"

namespace padback {

void require_clean_corpus(const Corpus& eval) {
  require(!eval.samples.empty(), "eval: empty evaluation corpus");
  for (std::size_t i = 0; i < eval.size(); ++i) {
    require(!eval.samples[i].poisoned,
            "eval: sample " + std::to_string(i) + " is poisoned; metrics need clean data");
  }
}

namespace {

void check_fingerprint(const Classifier& model, const FeatureConfig& config) {
  if (!model.feature_fingerprint.empty() && model.feature_fingerprint != config.fingerprint()) {
    throw ValidationError("eval: classifier was trained on features " + model.feature_fingerprint +
                          " but evaluation uses " + config.fingerprint());
  }
}

}  // namespace

EvalSet make_eval_set(const Corpus& eval, const TriggerSpec& trigger, int target_label,
                      const FeatureExtractor& extractor) {
  eval.validate();
  require_clean_corpus(eval);
  require(target_label >= 0 && target_label < eval.num_speakers,
          "eval: target label out of range");
  EvalSet set;
  set.trigger = trigger;
  set.target_label = target_label;
  set.fingerprint = eval.fingerprint();

  std::vector<const AudioClip*> clean;
  std::vector<AudioClip> triggered;
  clean.reserve(eval.size());
  triggered.reserve(eval.size());
  for (const auto& s : eval.samples) {
    clean.push_back(s.clip.get());
    triggered.push_back(apply_trigger(*s.clip, trigger));
    set.original_labels.push_back(static_cast<std::size_t>(s.original_label));
  }
  std::vector<const AudioClip*> triggered_ptrs;
  for (const auto& c : triggered) triggered_ptrs.push_back(&c);
  set.clean = kernels::omp::extract_features(clean, extractor);
  set.triggered = kernels::omp::extract_features(triggered_ptrs, extractor);
  return set;
}

std::size_t count_correct(const Classifier& model, const Matrix& features,
                          std::span<const std::size_t> labels) {
  require(labels.size() == features.rows, "eval: feature/label count mismatch");
  const auto pred = kernels::omp::predict(model, features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == labels[i];
  return correct;
}

std::pair<std::size_t, std::size_t> count_attack_hits(const Classifier& model,
                                                      const Matrix& triggered,
                                                      std::span<const std::size_t> labels,
                                                      int target_label) {
  require(labels.size() == triggered.rows, "eval: feature/label count mismatch");
  const auto target = static_cast<std::size_t>(target_label);
  const auto pred = kernels::omp::predict(model, triggered);
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (labels[i] == target) continue;
    ++total;
    hits += pred[i] == target;
  }
  return {hits, total};
}

AttackMetrics measure(const Classifier& model, const EvalSet& eval) {
  require(eval.clean.rows > 0, "eval: empty evaluation set");
  AttackMetrics m;
  m.eval_fingerprint = eval.fingerprint;
  m.n_eval_clean = eval.clean.rows;
  m.ba_correct = count_correct(model, eval.clean, eval.original_labels);
  const auto [hits, total] =
      count_attack_hits(model, eval.triggered, eval.original_labels, eval.target_label);
  require(total > 0, "eval: no evaluation samples outside the target class");
  m.asr_hits = hits;
  m.n_eval_triggered = total;
  m.ba = static_cast<double>(m.ba_correct) / static_cast<double>(m.n_eval_clean);
  m.asr = static_cast<double>(hits) / static_cast<double>(total);
  return m;
}

double benign_accuracy(const Classifier& model, const Corpus& eval, const FeatureConfig& config) {
  eval.validate();
  require_clean_corpus(eval);
  check_fingerprint(model, config);
  FeatureExtractor extractor(config);
  std::vector<const AudioClip*> clips;
  std::vector<std::size_t> labels;
  for (const auto& s : eval.samples) {
    clips.push_back(s.clip.get());
    labels.push_back(static_cast<std::size_t>(s.original_label));
  }
  const Matrix features = kernels::omp::extract_features(clips, extractor);
  return static_cast<double>(count_correct(model, features, labels)) /
         static_cast<double>(labels.size());
}

double attack_success_rate(const Classifier& model, const Corpus& eval, const TriggerSpec& trigger,
                           int target_label, const FeatureConfig& config) {
  eval.validate();
  require_clean_corpus(eval);
  check_fingerprint(model, config);
  require(target_label >= 0 && target_label < eval.num_speakers, "eval: target label out of range");
  FeatureExtractor extractor(config);
  std::vector<AudioClip> triggered;
  std::vector<std::size_t> labels;
  for (const auto& s : eval.samples) {
    if (s.original_label == target_label) continue;
    triggered.push_back(apply_trigger(*s.clip, trigger));
    labels.push_back(static_cast<std::size_t>(s.original_label));
  }
  require(!triggered.empty(), "eval: no evaluation samples outside the target class");
  std::vector<const AudioClip*> ptrs;
  for (const auto& c : triggered) ptrs.push_back(&c);
  const Matrix features = kernels::omp::extract_features(ptrs, extractor);
  const auto [hits, total] = count_attack_hits(model, features, labels, target_label);
  return static_cast<double>(hits) / static_cast<double>(total);
}

Degradation degradation_metrics(const AttackMetrics& reference, const AttackMetrics& current) {
  if (reference.eval_fingerprint != current.eval_fingerprint) {
    throw ValidationError("degradation: metrics were computed on different evaluation corpora (" +
                          reference.eval_fingerprint + " vs " + current.eval_fingerprint + ")");
  }
  return {reference.ba - current.ba, reference.asr - current.asr};
}

}  // namespace padback
