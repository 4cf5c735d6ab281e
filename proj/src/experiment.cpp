#include "padback/experiment.hpp"

#include <cstdio>
#include <string>

#include "padback/errors.hpp"
#include "padback/kernels.hpp"

namespace padback {
namespace {

std::vector<std::size_t> labels_of(const Corpus& corpus) {
  std::vector<std::size_t> labels;
  labels.reserve(corpus.size());
  for (const auto& s : corpus.samples) labels.push_back(static_cast<std::size_t>(s.label));
  return labels;
}

std::string format_condition(const char* key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%g", key, value);
  return buf;
}

}  // namespace

AttackExperiment::AttackExperiment(Corpus train, Corpus eval, ExperimentSettings settings)
    : train_(std::move(train)),
      eval_(std::move(eval)),
      settings_(std::move(settings)),
      extractor_(settings_.features) {
  train_.validate();
  eval_.validate();
  require_clean_corpus(eval_);
  require(train_.num_speakers == eval_.num_speakers, "experiment: speaker count mismatch");
  settings_.train.validate();
  std::vector<const AudioClip*> clips;
  for (const auto& s : train_.samples) {
    require(!s.poisoned, "experiment: the base training split must be clean");
    clips.push_back(s.clip.get());
  }
  train_features_ = kernels::omp::extract_features(clips, extractor_);
}

const EvalSet& AttackExperiment::eval_set(const TriggerSpec& trigger, int target_label) const {
  const auto key = std::make_tuple(static_cast<int>(trigger.mode), trigger.length_samples, target_label);
  auto it = eval_cache_.find(key);
  if (it == eval_cache_.end()) {
    it = eval_cache_.emplace(key, make_eval_set(eval_, trigger, target_label, extractor_)).first;
  }
  return it->second;
}

Matrix AttackExperiment::dataset_features(const Corpus& dataset) const {
  require(dataset.size() == train_.size(), "experiment: dataset does not derive from the train split");
  Matrix out = train_features_;
  std::vector<std::size_t> rows;
  std::vector<const AudioClip*> clips;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.samples[i].clip != train_.samples[i].clip) {
      rows.push_back(i);
      clips.push_back(dataset.samples[i].clip.get());
    }
  }
  const Matrix fresh = kernels::omp::extract_features(clips, extractor_);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::copy(fresh.row(k).begin(), fresh.row(k).end(), out.row(rows[k]).begin());
  }
  return out;
}

Classifier fresh_classifier(const ExperimentSettings& settings, int num_classes) {
  std::vector<std::size_t> dims{settings.features.dim()};
  dims.insert(dims.end(), settings.hidden.begin(), settings.hidden.end());
  dims.push_back(static_cast<std::size_t>(num_classes));
  Classifier model = init_classifier(dims, settings.init_seed);
  model.feature_fingerprint = settings.features.fingerprint();
  return model;
}

TrainResult train_classifier(const Corpus& dataset, const ExperimentSettings& settings) {
  dataset.validate();
  const FeatureExtractor extractor(settings.features);
  std::vector<const AudioClip*> clips;
  for (const auto& s : dataset.samples) clips.push_back(s.clip.get());
  const Matrix features = kernels::omp::extract_features(clips, extractor);
  return train(fresh_classifier(settings, dataset.num_speakers), features, labels_of(dataset),
               settings.train);
}

TrainResult AttackExperiment::train_on(const Corpus& dataset) const {
  const Matrix features = dataset_features(dataset);
  return train(fresh_classifier(settings_, train_.num_speakers), features, labels_of(dataset),
               settings_.train);
}

const TrainResult& AttackExperiment::clean_model() const {
  if (!clean_) clean_ = train_on(train_);
  return *clean_;
}

AttackMetrics AttackExperiment::clean_metrics(const TriggerSpec& trigger, int target_label) const {
  return measure(clean_model().model, eval_set(trigger, target_label));
}

AttackExperiment::Cell AttackExperiment::run_attack(const PoisonPlan& plan) const {
  auto poisoned = build_poisoned_dataset(train_, plan);
  Cell cell;
  cell.trained = train_on(poisoned.corpus);
  cell.report = std::move(poisoned.report);
  const EvalSet& eval = eval_set(plan.trigger, plan.target_label);
  cell.metrics = measure(cell.trained.model, eval);
  const AttackMetrics reference = clean_metrics(plan.trigger, plan.target_label);
  cell.metrics.dacc = degradation_metrics(reference, cell.metrics).dacc;
  return cell;
}

std::vector<ResultRow> sweep_poisoning_rate(const AttackExperiment& experiment,
                                            std::span<const double> rates, const PoisonPlan& base) {
  require(!rates.empty(), "sweep: no rates given");
  for (double r : rates) require(r > 0.0 && r < 100.0, "sweep: rates must lie in (0, 100)");
  std::vector<ResultRow> rows;
  for (double rate : rates) {
    PoisonPlan plan = base;
    plan.rate_percent = rate;
    const auto cell = experiment.run_attack(plan);
    rows.push_back({format_condition("rate", rate), rate, plan.trigger.length_samples,
                    std::string(to_string(plan.trigger.mode)), cell.metrics});
  }
  return rows;
}

std::vector<ResultRow> sweep_trigger_length(const AttackExperiment& experiment,
                                            std::span<const std::size_t> lengths,
                                            const PoisonPlan& base) {
  require(!lengths.empty(), "sweep: no trigger lengths given");
  for (std::size_t len : lengths) require(len >= 1, "sweep: trigger lengths must be >= 1");
  std::vector<ResultRow> rows;
  for (std::size_t len : lengths) {
    PoisonPlan plan = base;
    plan.trigger.length_samples = len;
    const auto cell = experiment.run_attack(plan);
    rows.push_back({format_condition("len", static_cast<double>(len)), plan.rate_percent, len,
                    std::string(to_string(plan.trigger.mode)), cell.metrics});
  }
  return rows;
}

std::vector<ResultRow> evaluate_trigger_lengths(const AttackExperiment& experiment,
                                                const Classifier& model, PaddingMode mode,
                                                std::span<const std::size_t> lengths,
                                                int target_label, double rate_percent) {
  std::vector<ResultRow> rows;
  for (std::size_t len : lengths) {
    const TriggerSpec spec{mode, len};
    rows.push_back({format_condition("eval_len", static_cast<double>(len)), rate_percent, len,
                    std::string(to_string(mode)),
                    measure(model, experiment.eval_set(spec, target_label))});
  }
  return rows;
}

std::vector<ResultRow> pruning_curve(const Classifier& attack_model,
                                     const Matrix& clean_validation,
                                     std::span<const double> ratios, const EvalSet& eval,
                                     double rate_percent) {
  require(!ratios.empty(), "prune: no ratios given");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    require(ratios[i] >= 0.0 && ratios[i] < 1.0, "prune: ratios must lie in [0, 1)");
    if (i > 0) require(ratios[i] >= ratios[i - 1], "prune: ratios must be ascending");
  }
  const AttackMetrics reference = measure(attack_model, eval);
  Classifier model = attack_model;
  std::vector<ResultRow> rows;
  for (double ratio : ratios) {
    model = prune_last_hidden(std::move(model), clean_validation, ratio);
    AttackMetrics m = measure(model, eval);
    const auto d = degradation_metrics(reference, m);
    m.dacc = d.dacc;
    m.dasr = d.dasr;
    rows.push_back({format_condition("prune", ratio), rate_percent, eval.trigger.length_samples,
                    std::string(to_string(eval.trigger.mode)), m});
  }
  return rows;
}

}  // namespace padback
