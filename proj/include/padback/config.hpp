#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "padback/dataset.hpp"
#include "padback/experiment.hpp"
#include "padback/features.hpp"
#include "padback/model.hpp"

namespace padback {

// Everything an experiment needs. All randomness derives from `seed` through
// the named substreams "corpus", "split", "poison", "init" and "shuffle".
struct ExperimentConfig {
  std::uint64_t seed = 1234;

  int num_speakers = 10;
  int utterances_per_speaker = 100;
  double min_duration_s = 1.0;
  double max_duration_s = 3.0;
  int sample_rate = kDefaultSampleRate;

  double train_fraction = 0.9;

  double rate_percent = 10.0;
  int target_label = 0;
  PaddingMode mode = PaddingMode::Zero;
  std::size_t trigger_len = kDefaultTriggerLength;
  bool exclude_target_class = false;

  FeatureConfig features;
  TrainConfig train;
  std::vector<std::size_t> hidden{128, 128};

  std::filesystem::path out_dir = "run";

  void validate() const;

  CorpusSpec corpus_spec() const;
  std::uint64_t split_seed() const;
  PoisonPlan poison_plan() const;
  TrainConfig train_config() const;  // with the shuffle substream seed
  ExperimentSettings experiment_settings() const;

  nlohmann::json to_json() const;
  // Starts from the defaults; unknown keys at any level are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
};

}  // namespace padback
