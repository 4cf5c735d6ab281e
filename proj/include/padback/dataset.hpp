#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "padback/audio.hpp"

namespace padback {

// One labeled utterance. Clips are shared between corpora (splits, poisoned
// sets) and never mutated once built.
struct LabeledSample {
  std::shared_ptr<const AudioClip> clip;
  std::string path;  // empty for purely in-memory samples
  int label = 0;
  int original_label = 0;
  bool poisoned = false;

  std::size_t num_samples() const { return clip ? clip->size() : 0; }
};

struct Corpus {
  std::vector<LabeledSample> samples;
  int num_speakers = 0;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  // Labels in range, at least two speakers, clips present and matching rate.
  void validate() const;
  std::vector<std::size_t> class_counts() const;
  // Order-independent digest of labels and waveforms.
  std::string fingerprint() const;
};

struct SpeakerProfile {
  double fundamental_hz = 120.0;
  std::array<double, 3> formant_hzs{500.0, 1500.0, 2500.0};
  double jitter = 0.02;
  std::uint64_t seed = 0;
};

struct CorpusSpec {
  int num_speakers = 10;
  int utterances_per_speaker = 100;
  double min_duration_s = 1.0;
  double max_duration_s = 3.0;
  int sample_rate = kDefaultSampleRate;
  std::uint64_t seed = 0;

  void validate() const;
};

SpeakerProfile draw_speaker_profile(const CorpusSpec& spec, int speaker);

// Sawtooth glottal source through a cascade of formant resonators with a
// syllabic amplitude envelope and low-level noise, peak-normalized to 0.9.
AudioClip synthesize_utterance(const SpeakerProfile& profile, std::size_t num_samples,
                               int sample_rate, std::uint64_t seed);

// Samples are ordered speaker-major. Utterance lengths are whole multiples of
// 10 ms. Deterministic in spec.seed regardless of thread count.
Corpus generate_corpus(const CorpusSpec& spec);

struct Split {
  Corpus train;
  Corpus eval;
};

// Per-speaker shuffle; the first ceil(fraction * n) utterances of each
// speaker go to train. Both outputs keep the input order.
Split split_train_eval(const Corpus& corpus, double train_fraction, std::uint64_t seed);

struct PoisonPlan {
  double rate_percent = 10.0;
  int target_label = 0;
  TriggerSpec trigger;
  std::uint64_t seed = 0;
  // Restrict selection to samples whose ground truth differs from the target.
  bool exclude_target_class = false;
};

struct PoisonReport {
  std::vector<std::size_t> selected;          // ascending indices into the input
  std::vector<std::size_t> per_class_counts;  // selected, by original label
  TriggerSpec trigger;
  int target_label = 0;
  double rate_percent = 0.0;
  std::size_t num_total = 0;
};

struct PoisonedDataset {
  Corpus corpus;  // clean-kept and poisoned samples, same order and size as input
  PoisonReport report;
};

// round(rate / 100 * n) with ties rounded up.
std::size_t poison_count(double rate_percent, std::size_t n);

PoisonedDataset build_poisoned_dataset(const Corpus& train, const PoisonPlan& plan);

}  // namespace padback
