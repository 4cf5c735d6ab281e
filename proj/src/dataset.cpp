#include "padback/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <string>

#include "padback/errors.hpp"
#include "padback/rng.hpp"

namespace padback {

void Corpus::validate() const {
  require(num_speakers >= 2, "corpus: at least 2 speakers required");
  require(!samples.empty(), "corpus: no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string where = "corpus sample " + std::to_string(i);
    require(s.clip != nullptr, where + ": missing audio");
    require(s.label >= 0 && s.label < num_speakers,
            where + ": label " + std::to_string(s.label) + " out of range [0, " +
                std::to_string(num_speakers) + ")");
    require(s.original_label >= 0 && s.original_label < num_speakers,
            where + ": original label out of range");
    require(s.poisoned || s.label == s.original_label,
            where + ": clean sample with label != original_label");
    require(s.clip->sample_rate == sample_rate, where + ": sample rate mismatch");
  }
}

std::vector<std::size_t> Corpus::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(num_speakers, 0)), 0);
  for (const auto& s : samples) {
    if (s.original_label >= 0 && s.original_label < num_speakers) ++counts[s.original_label];
  }
  return counts;
}

std::string Corpus::fingerprint() const {
  std::vector<std::uint64_t> hashes;
  hashes.reserve(samples.size());
  for (const auto& s : samples) {
    std::uint64_t h = fnv1a(std::to_string(s.label) + "/" + std::to_string(s.original_label) +
                            "/" + (s.poisoned ? "p" : "c"));
    if (s.clip) {
      h = fnv1a(std::as_bytes(std::span(s.clip->samples)), h);
    }
    hashes.push_back(h);
  }
  std::sort(hashes.begin(), hashes.end());
  const std::uint64_t digest =
      fnv1a(std::as_bytes(std::span(hashes)), fnv1a(std::to_string(num_speakers)));
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(digest));
  return hex;
}

void CorpusSpec::validate() const {
  require(num_speakers >= 2, "corpus: num_speakers must be >= 2");
  require(utterances_per_speaker >= 1, "corpus: utterances_per_speaker must be >= 1");
  require(sample_rate > 0, "corpus: sample_rate must be positive");
  require(min_duration_s >= 0.5 && max_duration_s <= 5.0 && min_duration_s <= max_duration_s,
          "corpus: duration range must lie within [0.5, 5] seconds");
}

SpeakerProfile draw_speaker_profile(const CorpusSpec& spec, int speaker) {
  // Fundamentals are stratified over [90, 300] Hz so no two speakers share a
  // pitch band; the slot order is itself seeded.
  Rng order_rng(derive_seed(spec.seed, "speaker-order"));
  const auto slots = permutation(static_cast<std::size_t>(spec.num_speakers), order_rng);

  SpeakerProfile p;
  p.seed = derive_seed(spec.seed, "speaker", static_cast<std::uint64_t>(speaker));
  Rng rng(p.seed);
  const double width = 210.0 / spec.num_speakers;
  p.fundamental_hz = 90.0 + width * (static_cast<double>(slots[speaker]) + rng.uniform(0.2, 0.8));
  p.formant_hzs = {rng.uniform(300.0, 850.0), rng.uniform(900.0, 2200.0),
                   rng.uniform(2300.0, 3400.0)};
  p.jitter = rng.uniform(0.01, 0.03);
  return p;
}

namespace {

// Unity-DC-gain two-pole resonator.
struct Resonator {
  double a = 0, b = 0, c = 0, y1 = 0, y2 = 0;

  Resonator(double freq_hz, double bandwidth_hz, int sample_rate) {
    const double r = std::exp(-std::numbers::pi * bandwidth_hz / sample_rate);
    c = -r * r;
    b = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq_hz / sample_rate);
    a = 1.0 - b - c;
  }
  double operator()(double x) {
    const double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

constexpr std::array<double, 3> kFormantBandwidths{80.0, 110.0, 150.0};
// Resonator settling time discarded before the clip begins, so utterances
// start mid-phonation like a cropped recording.
constexpr std::size_t kWarmupSamples = 2048;
// Background noise std relative to the clip peak (about -70 dB). Low enough
// that high bands keep the spectral detail of the voiced signal.
constexpr double kNoiseLevel = 3e-4;

}  // namespace

AudioClip synthesize_utterance(const SpeakerProfile& profile, std::size_t num_samples,
                               int sample_rate, std::uint64_t seed) {
  require(num_samples > 0, "synthesize_utterance: zero length");
  require(sample_rate > 0, "synthesize_utterance: sample rate must be positive");
  Rng rng(seed);
  const double fs = sample_rate;

  const double f0 = std::clamp(profile.fundamental_hz * (1.0 + profile.jitter * rng.normal()),
                               60.0, 400.0);
  const double drift_hz = rng.uniform(0.3, 1.0);
  const double drift_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double env_hz = rng.uniform(2.5, 5.0);
  const double env_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  double phase = rng.uniform();

  std::array<Resonator, 3> tract{
      Resonator(profile.formant_hzs[0] * (1.0 + 0.02 * rng.normal()), kFormantBandwidths[0], sample_rate),
      Resonator(profile.formant_hzs[1] * (1.0 + 0.02 * rng.normal()), kFormantBandwidths[1], sample_rate),
      Resonator(profile.formant_hzs[2] * (1.0 + 0.02 * rng.normal()), kFormantBandwidths[2], sample_rate)};

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(num_samples);
  const std::size_t total = kWarmupSamples + num_samples;
  for (std::size_t i = 0; i < total; ++i) {
    const double t = (static_cast<double>(i) - kWarmupSamples) / fs;
    const double pitch = f0 * (1.0 + 0.04 * std::sin(2.0 * std::numbers::pi * drift_hz * t + drift_phase));
    phase += pitch / fs;
    phase -= std::floor(phase);
    double y = 2.0 * phase - 1.0;
    for (auto& r : tract) y = r(y);
    if (i >= kWarmupSamples) {
      const double env = 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * env_hz * t + env_phase);
      clip.samples[i - kWarmupSamples] = env * y;
    }
  }

  double peak = 0.0;
  for (double x : clip.samples) peak = std::max(peak, std::abs(x));
  const double noise_std = kNoiseLevel * (peak > 0.0 ? peak : 1.0);
  for (double& x : clip.samples) x += noise_std * rng.normal();
  peak = 0.0;
  for (double x : clip.samples) peak = std::max(peak, std::abs(x));
  const double gain = peak > 0.0 ? 0.9 / peak : 1.0;
  for (double& x : clip.samples) x *= gain;
  return clip;
}

Corpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  const auto speakers = static_cast<std::size_t>(spec.num_speakers);
  const auto per_speaker = static_cast<std::size_t>(spec.utterances_per_speaker);
  std::vector<SpeakerProfile> profiles(speakers);
  for (std::size_t s = 0; s < speakers; ++s) profiles[s] = draw_speaker_profile(spec, static_cast<int>(s));

  const std::size_t quantum = std::max(1, spec.sample_rate / 100);
  Corpus corpus;
  corpus.num_speakers = spec.num_speakers;
  corpus.sample_rate = spec.sample_rate;
  corpus.samples.resize(speakers * per_speaker);

  const auto total = static_cast<std::int64_t>(corpus.samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const auto s = static_cast<std::size_t>(idx) / per_speaker;
    const auto u = static_cast<std::size_t>(idx) % per_speaker;
    const std::uint64_t utt_seed = derive_seed(spec.seed, "utterance", s, u);
    Rng len_rng(derive_seed(utt_seed, "length"));
    const double seconds = len_rng.uniform(spec.min_duration_s, spec.max_duration_s);
    const auto units = static_cast<std::size_t>(std::llround(seconds * spec.sample_rate / quantum));
    auto& sample = corpus.samples[static_cast<std::size_t>(idx)];
    sample.clip = std::make_shared<const AudioClip>(
        synthesize_utterance(profiles[s], std::max<std::size_t>(units, 1) * quantum,
                             spec.sample_rate, utt_seed));
    sample.label = static_cast<int>(s);
    sample.original_label = static_cast<int>(s);
  }
  return corpus;
}

Split split_train_eval(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "split: train fraction must be in (0, 1)");
  corpus.validate();
  std::vector<std::vector<std::size_t>> by_speaker(static_cast<std::size_t>(corpus.num_speakers));
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_speaker[corpus.samples[i].original_label].push_back(i);
  }

  std::vector<std::uint8_t> to_train(corpus.size(), 0);
  for (std::size_t s = 0; s < by_speaker.size(); ++s) {
    auto& idx = by_speaker[s];
    const std::size_t n = idx.size();
    if (n == 0) continue;
    require(n >= 2, "split: speaker " + std::to_string(s) + " has " + std::to_string(n) +
                        " utterance(s); at least 2 are needed to stratify");
    // The epsilon absorbs representation error in products such as 0.9 * 100.
    const auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * n - 1e-9));
    require(n_train < n, "split: speaker " + std::to_string(s) + " would have an empty eval set");
    Rng rng(derive_seed(seed, "split", s));
    shuffle(std::span<std::size_t>(idx), rng);
    for (std::size_t j = 0; j < n_train; ++j) to_train[idx[j]] = 1;
  }

  Split out;
  out.train.num_speakers = out.eval.num_speakers = corpus.num_speakers;
  out.train.sample_rate = out.eval.sample_rate = corpus.sample_rate;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (to_train[i] ? out.train : out.eval).samples.push_back(corpus.samples[i]);
  }
  return out;
}

std::size_t poison_count(double rate_percent, std::size_t n) {
  require(rate_percent > 0.0 && rate_percent < 100.0, "poison: rate must be in (0, 100)");
  return static_cast<std::size_t>(std::floor(rate_percent * static_cast<double>(n) / 100.0 + 0.5));
}

PoisonedDataset build_poisoned_dataset(const Corpus& train, const PoisonPlan& plan) {
  train.validate();
  require(plan.target_label >= 0 && plan.target_label < train.num_speakers,
          "poison: target label " + std::to_string(plan.target_label) + " out of range [0, " +
              std::to_string(train.num_speakers) + ")");
  require(plan.trigger.length_samples >= 1, "poison: trigger length must be >= 1");
  for (const auto& s : train.samples) require(!s.poisoned, "poison: input corpus already poisoned");

  const std::size_t k = poison_count(plan.rate_percent, train.size());
  require(k >= 1, "poison: rate " + std::to_string(plan.rate_percent) + "% of " +
                      std::to_string(train.size()) + " samples selects nothing");

  std::vector<std::size_t> pool;
  pool.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!plan.exclude_target_class || train.samples[i].original_label != plan.target_label) {
      pool.push_back(i);
    }
  }
  require(k <= pool.size(), "poison: not enough candidate samples for the requested rate");

  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  Rng rng(derive_seed(plan.seed, "poison"));
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::size_t> selected(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(selected.begin(), selected.end());

  PoisonedDataset out;
  out.corpus = train;
  out.report.selected = selected;
  out.report.per_class_counts.assign(static_cast<std::size_t>(train.num_speakers), 0);
  out.report.trigger = plan.trigger;
  out.report.target_label = plan.target_label;
  out.report.rate_percent = plan.rate_percent;
  out.report.num_total = train.size();
  for (std::size_t i : selected) {
    auto& s = out.corpus.samples[i];
    ++out.report.per_class_counts[s.original_label];
    s.clip = std::make_shared<const AudioClip>(apply_trigger(*s.clip, plan.trigger));
    s.label = plan.target_label;
    s.poisoned = true;
    s.path.clear();
  }
  return out;
}

}  // namespace padback
