#include "padback/features.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include "padback/errors.hpp"
#include "padback/fft.hpp"
#include "padback/rng.hpp"

namespace padback {

void FeatureConfig::validate() const {
  require(frame_len >= 2, "features: frame_len must be >= 2");
  require(hop >= 1, "features: hop must be >= 1");
  require(is_power_of_two(fft_size), "features: fft_size must be a power of two");
  require(fft_size >= frame_len, "features: fft_size must be >= frame_len");
  require(n_mels >= 2, "features: n_mels must be >= 2");
  require(log_floor > 0.0 && std::isfinite(log_floor), "features: log_floor must be positive");
  require(sample_rate > 0, "features: sample_rate must be positive");
}

std::string FeatureConfig::fingerprint() const {
  char floor_text[32];
  std::snprintf(floor_text, sizeof floor_text, "%.17g", log_floor);
  std::ostringstream canonical;
  canonical << "logmel/meanstd;frame_len=" << frame_len << ";hop=" << hop
            << ";fft_size=" << fft_size << ";n_mels=" << n_mels
            << ";log_floor=" << floor_text << ";sample_rate=" << sample_rate
            << ";window=hann";
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical.str())));
  return hex;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> hann_window(std::size_t n) {
  require(n >= 2, "hann_window: length must be >= 2");
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom);
  }
  return w;
}

Matrix frame_and_window(const AudioClip& clip, const FeatureConfig& config) {
  config.validate();
  require(clip.size() >= config.frame_len,
          "features: clip of " + std::to_string(clip.size()) +
              " samples is shorter than one frame (" + std::to_string(config.frame_len) + ")");
  const auto window = hann_window(config.frame_len);
  const std::size_t frames = frame_count(clip.size(), config.frame_len, config.hop);
  Matrix out(frames, config.frame_len);
  for (std::size_t f = 0; f < frames; ++f) {
    const double* x = clip.samples.data() + f * config.hop;
    auto row = out.row(f);
    for (std::size_t k = 0; k < config.frame_len; ++k) row[k] = x[k] * window[k];
  }
  return out;
}

Matrix mel_filterbank(const FeatureConfig& config) {
  config.validate();
  const std::size_t bins = config.fft_size / 2 + 1;
  const double nyquist = config.sample_rate / 2.0;
  const double mel_max = hz_to_mel(nyquist);

  std::vector<double> edges_hz(config.n_mels + 2);
  for (std::size_t i = 0; i < edges_hz.size(); ++i) {
    edges_hz[i] = mel_to_hz(mel_max * static_cast<double>(i) /
                            static_cast<double>(config.n_mels + 1));
  }

  Matrix fb(config.n_mels, bins);
  const double bin_hz = static_cast<double>(config.sample_rate) / config.fft_size;
  for (std::size_t m = 0; m < config.n_mels; ++m) {
    const double lo = edges_hz[m], peak = edges_hz[m + 1], hi = edges_hz[m + 2];
    double total = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = bin_hz * static_cast<double>(k);
      double w = 0.0;
      if (f > lo && f <= peak) {
        w = (f - lo) / (peak - lo);
      } else if (f > peak && f < hi) {
        w = (hi - f) / (hi - peak);
      }
      fb(m, k) = w;
      total += w;
    }
    if (total <= 0.0) {
      throw ValidationError("features: mel filter " + std::to_string(m) +
                            " is empty; n_mels=" + std::to_string(config.n_mels) +
                            " is too large for fft_size=" + std::to_string(config.fft_size));
    }
  }
  return fb;
}

FeatureExtractor::FeatureExtractor(FeatureConfig config)
    : config_(config),
      window_(hann_window(config.frame_len)),
      filterbank_(mel_filterbank(config)) {}

Matrix FeatureExtractor::log_mel(const AudioClip& clip) const {
  require(clip.sample_rate == config_.sample_rate,
          "features: clip sample rate " + std::to_string(clip.sample_rate) +
              " does not match feature config " + std::to_string(config_.sample_rate));
  require(clip.size() >= config_.frame_len,
          "features: clip of " + std::to_string(clip.size()) +
              " samples is shorter than one frame (" + std::to_string(config_.frame_len) + ")");
  const std::size_t frames = frame_count(clip.size(), config_.frame_len, config_.hop);
  const std::size_t bins = config_.fft_size / 2 + 1;
  Matrix out(frames, config_.n_mels);
  std::vector<std::complex<double>> buf(config_.fft_size);
  std::vector<double> power(bins);
  for (std::size_t f = 0; f < frames; ++f) {
    const double* x = clip.samples.data() + f * config_.hop;
    for (std::size_t k = 0; k < config_.frame_len; ++k) buf[k] = x[k] * window_[k];
    for (std::size_t k = config_.frame_len; k < config_.fft_size; ++k) buf[k] = 0.0;
    fft_inplace(buf);
    for (std::size_t k = 0; k < bins; ++k) power[k] = std::norm(buf[k]);
    auto row = out.row(f);
    for (std::size_t m = 0; m < config_.n_mels; ++m) {
      const auto weights = filterbank_.row(m);
      double energy = 0.0;
      for (std::size_t k = 0; k < bins; ++k) energy += weights[k] * power[k];
      row[m] = std::log(energy + config_.log_floor);
    }
  }
  return out;
}

FeatureVector FeatureExtractor::operator()(const AudioClip& clip) const {
  const Matrix lm = log_mel(clip);
  const std::size_t bands = config_.n_mels;
  const double frames = static_cast<double>(lm.rows);
  FeatureVector out(2 * bands, 0.0);
  for (std::size_t m = 0; m < bands; ++m) {
    double sum = 0.0;
    for (std::size_t f = 0; f < lm.rows; ++f) sum += lm(f, m);
    const double mean = sum / frames;
    double sq = 0.0;
    for (std::size_t f = 0; f < lm.rows; ++f) {
      const double d = lm(f, m) - mean;
      sq += d * d;
    }
    out[m] = mean;
    out[bands + m] = std::sqrt(sq / frames);
  }
  return out;
}

FeatureVector extract_features(const AudioClip& clip, const FeatureConfig& config) {
  return FeatureExtractor(config)(clip);
}

}  // namespace padback
