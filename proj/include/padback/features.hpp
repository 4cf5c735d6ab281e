#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "padback/audio.hpp"
#include "padback/matrix.hpp"

namespace padback {

enum class Pooling { MeanStd };

// Log-mel front-end settings. Defaults: 25 ms / 10 ms framing at 16 kHz,
// 512-point FFT, 40 mel bands.
struct FeatureConfig {
  std::size_t frame_len = 400;
  std::size_t hop = 160;
  std::size_t fft_size = 512;
  std::size_t n_mels = 40;
  double log_floor = 1e-10;
  Pooling pooling = Pooling::MeanStd;
  int sample_rate = kDefaultSampleRate;

  void validate() const;
  std::size_t dim() const { return 2 * n_mels; }
  // Stable hex digest of every field; stored in checkpoints so features and
  // models can be matched.
  std::string fingerprint() const;

  bool operator==(const FeatureConfig&) const = default;
};

using FeatureVector = std::vector<double>;

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Symmetric Hann window: w[k] = 0.5 - 0.5 cos(2 pi k / (n - 1)).
std::vector<double> hann_window(std::size_t n);

// One windowed frame per row.
Matrix frame_and_window(const AudioClip& clip, const FeatureConfig& config);

// n_mels x (fft_size / 2 + 1) triangular filters, edges equally spaced in mel
// from 0 Hz to Nyquist.
Matrix mel_filterbank(const FeatureConfig& config);

// Precomputes the window and filterbank once; immutable and safe to share
// across threads.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureConfig config);

  const FeatureConfig& config() const { return config_; }
  const Matrix& filterbank() const { return filterbank_; }

  // frames x n_mels matrix of log(mel energy + log_floor).
  Matrix log_mel(const AudioClip& clip) const;

  // Mean and population standard deviation of each band over time.
  FeatureVector operator()(const AudioClip& clip) const;

 private:
  FeatureConfig config_;
  std::vector<double> window_;
  Matrix filterbank_;
};

FeatureVector extract_features(const AudioClip& clip, const FeatureConfig& config);

}  // namespace padback
