#include "padback/audio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "padback/errors.hpp"

namespace padback {

void validate_clip(const AudioClip& clip) {
  require(!clip.empty(), "audio clip is empty");
  require(clip.sample_rate > 0, "sample rate must be positive");
  for (std::size_t i = 0; i < clip.size(); ++i) {
    if (!std::isfinite(clip.samples[i])) {
      throw ValidationError("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::string_view to_string(PaddingMode mode) {
  switch (mode) {
    case PaddingMode::Zero:
      return "zero";
    case PaddingMode::Wrap:
      return "wrap";
  }
  return "unknown";
}

PaddingMode parse_padding_mode(std::string_view text) {
  if (text == "zero") return PaddingMode::Zero;
  if (text == "wrap") return PaddingMode::Wrap;
  throw ValidationError("unknown padding mode '" + std::string(text) +
                        "' (expected zero|wrap)");
}

AudioClip zero_pad(const AudioClip& clip, std::size_t length) {
  require(!clip.empty(), "zero_pad: clip is empty");
  require(length > 0, "zero_pad: padding length must be >= 1");
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples = clip.samples;
  out.samples.resize(clip.size() + length, 0.0);
  return out;
}

AudioClip wrap_pad(const AudioClip& clip, std::size_t length) {
  require(!clip.empty(), "wrap_pad: clip is empty");
  require(length > 0, "wrap_pad: padding length must be >= 1");
  const std::size_t n = clip.size();
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples = clip.samples;
  std::size_t remaining = length;
  while (remaining > 0) {
    const std::size_t chunk = std::min(remaining, n);
    out.samples.insert(out.samples.end(), clip.samples.begin(),
                       clip.samples.begin() + static_cast<std::ptrdiff_t>(chunk));
    remaining -= chunk;
  }
  return out;
}

AudioClip apply_trigger(const AudioClip& clip, const TriggerSpec& spec) {
  switch (spec.mode) {
    case PaddingMode::Zero:
      return zero_pad(clip, spec.length_samples);
    case PaddingMode::Wrap:
      return wrap_pad(clip, spec.length_samples);
  }
  throw ValidationError("apply_trigger: unknown padding mode");
}

AudioClip blend_additive(const AudioClip& clip, const AudioClip& trigger,
                         double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "blend_additive: alpha must be in (0, 1]");
  require(clip.sample_rate == trigger.sample_rate,
          "blend_additive: sample rate mismatch (" +
              std::to_string(clip.sample_rate) + " vs " +
              std::to_string(trigger.sample_rate) + ")");
  require(trigger.size() <= clip.size(),
          "blend_additive: trigger is longer than the clip");
  AudioClip out = clip;
  for (std::size_t i = 0; i < trigger.size(); ++i) {
    const double mixed = (1.0 - alpha) * clip.samples[i] + alpha * trigger.samples[i];
    out.samples[i] = std::clamp(mixed, -1.0, 1.0);
  }
  return out;
}

std::size_t frame_count(std::size_t num_samples, std::size_t frame_len,
                        std::size_t hop) {
  if (frame_len == 0 || hop == 0 || num_samples < frame_len) return 0;
  return (num_samples - frame_len) / hop + 1;
}

std::vector<double> rms_energy(const AudioClip& clip, std::size_t frame_len,
                               std::size_t hop) {
  require(frame_len >= 1, "rms_energy: frame length must be >= 1");
  require(hop >= 1, "rms_energy: hop must be >= 1");
  require(frame_len <= clip.size(), "rms_energy: frame length " +
                                        std::to_string(frame_len) +
                                        " exceeds clip length " +
                                        std::to_string(clip.size()));
  const std::size_t frames = frame_count(clip.size(), frame_len, hop);
  std::vector<double> energy(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const double* x = clip.samples.data() + f * hop;
    double sum = 0.0;
    for (std::size_t k = 0; k < frame_len; ++k) sum += x[k] * x[k];
    energy[f] = std::sqrt(sum / static_cast<double>(frame_len));
  }
  return energy;
}

}  // namespace padback
