#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace padback {

inline constexpr int kDefaultSampleRate = 16000;
inline constexpr std::size_t kDefaultTriggerLength = 600;

// Mono waveform with nominal amplitude range [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  bool operator==(const AudioClip&) const = default;
};

// Throws ValidationError unless the clip is non-empty, has a positive sample
// rate and only finite samples.
void validate_clip(const AudioClip& clip);

enum class PaddingMode { Zero, Wrap };

std::string_view to_string(PaddingMode mode);
// Accepts "zero" / "wrap" (case-sensitive).
PaddingMode parse_padding_mode(std::string_view text);

// Padding trigger: `length_samples` samples appended at the end of a clip.
struct TriggerSpec {
  PaddingMode mode = PaddingMode::Zero;
  std::size_t length_samples = kDefaultTriggerLength;

  bool operator==(const TriggerSpec&) const = default;
};

// Appends `length` zeros.
AudioClip zero_pad(const AudioClip& clip, std::size_t length);

// Appends `length` samples repeating the clip cyclically from its first
// sample: out[n + k] = in[k mod n].
AudioClip wrap_pad(const AudioClip& clip, std::size_t length);

// Dispatches on spec.mode.
AudioClip apply_trigger(const AudioClip& clip, const TriggerSpec& spec);

// Additive blended trigger over the leading |trigger| samples:
// out[i] = (1 - alpha) * clip[i] + alpha * trigger[i], clamped to [-1, 1].
AudioClip blend_additive(const AudioClip& clip, const AudioClip& trigger,
                         double alpha);

std::size_t frame_count(std::size_t num_samples, std::size_t frame_len,
                        std::size_t hop);

// Per-frame root-mean-square energy, trailing partial frame dropped.
std::vector<double> rms_energy(const AudioClip& clip, std::size_t frame_len,
                               std::size_t hop);

}  // namespace padback
