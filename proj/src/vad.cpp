#include "padback/vad.hpp"

#include <cmath>
#include <string>

#include "padback/errors.hpp"

namespace padback {

void VadConfig::validate() const {
  require(threshold > 0.0 && std::isfinite(threshold), "vad: threshold must be positive");
  require(frame_len >= 1 && hop >= 1, "vad: frame length and hop must be >= 1");
}

std::vector<std::uint8_t> vad_decisions(const AudioClip& clip, const VadConfig& config) {
  config.validate();
  const auto energy = rms_energy(clip, config.frame_len, config.hop);
  std::vector<std::uint8_t> active(energy.size());
  for (std::size_t f = 0; f < energy.size(); ++f) active[f] = energy[f] > config.threshold;

  // Hangover: bridge short pauses between active frames.
  std::size_t last_active = energy.size();
  for (std::size_t f = 0; f < active.size(); ++f) {
    if (!active[f]) continue;
    if (last_active != energy.size() && f - last_active - 1 <= config.hangover_frames) {
      for (std::size_t g = last_active + 1; g < f; ++g) active[g] = 1;
    }
    last_active = f;
  }
  return active;
}

std::vector<Segment> vad_segments(const AudioClip& clip, const VadConfig& config) {
  const auto active = vad_decisions(clip, config);
  std::vector<Segment> segments;
  for (std::size_t f = 0; f < active.size();) {
    if (!active[f]) {
      ++f;
      continue;
    }
    Segment s{f, f};
    while (f < active.size() && active[f]) ++f;
    s.end_frame = f;
    segments.push_back(s);
  }
  return segments;
}

VadReport vad_check(const AudioClip& clean, const AudioClip& poisoned, const VadConfig& config) {
  config.validate();
  require(clean.sample_rate == poisoned.sample_rate, "vad: sample rate mismatch");
  require(poisoned.size() >= clean.size(), "vad: poisoned clip is shorter than the clean clip");
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (clean.samples[i] != poisoned.samples[i]) {
      throw ValidationError("vad: poisoned clip does not extend the clean clip (differs at sample " +
                            std::to_string(i) + ")");
    }
  }

  VadReport report;
  report.clean_segments = vad_segments(clean, config);
  report.poisoned_segments = vad_segments(poisoned, config);
  const auto end_of = [](const std::vector<Segment>& s) {
    return s.empty() ? 0LL : static_cast<long long>(s.back().end_frame);
  };
  report.boundary_shift_frames = end_of(report.poisoned_segments) - end_of(report.clean_segments);

  const auto active = vad_decisions(poisoned, config);
  for (std::size_t f = 0; f < active.size(); ++f) {
    if (active[f] && f * config.hop >= clean.size()) {
      report.triggered_region_active = true;
      break;
    }
  }
  return report;
}

}  // namespace padback
