#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "padback/audio.hpp"

namespace padback {

// Energy-threshold voice activity detector. A frame is active when its RMS
// energy exceeds the threshold; inactive gaps of at most `hangover_frames`
// frames between two active frames are bridged. Segment ends are never
// extended past the last energetic frame.
struct VadConfig {
  double threshold = 0.01;
  std::size_t frame_len = 160;
  std::size_t hop = 160;
  std::size_t hangover_frames = 3;

  void validate() const;
};

struct Segment {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;  // exclusive

  bool operator==(const Segment&) const = default;
};

std::vector<std::uint8_t> vad_decisions(const AudioClip& clip, const VadConfig& config);
std::vector<Segment> vad_segments(const AudioClip& clip, const VadConfig& config);

struct VadReport {
  std::vector<Segment> clean_segments;
  std::vector<Segment> poisoned_segments;
  // End of the final poisoned speech segment minus that of the clean clip.
  long long boundary_shift_frames = 0;
  // Some active frame lies entirely inside the appended region.
  bool triggered_region_active = false;
};

// `poisoned` must extend `clean` (identical prefix, possibly nothing appended).
VadReport vad_check(const AudioClip& clean, const AudioClip& poisoned, const VadConfig& config);

}  // namespace padback
