#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "padback/errors.hpp"
#include "padback/vad.hpp"

namespace padback {
namespace {

// One value per 4-sample frame.
AudioClip frames_of(std::vector<double> levels) {
  AudioClip c;
  for (double v : levels) {
    for (int i = 0; i < 4; ++i) c.samples.push_back(i % 2 ? -v : v);
  }
  return c;
}

VadConfig small_config() {
  VadConfig cfg;
  cfg.frame_len = 4;
  cfg.hop = 4;
  cfg.threshold = 0.1;
  cfg.hangover_frames = 2;
  return cfg;
}

TEST(Vad, DecisionsAndHangover) {
  const auto cfg = small_config();
  // Gap of 2 is bridged, gap of 3 is not, trailing silence stays inactive.
  const auto d = vad_decisions(frames_of({0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0}), cfg);
  EXPECT_EQ(d, (std::vector<std::uint8_t>{0, 1, 1, 1, 1, 0, 0, 0, 1, 0, 0}));
  const auto s = vad_segments(frames_of({0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0}), cfg);
  EXPECT_EQ(s, (std::vector<Segment>{{1, 5}, {8, 9}}));
}

TEST(Vad, ThresholdIsStrict) {
  auto cfg = small_config();
  cfg.threshold = 0.5;
  EXPECT_EQ(vad_decisions(frames_of({0.5, 0.6}), cfg), (std::vector<std::uint8_t>{0, 1}));
  EXPECT_TRUE(vad_segments(frames_of({0.0, 0.0}), cfg).empty());
}

TEST(Vad, ZeroPaddingDoesNotMoveTheBoundary) {
  const auto cfg = small_config();
  const AudioClip clean = frames_of({0, 1, 1, 0.5, 0});
  const auto report = vad_check(clean, zero_pad(clean, 40), cfg);
  EXPECT_EQ(report.boundary_shift_frames, 0);
  EXPECT_FALSE(report.triggered_region_active);
  EXPECT_EQ(report.clean_segments, report.poisoned_segments);
}

TEST(Vad, WrapPaddingExtendsSpeech) {
  const auto cfg = small_config();
  const AudioClip clean = frames_of({1, 1, 0, 1});
  const auto report = vad_check(clean, wrap_pad(clean, 8), cfg);
  EXPECT_EQ(report.boundary_shift_frames, 2);
  EXPECT_TRUE(report.triggered_region_active);
}

TEST(Vad, RealUtterances) {
  const Corpus c = tiny_corpus(2, 3, 8);
  const VadConfig cfg;
  for (const auto& s : c.samples) {
    const auto r = vad_check(*s.clip, zero_pad(*s.clip, 600), cfg);
    EXPECT_EQ(r.boundary_shift_frames, 0);
    EXPECT_FALSE(r.triggered_region_active);
    ASSERT_FALSE(r.clean_segments.empty());
  }
}

TEST(Vad, Errors) {
  const auto cfg = small_config();
  const AudioClip a = frames_of({1, 0});
  AudioClip b = zero_pad(a, 4);
  b.samples[0] = 0.3;
  EXPECT_THROW(vad_check(a, b, cfg), ValidationError);
  EXPECT_THROW(vad_check(zero_pad(a, 4), a, cfg), ValidationError);
  auto bad = cfg;
  bad.threshold = 0.0;
  EXPECT_THROW(vad_decisions(a, bad), ValidationError);
}

}  // namespace
}  // namespace padback
