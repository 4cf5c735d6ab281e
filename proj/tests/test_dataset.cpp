#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "padback/dataset.hpp"
#include "padback/errors.hpp"

namespace padback {
namespace {

TEST(Corpus, GenerationIsDeterministic) {
  const Corpus a = tiny_corpus(3, 4, 77);
  const Corpus b = tiny_corpus(3, 4, 77);
  ASSERT_EQ(a.size(), 12u);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a.samples[i].clip, *b.samples[i].clip);
  EXPECT_NE(a.fingerprint(), tiny_corpus(3, 4, 78).fingerprint());
}

TEST(Corpus, ShapeAndLabels) {
  const Corpus c = tiny_corpus(4, 5, 1);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.class_counts(), (std::vector<std::size_t>{5, 5, 5, 5}));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& s = c.samples[i];
    EXPECT_EQ(s.label, static_cast<int>(i / 5));
    EXPECT_EQ(s.original_label, s.label);
    EXPECT_FALSE(s.poisoned);
    EXPECT_EQ(s.clip->size() % 160, 0u);
    EXPECT_GE(s.clip->size(), 8000u);
    EXPECT_LE(s.clip->size(), 9600u);
    double peak = 0.0;
    for (double x : s.clip->samples) peak = std::max(peak, std::abs(x));
    EXPECT_NEAR(peak, 0.9, 1e-12);
  }
}

TEST(Corpus, FingerprintIgnoresOrder) {
  Corpus c = tiny_corpus(2, 3, 9);
  const auto before = c.fingerprint();
  std::reverse(c.samples.begin(), c.samples.end());
  EXPECT_EQ(c.fingerprint(), before);
  c.samples[0].label = 1 - c.samples[0].label;
  c.samples[0].original_label = c.samples[0].label;
  EXPECT_NE(c.fingerprint(), before);
}

TEST(Corpus, SpeakersDiffer) {
  CorpusSpec spec;
  spec.seed = 3;
  std::set<double> f0s;
  for (int s = 0; s < spec.num_speakers; ++s) {
    const auto p = draw_speaker_profile(spec, s);
    EXPECT_GE(p.fundamental_hz, 90.0);
    EXPECT_LE(p.fundamental_hz, 300.0);
    EXPECT_LT(p.formant_hzs[0], p.formant_hzs[1]);
    EXPECT_LT(p.formant_hzs[1], p.formant_hzs[2]);
    f0s.insert(p.fundamental_hz);
  }
  EXPECT_EQ(f0s.size(), static_cast<std::size_t>(spec.num_speakers));
}

TEST(Corpus, SpecValidation) {
  CorpusSpec spec;
  spec.num_speakers = 1;
  EXPECT_THROW(generate_corpus(spec), ValidationError);
  spec = CorpusSpec{};
  spec.min_duration_s = 3.0;
  spec.max_duration_s = 1.0;
  EXPECT_THROW(generate_corpus(spec), ValidationError);
}

TEST(Split, StratifiedAndDisjoint) {
  const Corpus c = tiny_corpus(3, 10, 4);
  const Split s = split_train_eval(c, 0.9, 17);
  EXPECT_EQ(s.train.class_counts(), (std::vector<std::size_t>{9, 9, 9}));
  EXPECT_EQ(s.eval.class_counts(), (std::vector<std::size_t>{1, 1, 1}));
  std::set<const AudioClip*> seen;
  for (const auto& x : s.train.samples) seen.insert(x.clip.get());
  for (const auto& x : s.eval.samples) EXPECT_FALSE(seen.count(x.clip.get()));
  EXPECT_EQ(seen.size(), 27u);

  const Split again = split_train_eval(c, 0.9, 17);
  EXPECT_EQ(again.eval.fingerprint(), s.eval.fingerprint());
  const Split other = split_train_eval(c, 0.9, 18);
  EXPECT_EQ(other.eval.size(), 3u);
}

TEST(Split, Errors) {
  const Corpus c = tiny_corpus(2, 3, 4);
  EXPECT_THROW(split_train_eval(c, 0.0, 1), ValidationError);
  EXPECT_THROW(split_train_eval(c, 1.0, 1), ValidationError);
  // ceil(0.9 * 3) = 3 leaves nothing to evaluate.
  EXPECT_THROW(split_train_eval(c, 0.9, 1), ValidationError);
  EXPECT_NO_THROW(split_train_eval(c, 0.5, 1));
}

TEST(Poison, CountRounding) {
  EXPECT_EQ(poison_count(10.0, 900), 90u);
  EXPECT_EQ(poison_count(2.0, 900), 18u);
  EXPECT_EQ(poison_count(5.0, 10), 1u);   // 0.5 rounds up
  EXPECT_EQ(poison_count(4.0, 10), 0u);
  EXPECT_EQ(poison_count(15.0, 10), 2u);  // 1.5 rounds up
  EXPECT_THROW(poison_count(0.0, 10), ValidationError);
  EXPECT_THROW(poison_count(100.0, 10), ValidationError);
}

TEST(Poison, BuildsD_b) {
  const Corpus train = tiny_corpus(4, 10, 12);
  PoisonPlan plan;
  plan.rate_percent = 10.0;
  plan.target_label = 2;
  plan.seed = 99;
  plan.trigger = {PaddingMode::Wrap, 320};
  const auto out = build_poisoned_dataset(train, plan);

  ASSERT_EQ(out.corpus.size(), train.size());
  EXPECT_NO_THROW(out.corpus.validate());
  ASSERT_EQ(out.report.selected.size(), 4u);
  EXPECT_TRUE(std::is_sorted(out.report.selected.begin(), out.report.selected.end()));
  std::size_t total = 0;
  for (auto n : out.report.per_class_counts) total += n;
  EXPECT_EQ(total, 4u);

  std::set<std::size_t> chosen(out.report.selected.begin(), out.report.selected.end());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& before = train.samples[i];
    const auto& after = out.corpus.samples[i];
    EXPECT_EQ(after.original_label, before.label);
    if (chosen.count(i)) {
      EXPECT_TRUE(after.poisoned);
      EXPECT_EQ(after.label, 2);
      EXPECT_EQ(*after.clip, apply_trigger(*before.clip, plan.trigger));
    } else {
      EXPECT_FALSE(after.poisoned);
      EXPECT_EQ(after.label, before.label);
      EXPECT_EQ(after.clip, before.clip);
    }
  }
  // Input untouched.
  for (const auto& s : train.samples) EXPECT_FALSE(s.poisoned);

  const auto again = build_poisoned_dataset(train, plan);
  EXPECT_EQ(again.report.selected, out.report.selected);
  EXPECT_EQ(again.corpus.fingerprint(), out.corpus.fingerprint());
}

TEST(Poison, ExcludeTargetClass) {
  const Corpus train = tiny_corpus(3, 10, 12);
  PoisonPlan plan;
  plan.rate_percent = 50.0;
  plan.target_label = 0;
  plan.exclude_target_class = true;
  const auto out = build_poisoned_dataset(train, plan);
  EXPECT_EQ(out.report.selected.size(), 15u);
  EXPECT_EQ(out.report.per_class_counts[0], 0u);
  for (auto i : out.report.selected) EXPECT_NE(train.samples[i].label, 0);

  plan.rate_percent = 80.0;  // 24 > 20 candidates
  EXPECT_THROW(build_poisoned_dataset(train, plan), ValidationError);
}

TEST(Poison, Errors) {
  const Corpus train = tiny_corpus(2, 5, 12);
  PoisonPlan plan;
  plan.rate_percent = 2.0;  // rounds to zero of ten
  EXPECT_THROW(build_poisoned_dataset(train, plan), ValidationError);
  plan.rate_percent = 10.0;
  plan.target_label = 2;
  EXPECT_THROW(build_poisoned_dataset(train, plan), ValidationError);
  plan.target_label = -1;
  EXPECT_THROW(build_poisoned_dataset(train, plan), ValidationError);
  plan.target_label = 0;
  plan.trigger.length_samples = 0;
  EXPECT_THROW(build_poisoned_dataset(train, plan), ValidationError);

  plan.trigger.length_samples = 10;
  const auto once = build_poisoned_dataset(train, plan);
  EXPECT_THROW(build_poisoned_dataset(once.corpus, plan), ValidationError);
}

}  // namespace
}  // namespace padback
