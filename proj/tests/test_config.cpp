#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "padback/config.hpp"
#include "padback/errors.hpp"
#include "padback/rng.hpp"

namespace padback {
namespace {

TEST(Config, DefaultsAreValid) {
  const ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.rate_percent, 10.0);
  EXPECT_EQ(c.trigger_len, 600u);
  EXPECT_EQ(c.train.epochs, 100u);
  EXPECT_EQ(c.train.batch_size, 32u);
  EXPECT_EQ(c.train.learning_rate, 0.05);
  EXPECT_EQ(c.hidden, (std::vector<std::size_t>{128, 128}));
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c;
  c.seed = 99;
  c.mode = PaddingMode::Wrap;
  c.trigger_len = 800;
  c.train.optimizer = Optimizer::SGD;
  c.train.min_std = 0.3;
  c.hidden = {64};
  const auto back = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.mode, PaddingMode::Wrap);
  EXPECT_EQ(back.train.optimizer, Optimizer::SGD);
}

TEST(Config, PartialJsonKeepsDefaults) {
  const auto c = ExperimentConfig::from_json(nlohmann::json::parse(R"({"poison": {"rate_percent": 4}})"));
  EXPECT_EQ(c.rate_percent, 4.0);
  EXPECT_EQ(c.seed, ExperimentConfig{}.seed);
}

TEST(Config, Rejections) {
  using nlohmann::json;
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"sed": 1})")), ValidationError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"train": {"lr": 1}})")), ValidationError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"seed": "x"})")), ValidationError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"poison": {"mode": "reverb"}})")),
               ValidationError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"poison": {"target_label": 10}})")),
               ValidationError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"train_fraction": 1.0})")),
               ValidationError);
  TempDir dir;
  std::ofstream(dir / "bad.json") << "{ nope";
  EXPECT_THROW(ExperimentConfig::load(dir / "bad.json"), ValidationError);
  EXPECT_THROW(ExperimentConfig::load(dir / "absent.json"), ValidationError);
}

TEST(Config, SubstreamsAreDistinct) {
  const ExperimentConfig c;
  std::set<std::uint64_t> seeds{c.corpus_spec().seed, c.split_seed(), c.poison_plan().seed,
                                c.train_config().seed, c.experiment_settings().init_seed};
  EXPECT_EQ(seeds.size(), 5u);
  EXPECT_EQ(derive_seed(1, "a"), derive_seed(1, "a"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(2, "a"));
  EXPECT_NE(derive_seed(1, "a", 0, 1), derive_seed(1, "a", 1, 0));
}

TEST(Rng, Basics) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
  Rng r(1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
  std::vector<int> counts(7);
  for (int i = 0; i < 70000; ++i) counts[r.below(7)]++;
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  auto p = permutation(50, r);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], i);
}

}  // namespace
}  // namespace padback
