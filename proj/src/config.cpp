#include "padback/config.hpp"

#include <fstream>
#include <set>

#include "padback/errors.hpp"
#include "padback/rng.hpp"

namespace padback {
using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError("config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ValidationError("config: unknown key '" + where + key + "'");
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("config: bad value for '" + where + key + "': " + e.what());
  }
}

std::string_view optimizer_name(Optimizer o) { return o == Optimizer::SGD ? "sgd" : "momentum"; }

Optimizer parse_optimizer(const std::string& s) {
  if (s == "sgd") return Optimizer::SGD;
  if (s == "momentum") return Optimizer::Momentum;
  throw ValidationError("config: unknown optimizer '" + s + "' (expected sgd|momentum)");
}

}  // namespace

void ExperimentConfig::validate() const {
  corpus_spec().validate();
  require(train_fraction > 0.0 && train_fraction < 1.0, "config: train_fraction must be in (0, 1)");
  require(rate_percent > 0.0 && rate_percent < 100.0, "config: rate_percent must be in (0, 100)");
  require(target_label >= 0 && target_label < num_speakers,
          "config: target_label must be in [0, num_speakers)");
  require(trigger_len >= 1, "config: trigger_len must be >= 1");
  features.validate();
  require(features.sample_rate == sample_rate, "config: features.sample_rate must equal sample_rate");
  train.validate();
  require(!hidden.empty(), "config: at least one hidden layer is required");
  for (auto h : hidden) require(h > 0, "config: hidden widths must be positive");
  require(!out_dir.empty(), "config: out_dir must not be empty");
}

CorpusSpec ExperimentConfig::corpus_spec() const {
  CorpusSpec spec;
  spec.num_speakers = num_speakers;
  spec.utterances_per_speaker = utterances_per_speaker;
  spec.min_duration_s = min_duration_s;
  spec.max_duration_s = max_duration_s;
  spec.sample_rate = sample_rate;
  spec.seed = derive_seed(seed, "corpus");
  return spec;
}

std::uint64_t ExperimentConfig::split_seed() const { return derive_seed(seed, "split"); }

PoisonPlan ExperimentConfig::poison_plan() const {
  PoisonPlan plan;
  plan.rate_percent = rate_percent;
  plan.target_label = target_label;
  plan.trigger = {mode, trigger_len};
  plan.seed = derive_seed(seed, "poison");
  plan.exclude_target_class = exclude_target_class;
  return plan;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t = train;
  t.seed = derive_seed(seed, "shuffle");
  return t;
}

ExperimentSettings ExperimentConfig::experiment_settings() const {
  ExperimentSettings s;
  s.features = features;
  s.train = train_config();
  s.hidden = hidden;
  s.init_seed = derive_seed(seed, "init");
  return s;
}

json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["corpus"] = {{"num_speakers", num_speakers},
                 {"utterances_per_speaker", utterances_per_speaker},
                 {"min_duration_s", min_duration_s},
                 {"max_duration_s", max_duration_s},
                 {"sample_rate", sample_rate}};
  j["train_fraction"] = train_fraction;
  j["poison"] = {{"rate_percent", rate_percent},
                 {"target_label", target_label},
                 {"mode", std::string(to_string(mode))},
                 {"trigger_len", trigger_len},
                 {"exclude_target_class", exclude_target_class}};
  j["features"] = {{"frame_len", features.frame_len}, {"hop", features.hop},
                   {"fft_size", features.fft_size},   {"n_mels", features.n_mels},
                   {"log_floor", features.log_floor}};
  j["train"] = {{"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"learning_rate", train.learning_rate},
                {"optimizer", std::string(optimizer_name(train.optimizer))},
                {"momentum", train.momentum},
                {"weight_decay", train.weight_decay},
                {"min_std", train.min_std},
                {"shuffle_each_epoch", train.shuffle_each_epoch},
                {"standardize_inputs", train.standardize_inputs},
                {"hidden", hidden}};
  j["out_dir"] = out_dir.generic_string();
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, {"seed", "corpus", "train_fraction", "poison", "features", "train", "out_dir"}, "");
  read_if(j, "seed", c.seed, "");
  read_if(j, "train_fraction", c.train_fraction, "");
  if (j.contains("out_dir")) {
    std::string out;
    read_if(j, "out_dir", out, "");
    c.out_dir = out;
  }
  if (j.contains("corpus")) {
    const auto& k = j.at("corpus");
    reject_unknown(k, {"num_speakers", "utterances_per_speaker", "min_duration_s", "max_duration_s",
                       "sample_rate"}, "corpus.");
    read_if(k, "num_speakers", c.num_speakers, "corpus.");
    read_if(k, "utterances_per_speaker", c.utterances_per_speaker, "corpus.");
    read_if(k, "min_duration_s", c.min_duration_s, "corpus.");
    read_if(k, "max_duration_s", c.max_duration_s, "corpus.");
    read_if(k, "sample_rate", c.sample_rate, "corpus.");
    c.features.sample_rate = c.sample_rate;
  }
  if (j.contains("poison")) {
    const auto& p = j.at("poison");
    reject_unknown(p, {"rate_percent", "target_label", "mode", "trigger_len", "exclude_target_class"},
                   "poison.");
    read_if(p, "rate_percent", c.rate_percent, "poison.");
    read_if(p, "target_label", c.target_label, "poison.");
    read_if(p, "trigger_len", c.trigger_len, "poison.");
    read_if(p, "exclude_target_class", c.exclude_target_class, "poison.");
    if (p.contains("mode")) {
      std::string mode;
      read_if(p, "mode", mode, "poison.");
      c.mode = parse_padding_mode(mode);
    }
  }
  if (j.contains("features")) {
    const auto& f = j.at("features");
    reject_unknown(f, {"frame_len", "hop", "fft_size", "n_mels", "log_floor"}, "features.");
    read_if(f, "frame_len", c.features.frame_len, "features.");
    read_if(f, "hop", c.features.hop, "features.");
    read_if(f, "fft_size", c.features.fft_size, "features.");
    read_if(f, "n_mels", c.features.n_mels, "features.");
    read_if(f, "log_floor", c.features.log_floor, "features.");
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown(t, {"epochs", "batch_size", "learning_rate", "optimizer", "momentum",
                       "weight_decay", "min_std", "shuffle_each_epoch", "standardize_inputs",
                       "hidden"}, "train.");
    read_if(t, "epochs", c.train.epochs, "train.");
    read_if(t, "batch_size", c.train.batch_size, "train.");
    read_if(t, "learning_rate", c.train.learning_rate, "train.");
    read_if(t, "momentum", c.train.momentum, "train.");
    read_if(t, "weight_decay", c.train.weight_decay, "train.");
    read_if(t, "min_std", c.train.min_std, "train.");
    read_if(t, "shuffle_each_epoch", c.train.shuffle_each_epoch, "train.");
    read_if(t, "standardize_inputs", c.train.standardize_inputs, "train.");
    read_if(t, "hidden", c.hidden, "train.");
    if (t.contains("optimizer")) {
      std::string name;
      read_if(t, "optimizer", name, "train.");
      c.train.optimizer = parse_optimizer(name);
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace padback
