#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <map>

#include "padback/checkpoint.hpp"
#include "padback/config.hpp"
#include "padback/errors.hpp"
#include "padback/experiment.hpp"
#include "padback/manifest.hpp"
#include "padback/report.hpp"
#include "padback/vad.hpp"
#include "padback/wav.hpp"

namespace padback::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Output tree under --out:
//   data/wav/        generated utterances
//   data/poisoned/   triggered copies written by `poison`
//   manifests/       train.jsonl, eval.jsonl, poisoned.jsonl
//   checkpoints/     model checkpoints
//   reports/         CSV / JSON results
struct Layout {
  fs::path root;
  fs::path wav_dir() const { return root / "data" / "wav"; }
  fs::path poisoned_dir() const { return root / "data" / "poisoned"; }
  fs::path manifest(const std::string& name) const { return root / "manifests" / (name + ".jsonl"); }
  fs::path checkpoint(const std::string& name) const { return root / "checkpoints" / (name + ".json"); }
  fs::path report(const std::string& name) const { return root / "reports" / name; }
};

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::string mode;
  double rate = 0.0;
  std::size_t trigger_len = 0;
  int target_label = 0;
  std::string out;
  bool force = false;

  CLI::App* command = nullptr;  // the parsed subcommand

  // Command-specific.
  std::string manifest;
  std::string eval_manifest;
  std::string checkpoint;
  std::string reference;
  std::string report;
  std::string format = "csv";
  std::string axis;
  std::vector<double> values;
  std::vector<double> ratios{0.0, 0.25, 0.5, 0.75, 0.9, 0.95};
  std::vector<double> thresholds{0.005, 0.01, 0.02, 0.05};
  std::size_t hangover = 3;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON experiment config (defaults apply to missing keys)");
  cmd->add_option("--seed", o.seed, "Root seed");
  cmd->add_option("--mode", o.mode, "Trigger padding mode")->check(CLI::IsMember({"zero", "wrap"}));
  cmd->add_option("--rate", o.rate, "Poisoning rate in percent");
  cmd->add_option("--trigger-len", o.trigger_len, "Trigger length in samples");
  cmd->add_option("--target-label", o.target_label, "Attack target class");
  cmd->add_option("--out", o.out, "Output directory (overrides config out_dir)");
  cmd->add_flag("--force", o.force, "Overwrite existing outputs");
}

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config);
  const auto given = [&](const char* name) { return o.command->get_option(name)->count() > 0; };
  if (given("--seed")) c.seed = o.seed;
  if (!o.mode.empty()) c.mode = parse_padding_mode(o.mode);
  if (given("--rate")) c.rate_percent = o.rate;
  if (given("--trigger-len")) c.trigger_len = o.trigger_len;
  if (given("--target-label")) c.target_label = o.target_label;
  if (!o.out.empty()) c.out_dir = o.out;
  c.validate();
  return c;
}

void guard(const fs::path& path, bool force) {
  if (fs::exists(path) && !force) {
    throw ValidationError(path.string() + " already exists; pass --force to overwrite");
  }
}

void reset_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    guard(dir, force);
    fs::remove_all(dir);
  }
  fs::create_directories(dir);
}

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

fs::path report_path(const Options& o, const Layout& layout, const std::string& stem) {
  if (!o.report.empty()) return o.report;
  return layout.report(stem + (o.format == "json" ? ".json" : ".csv"));
}

ReportFormat report_format(const Options& o) {
  return o.format == "json" ? ReportFormat::Json : ReportFormat::Csv;
}

json run_meta(const ExperimentConfig& c) {
  return {{"seed", c.seed},
          {"mode", std::string(to_string(c.mode))},
          {"trigger_len", c.trigger_len},
          {"target_label", c.target_label},
          {"rate_percent", c.rate_percent},
          {"feature_fingerprint", c.features.fingerprint()}};
}

void write_json(const fs::path& path, const json& j) {
  fs::create_directories(fs::absolute(path).parent_path());
  write_file_atomic(path, j.dump(2) + "\n");
}

void print_rows(std::ostream& out, const std::vector<ResultRow>& rows) {
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-12s BA=%.4f ASR=%.4f dACC=%+.4f dASR=%+.4f\n",
                  r.condition.c_str(), r.metrics.ba, r.metrics.asr, r.metrics.dacc, r.metrics.dasr);
    out << line;
  }
}

std::vector<std::string> utterance_stems(const ExperimentConfig& c) {
  std::vector<std::string> stems;
  char buf[64];
  for (int s = 0; s < c.num_speakers; ++s) {
    for (int u = 0; u < c.utterances_per_speaker; ++u) {
      std::snprintf(buf, sizeof buf, "spk%02d_utt%03d", s, u);
      stems.emplace_back(buf);
    }
  }
  return stems;
}

int cmd_gen_data(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = resolve(o);
  const Layout layout{cfg.out_dir};
  guard(layout.manifest("train"), o.force);
  guard(layout.manifest("eval"), o.force);
  reset_dir(layout.wav_dir(), o.force);

  const Corpus corpus = persist_corpus(generate_corpus(cfg.corpus_spec()), layout.wav_dir(),
                                       utterance_stems(cfg));
  const Split split = split_train_eval(corpus, cfg.train_fraction, cfg.split_seed());
  write_manifest(split.train, layout.manifest("train"));
  write_manifest(split.eval, layout.manifest("eval"));
  json resolved = cfg.to_json();
  resolved.erase("out_dir");
  write_json(layout.root / "config.json", resolved);

  out << "generated " << corpus.size() << " utterances (" << split.train.size() << " train, "
      << split.eval.size() << " eval) under " << layout.root.string() << "\n";
  return kExitOk;
}

int cmd_poison(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = resolve(o);
  const Layout layout{cfg.out_dir};
  const fs::path source = or_default(o.manifest, layout.manifest("train"));
  const fs::path target = layout.manifest("poisoned");
  const fs::path report = layout.report("poison_report.json");
  guard(target, o.force);
  guard(report, o.force);

  const Corpus train = read_manifest(source, cfg.num_speakers);
  const PoisonPlan plan = cfg.poison_plan();
  PoisonedDataset poisoned = build_poisoned_dataset(train, plan);
  reset_dir(layout.poisoned_dir(), o.force);
  const std::string suffix =
      "_" + std::string(to_string(plan.trigger.mode)) + std::to_string(plan.trigger.length_samples);
  for (std::size_t i : poisoned.report.selected) {
    auto& sample = poisoned.corpus.samples[i];
    const fs::path wav =
        layout.poisoned_dir() / (fs::path(train.samples[i].path).stem().string() + suffix + ".wav");
    write_wav(wav, *sample.clip);
    sample.path = wav.string();
  }
  write_manifest(poisoned.corpus, target);

  const auto& r = poisoned.report;
  write_json(report, {{"rate_percent", r.rate_percent},
                      {"num_total", r.num_total},
                      {"num_poisoned", r.selected.size()},
                      {"target_label", r.target_label},
                      {"mode", std::string(to_string(r.trigger.mode))},
                      {"trigger_len", r.trigger.length_samples},
                      {"exclude_target_class", plan.exclude_target_class},
                      {"per_class_counts", r.per_class_counts},
                      {"selected", r.selected}});
  out << "poisoned " << r.selected.size() << " of " << r.num_total << " samples ("
      << to_string(r.trigger.mode) << ", " << r.trigger.length_samples << " samples) -> "
      << target.string() << "\n";
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = resolve(o);
  const Layout layout{cfg.out_dir};
  const fs::path source = or_default(o.manifest, layout.manifest("train"));
  const fs::path ckpt = or_default(o.checkpoint, layout.checkpoint("model"));
  const fs::path trace_path = layout.report(ckpt.stem().string() + "_trace.csv");
  guard(ckpt, o.force);

  const Corpus dataset = read_manifest(source, cfg.num_speakers);
  const TrainResult result = train_classifier(dataset, cfg.experiment_settings());
  fs::create_directories(fs::absolute(ckpt).parent_path());
  save_checkpoint(result.model, ckpt);

  std::string trace = "epoch,loss,accuracy\n";
  char line[96];
  for (const auto& e : result.trace) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f\n", e.epoch, e.loss, e.accuracy);
    trace += line;
  }
  fs::create_directories(fs::absolute(trace_path).parent_path());
  write_file_atomic(trace_path, trace);

  const auto& last = result.trace.back();
  std::snprintf(line, sizeof line, "loss=%.6f acc=%.4f", last.loss, last.accuracy);
  out << "trained on " << dataset.size() << " samples for " << result.trace.size() << " epochs ("
      << line << ") -> " << ckpt.string() << "\n";
  return kExitOk;
}

Classifier load_model(const fs::path& path, const ExperimentConfig& cfg) {
  Classifier model = load_checkpoint(path);
  if (model.feature_fingerprint != cfg.features.fingerprint()) {
    throw ValidationError(path.string() + " was trained on features " + model.feature_fingerprint +
                          " but the config describes " + cfg.features.fingerprint());
  }
  return model;
}

EvalSet load_eval_set(const fs::path& manifest, const ExperimentConfig& cfg, int num_classes) {
  const Corpus eval = read_manifest(manifest, num_classes);
  return make_eval_set(eval, TriggerSpec{cfg.mode, cfg.trigger_len}, cfg.target_label,
                       FeatureExtractor(cfg.features));
}

int cmd_eval(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = resolve(o);
  const Layout layout{cfg.out_dir};
  const Classifier model = load_model(or_default(o.checkpoint, layout.checkpoint("model")), cfg);
  const fs::path report = report_path(o, layout, "eval");
  guard(report, o.force);

  const EvalSet eval = load_eval_set(or_default(o.manifest, layout.manifest("eval")), cfg,
                                     static_cast<int>(model.num_classes()));
  ResultRow row{"eval", cfg.rate_percent, cfg.trigger_len, std::string(to_string(cfg.mode)),
                measure(model, eval)};
  if (!o.reference.empty()) {
    const AttackMetrics ref = measure(load_model(o.reference, cfg), eval);
    const Degradation d = degradation_metrics(ref, row.metrics);
    row.metrics.dacc = d.dacc;
    row.metrics.dasr = d.dasr;
  }
  const std::vector<ResultRow> rows{row};
  fs::create_directories(fs::absolute(report).parent_path());
  emit_report(rows, report, report_format(o), run_meta(cfg));
  print_rows(out, rows);
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = resolve(o);
  const Layout layout{cfg.out_dir};
  require(o.axis == "rate" || o.axis == "length", "sweep: --axis must be rate or length");
  require(!o.values.empty(), "sweep: --values is empty");
  const fs::path report = report_path(o, layout, "sweep_" + o.axis);
  guard(report, o.force);

  const Corpus train = read_manifest(or_default(o.manifest, layout.manifest("train")), cfg.num_speakers);
  const Corpus eval =
      read_manifest(or_default(o.eval_manifest, layout.manifest("eval")), cfg.num_speakers);
  const AttackExperiment experiment(train, eval, cfg.experiment_settings());
  const PoisonPlan base = cfg.poison_plan();

  std::vector<ResultRow> rows{ResultRow{"clean", 0.0, base.trigger.length_samples, "none",
                                        experiment.clean_metrics(base.trigger, base.target_label)}};
  std::vector<ResultRow> cells;
  if (o.axis == "rate") {
    cells = sweep_poisoning_rate(experiment, o.values, base);
  } else {
    std::vector<std::size_t> lengths;
    for (double v : o.values) {
      require(v >= 1.0 && v == std::floor(v), "sweep: trigger lengths must be positive integers");
      lengths.push_back(static_cast<std::size_t>(v));
    }
    cells = sweep_trigger_length(experiment, lengths, base);
  }
  rows.insert(rows.end(), cells.begin(), cells.end());
  fs::create_directories(fs::absolute(report).parent_path());
  emit_report(rows, report, report_format(o), run_meta(cfg));
  print_rows(out, rows);
  return kExitOk;
}

int cmd_prune(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = resolve(o);
  const Layout layout{cfg.out_dir};
  const Classifier model = load_model(or_default(o.checkpoint, layout.checkpoint("model")), cfg);
  const fs::path report = report_path(o, layout, "prune");
  guard(report, o.force);

  const EvalSet eval = load_eval_set(or_default(o.manifest, layout.manifest("eval")), cfg,
                                     static_cast<int>(model.num_classes()));
  const auto rows = pruning_curve(model, eval.clean, o.ratios, eval, cfg.rate_percent);
  fs::create_directories(fs::absolute(report).parent_path());
  emit_report(rows, report, report_format(o), run_meta(cfg));
  print_rows(out, rows);
  return kExitOk;
}

int cmd_vad_check(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = resolve(o);
  const Layout layout{cfg.out_dir};
  const fs::path report = o.report.empty() ? layout.report("vad.json") : fs::path(o.report);
  guard(report, o.force);
  require(!o.thresholds.empty(), "vad-check: --thresholds is empty");

  const Corpus corpus = read_manifest(or_default(o.manifest, layout.manifest("eval")), cfg.num_speakers);
  const TriggerSpec trigger{cfg.mode, cfg.trigger_len};
  std::vector<AudioClip> triggered;
  for (const auto& s : corpus.samples) triggered.push_back(apply_trigger(*s.clip, trigger));

  json results = json::array();
  for (double threshold : o.thresholds) {
    VadConfig vad;
    vad.threshold = threshold;
    vad.hangover_frames = o.hangover;
    std::size_t shifted = 0, active = 0;
    long long worst = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const VadReport r = vad_check(*corpus.samples[i].clip, triggered[i], vad);
      shifted += r.boundary_shift_frames != 0;
      active += r.triggered_region_active;
      worst = std::max(worst, std::llabs(r.boundary_shift_frames));
    }
    results.push_back({{"threshold", threshold},
                       {"boundary_shifted", shifted},
                       {"max_abs_shift_frames", worst},
                       {"triggered_region_active", active}});
    char line[160];
    std::snprintf(line, sizeof line, "threshold=%g shifted=%zu/%zu active_in_trigger=%zu max_shift=%lld\n",
                  threshold, shifted, corpus.size(), active, worst);
    out << line;
  }
  const VadConfig defaults;
  write_json(report, {{"mode", std::string(to_string(trigger.mode))},
                      {"trigger_len", trigger.length_samples},
                      {"frame_len", defaults.frame_len},
                      {"hop", defaults.hop},
                      {"hangover_frames", o.hangover},
                      {"utterances", corpus.size()},
                      {"thresholds", results}});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Padding-trigger backdoor experiments for speaker identification", "padback"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-data", "Synthesize the corpus and write train/eval manifests");
  add_common(gen, o);

  auto* poison = app.add_subcommand("poison", "Build the poisoned training set D_b");
  add_common(poison, o);
  poison->add_option("--manifest", o.manifest, "Clean training manifest");

  auto* train = app.add_subcommand("train", "Train a classifier on a manifest");
  add_common(train, o);
  train->add_option("--manifest", o.manifest, "Training manifest");
  train->add_option("--checkpoint", o.checkpoint, "Output checkpoint path");

  auto* eval = app.add_subcommand("eval", "Benign accuracy and attack success rate");
  add_common(eval, o);
  eval->add_option("--checkpoint", o.checkpoint, "Model checkpoint");
  eval->add_option("--manifest", o.manifest, "Clean evaluation manifest");
  eval->add_option("--reference", o.reference, "Reference checkpoint for dACC / dASR");

  auto* sweep = app.add_subcommand("sweep", "Train/evaluate over poisoning rates or trigger lengths");
  add_common(sweep, o);
  sweep->add_option("--axis", o.axis, "rate or length")->required()->check(CLI::IsMember({"rate", "length"}));
  sweep->add_option("--values", o.values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--manifest", o.manifest, "Clean training manifest");
  sweep->add_option("--eval-manifest", o.eval_manifest, "Clean evaluation manifest");

  auto* prune = app.add_subcommand("prune", "Pruning defense curve on the last hidden layer");
  add_common(prune, o);
  prune->add_option("--checkpoint", o.checkpoint, "Model checkpoint");
  prune->add_option("--manifest", o.manifest, "Clean evaluation manifest");
  prune->add_option("--ratios", o.ratios, "Comma-separated pruning ratios in [0, 1)")->delimiter(',');

  auto* vad = app.add_subcommand("vad-check", "Energy VAD on clean vs triggered utterances");
  add_common(vad, o);
  vad->add_option("--manifest", o.manifest, "Manifest of utterances to check");
  vad->add_option("--thresholds", o.thresholds, "Comma-separated RMS thresholds")->delimiter(',');
  vad->add_option("--hangover", o.hangover, "Hangover in frames");
  vad->add_option("--report", o.report, "Output JSON path");

  for (auto* cmd : {eval, sweep, prune}) {
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--report", o.report, "Output report path");
  }

  std::vector<const char*> argv{"padback"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
  }

  const std::map<CLI::App*, int (*)(const Options&, std::ostream&)> handlers{
      {gen, cmd_gen_data}, {poison, cmd_poison}, {train, cmd_train},       {eval, cmd_eval},
      {sweep, cmd_sweep},  {prune, cmd_prune},   {vad, cmd_vad_check}};
  try {
    for (const auto& [cmd, handler] : handlers) {
      if (!cmd->parsed()) continue;
      o.command = cmd;
      return handler(o, out);
    }
    err << "error: no command\n";
    return kExitInvalid;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const padback::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace padback::cli
