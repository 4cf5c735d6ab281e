#include "padback/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "padback/errors.hpp"
#include "padback/wav.hpp"

namespace padback {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string line_ref(const fs::path& manifest, std::size_t line) {
  return manifest.string() + ":" + std::to_string(line);
}

fs::path resolve(const fs::path& manifest, const std::string& entry) {
  fs::path p(entry);
  if (p.is_relative()) p = manifest.parent_path() / p;
  return p.lexically_normal();
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<ManifestRecord> read_manifest_records(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ParseError("manifest: cannot open " + manifest.string());
  std::vector<ManifestRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = line_ref(manifest, line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": malformed record: " + e.what());
    }
    try {
      if (!j.is_object()) throw ParseError(where + ": record is not a JSON object");
      for (const auto& [key, _] : j.items()) {
        if (key != "path" && key != "label" && key != "original_label" && key != "poisoned" &&
            key != "num_samples") {
          throw ParseError(where + ": unknown key '" + key + "'");
        }
      }
      ManifestRecord r;
      r.path = j.at("path").get<std::string>();
      r.label = j.at("label").get<int>();
      r.original_label = j.at("original_label").get<int>();
      r.poisoned = j.at("poisoned").get<bool>();
      r.num_samples = j.at("num_samples").get<std::size_t>();
      if (r.path.empty()) throw ParseError(where + ": empty path");
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(where + ": malformed record: " + e.what());
    }
  }
  if (records.empty()) throw ParseError("manifest: " + manifest.string() + " has no records");
  return records;
}

void write_manifest_records(const std::vector<ManifestRecord>& records, const fs::path& manifest) {
  require(!records.empty(), "manifest: refusing to write an empty manifest");
  std::ostringstream out;
  for (const auto& r : records) {
    json j;
    j["path"] = r.path;
    j["label"] = r.label;
    j["original_label"] = r.original_label;
    j["poisoned"] = r.poisoned;
    j["num_samples"] = r.num_samples;
    out << j.dump() << '\n';
  }
  write_file_atomic(manifest, out.str());
}

void write_manifest(const Corpus& corpus, const fs::path& manifest) {
  corpus.validate();
  const fs::path base = fs::absolute(manifest).parent_path();
  fs::create_directories(base);
  std::vector<ManifestRecord> records;
  records.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus.samples[i];
    require(!s.path.empty(), "manifest: sample " + std::to_string(i) + " has no WAV path");
    require(fs::exists(s.path), "manifest: WAV for sample " + std::to_string(i) +
                                    " does not exist: " + s.path);
    ManifestRecord r;
    r.path = fs::proximate(fs::absolute(s.path), base).generic_string();
    r.label = s.label;
    r.original_label = s.original_label;
    r.poisoned = s.poisoned;
    r.num_samples = s.num_samples();
    records.push_back(std::move(r));
  }
  write_manifest_records(records, manifest);
}

Corpus read_manifest(const fs::path& manifest, int num_speakers) {
  require(num_speakers >= 2, "manifest: num_speakers must be >= 2");
  const auto records = read_manifest_records(manifest);
  Corpus corpus;
  corpus.num_speakers = num_speakers;
  corpus.samples.reserve(records.size());
  std::size_t line = 0;
  for (const auto& r : records) {
    ++line;
    const std::string where = "manifest record " + std::to_string(line) + " (" + r.path + ")";
    if (r.label < 0 || r.label >= num_speakers || r.original_label < 0 ||
        r.original_label >= num_speakers) {
      throw ValidationError(where + ": label out of range [0, " + std::to_string(num_speakers) + ")");
    }
    if (!r.poisoned && r.label != r.original_label) {
      throw ValidationError(where + ": clean record with label != original_label");
    }
    const fs::path wav = resolve(manifest, r.path);
    if (!fs::exists(wav)) throw ParseError(where + ": missing WAV " + wav.string());
    auto clip = std::make_shared<const AudioClip>(read_wav(wav));
    if (clip->size() != r.num_samples) {
      throw ParseError(where + ": num_samples " + std::to_string(r.num_samples) +
                       " does not match WAV length " + std::to_string(clip->size()));
    }
    if (corpus.samples.empty()) corpus.sample_rate = clip->sample_rate;
    if (clip->sample_rate != corpus.sample_rate) {
      throw ParseError(where + ": sample rate differs from the rest of the manifest");
    }
    LabeledSample s;
    s.clip = std::move(clip);
    s.path = wav.string();
    s.label = r.label;
    s.original_label = r.original_label;
    s.poisoned = r.poisoned;
    corpus.samples.push_back(std::move(s));
  }
  corpus.validate();
  return corpus;
}

Corpus persist_corpus(const Corpus& corpus, const fs::path& dir,
                      const std::vector<std::string>& stems) {
  require(stems.size() == corpus.size(), "persist_corpus: one stem per sample required");
  fs::create_directories(dir);
  Corpus out = corpus;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const fs::path wav = dir / (stems[i] + ".wav");
    write_wav(wav, *out.samples[i].clip);
    out.samples[i].path = wav.string();
  }
  return out;
}

}  // namespace padback
