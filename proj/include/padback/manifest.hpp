#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "padback/dataset.hpp"

namespace padback {

// One JSON object per line:
//   {"path": ..., "label": ..., "original_label": ..., "poisoned": ..., "num_samples": ...}
// Paths are written relative to the manifest's directory.
struct ManifestRecord {
  std::string path;
  int label = 0;
  int original_label = 0;
  bool poisoned = false;
  std::size_t num_samples = 0;

  bool operator==(const ManifestRecord&) const = default;
};

std::vector<ManifestRecord> read_manifest_records(const std::filesystem::path& manifest);
void write_manifest_records(const std::vector<ManifestRecord>& records,
                            const std::filesystem::path& manifest);

// Every sample must already have a WAV on disk at sample.path.
void write_manifest(const Corpus& corpus, const std::filesystem::path& manifest);

// Loads every referenced WAV; sample.path is resolved against the manifest
// directory. Labels are checked against num_speakers.
Corpus read_manifest(const std::filesystem::path& manifest, int num_speakers);

// Writes one WAV per sample into dir (named by `stem_of(i)` + ".wav") and
// returns a copy of the corpus whose paths point at the files.
Corpus persist_corpus(const Corpus& corpus, const std::filesystem::path& dir,
                      const std::vector<std::string>& stems);

// Write to a temporary sibling file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace padback
