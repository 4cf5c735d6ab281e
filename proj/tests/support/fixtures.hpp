#pragma once

#include <filesystem>
#include <string>

#include "padback/dataset.hpp"

namespace padback {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Small, fast corpus for unit tests (short clips, few speakers).
Corpus tiny_corpus(int speakers, int per_speaker, std::uint64_t seed);

std::string read_text(const std::filesystem::path& path);

}  // namespace padback
