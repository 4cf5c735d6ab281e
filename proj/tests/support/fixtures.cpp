#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace padback {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  path_ = base / ("padback_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter.fetch_add(1)));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Corpus tiny_corpus(int speakers, int per_speaker, std::uint64_t seed) {
  CorpusSpec spec;
  spec.num_speakers = speakers;
  spec.utterances_per_speaker = per_speaker;
  spec.min_duration_s = 0.5;
  spec.max_duration_s = 0.6;
  spec.seed = seed;
  return generate_corpus(spec);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace padback
