#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace padback {

// Seeded generator whose output is fully specified (no reliance on the
// implementation-defined std:: distributions), so streams are identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.
  double normal();

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derive an independent substream seed from a root seed, a stream name and
// up to two indices (splitmix64 mixing over an FNV-1a hash of the name).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t a = 0, std::uint64_t b = 0);

// 64-bit FNV-1a over raw bytes; used for fingerprints.
std::uint64_t fnv1a(std::span<const std::byte> bytes,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(std::string_view text,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Random permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

}  // namespace padback
