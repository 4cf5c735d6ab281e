#include "padback/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "padback/errors.hpp"

namespace padback {

void fft_inplace(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  require(is_power_of_two(n), "fft: size " + std::to_string(n) + " is not a power of two");
  if (n == 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const double step = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles are evaluated directly rather than by recurrence so the
      // error does not accumulate across a stage.
      const std::complex<double> w(std::cos(step * k), std::sin(step * k));
      for (std::size_t start = 0; start < n; start += len) {
        const std::complex<double> even = data[start + k];
        const std::complex<double> odd = data[start + k + half] * w;
        data[start + k] = even + odd;
        data[start + k + half] = even - odd;
      }
    }
  }
}

std::vector<double> power_spectrum(std::span<const double> frame, std::size_t fft_size) {
  require(is_power_of_two(fft_size),
          "power_spectrum: fft size " + std::to_string(fft_size) + " is not a power of two");
  require(frame.size() <= fft_size, "power_spectrum: frame longer than fft size");
  std::vector<std::complex<double>> buf(fft_size);
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
  fft_inplace(buf);
  std::vector<double> power(fft_size / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]);
  return power;
}

}  // namespace padback
