#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace padback {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 decimation-in-time FFT (forward, no scaling).
// Size must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

// |DFT(frame zero-extended to fft_size)[k]|^2 for k = 0..fft_size/2.
std::vector<double> power_spectrum(std::span<const double> frame, std::size_t fft_size);

}  // namespace padback
