#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace padback::oracle {

// O(n^2) DFT straight from the definition.
std::vector<std::complex<double>> naive_dft(std::span<const std::complex<double>> x);

// Central difference (f(x + h) - f(x - h)) / 2h.
double central_difference(const std::function<double(double)>& f, double x, double h);

// Two-sided interval [lo, hi] that contains a Binomial(n, p) count with
// probability at least 1 - alpha (exact tails, conservative).
struct CountInterval {
  std::size_t lo = 0;
  std::size_t hi = 0;
};
CountInterval binomial_interval(std::size_t n, double p, double alpha);

}  // namespace padback::oracle
