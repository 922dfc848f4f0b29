#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "emgpr/errors.hpp"

namespace emgpr {

// Independent spectral route to the time-derivative moments, used by the test
// suites to cross-check the time-domain implementation. Deliberately a plain
// O(L^2) DFT with no shared code with features.hpp; not part of the streaming
// path.

inline std::vector<std::complex<double>> dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> twiddle(n);  // e^{-2 pi i m / n}, m = k*j mod n
  const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) twiddle[m] = std::polar(1.0, step * static_cast<double>(m));

  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += x[j] * twiddle[m];
      m += k;
      if (m >= n) m -= n;
    }
    out[k] = acc;
  }
  return out;
}

// sqrt(sum_k w_k^n P[k]) with P[k] = |X[k]|^2 / L and w_k = 2 sin(pi k / L),
// the transfer magnitude of the one-sample backward difference.
//
// The w-weighted spectral sum equals the energy of the *circular* difference;
// the time-domain moments difference linearly, dropping the wrap-around
// terms, so those terms are subtracted here to keep the two routes
// algebraically identical rather than merely asymptotic.
inline double spectral_moment_oracle(std::span<const double> x, int n) {
  if (n != 0 && n != 2 && n != 4)
    throw ConfigError("unsupported moment order: " + std::to_string(n));
  const std::size_t len = x.size();
  if (len < 3) throw DataError("window too short: need at least 3 samples");

  const auto spectrum = dft(x);
  const double dlen = static_cast<double>(len);
  double acc = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double wk = 2.0 * std::sin(std::numbers::pi * static_cast<double>(k) / dlen);
    const double p = std::norm(spectrum[k]) / dlen;
    acc += std::pow(wk, n) * p;
  }

  double boundary = 0.0;
  if (n == 2) {
    const double wrap = x[0] - x[len - 1];
    boundary = wrap * wrap;
  } else if (n == 4) {
    const double wrap1 = x[0] - 2.0 * x[len - 1] + x[len - 2];
    const double wrap2 = x[1] - 2.0 * x[0] + x[len - 1];
    boundary = wrap1 * wrap1 + wrap2 * wrap2;
  }

  const double value = acc - boundary;
  return value > 0.0 ? std::sqrt(value) : 0.0;
}

}  // namespace emgpr
