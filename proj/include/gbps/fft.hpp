#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "gbps/errors.hpp"
#include "gbps/numeric.hpp"

namespace gbps {

// Largest transform size accepted by default (2^24 complex points).
inline constexpr std::uint64_t kDefaultTransformCapacity = std::uint64_t{1}
                                                           << 24;

// In-place radix-2 Cooley-Tukey.  a.size() must be a power of two.
// forward uses the kernel exp(-2*pi*i*jk/n); inverse divides by n.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_pow2(n)) {
    throw configuration_error("fft size " + std::to_string(n) +
                              " is not a power of two");
  }
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // Twiddles for the largest stage; smaller stages stride through the table.
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    tw[k] = std::polar(1.0, sign * kTwoPi * static_cast<double>(k) /
                                static_cast<double>(n));
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * tw[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= scale;
  }
}

// Linear autoconvolution of a real sequence: r[k] = sum_i c[i]*c[k-i],
// k in [0, 2*(c.size()-1)].  Computed by zero-padded FFT.
inline std::vector<double> autoconvolve(
    const std::vector<double>& c,
    std::uint64_t transform_capacity = kDefaultTransformCapacity) {
  if (c.empty()) throw degenerate_input_error("autoconvolve: empty input");
  const std::size_t out_len = 2 * c.size() - 1;
  const std::uint64_t m = next_pow2(out_len);
  if (m > transform_capacity) {
    throw capacity_error("autoconvolve: transform size " + std::to_string(m) +
                         " exceeds budget " +
                         std::to_string(transform_capacity));
  }
  std::vector<std::complex<double>> buf(m);
  for (std::size_t i = 0; i < c.size(); ++i) buf[i] = {c[i], 0.0};
  fft_inplace(buf, false);
  for (auto& z : buf) z *= z;
  fft_inplace(buf, true);
  std::vector<double> out(out_len);
  for (std::size_t k = 0; k < out_len; ++k) out[k] = buf[k].real();
  return out;
}

}  // namespace gbps
