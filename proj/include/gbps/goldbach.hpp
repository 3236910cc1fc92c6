#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gbps/errors.hpp"
#include "gbps/fft.hpp"
#include "gbps/numeric.hpp"
#include "gbps/weight_table.hpp"

namespace gbps {

enum class ConvolutionMethod : std::uint8_t { direct = 0, fast = 1 };

// g[n] = sum_{k=1}^{n-1} w[k] * w[n-k], the additive autoconvolution of the
// table.  Stored 1-based with g[0] = g[1] = 0; meaningful entries are
// g[2..n_max].
struct GoldbachSeries {
  std::uint64_t n_max = 0;
  WeightKind source_kind = WeightKind::custom;
  ConvolutionMethod method = ConvolutionMethod::direct;
  std::vector<double> g;
};

// s[n] = sum_{m<=n} g[m] and e[n] = s[n] - c*n^2, both 1-based.  e is stored
// exactly as that difference evaluates in double.
struct SummatorySeries {
  std::uint64_t n_max = 0;
  double c = 0.0;
  std::vector<double> s;
  std::vector<double> e;
};

namespace detail {

inline void check_convolution_request(const WeightTable& t,
                                      std::uint64_t n_max) {
  if (n_max < 2) {
    throw std::invalid_argument("autoconvolution needs n_max >= 2");
  }
  if (n_max > t.n_max + 1) {
    throw std::out_of_range("autoconvolution to " + std::to_string(n_max) +
                            " needs weights up to " +
                            std::to_string(n_max - 1) + ", table holds " +
                            std::to_string(t.n_max));
  }
}

}  // namespace detail

// Quadratic-time reference: each g[n] is an independently compensated sum.
inline GoldbachSeries goldbach_direct(const WeightTable& t,
                                      std::uint64_t n_max) {
  detail::check_convolution_request(t, n_max);
  GoldbachSeries out;
  out.n_max = n_max;
  out.source_kind = t.kind;
  out.method = ConvolutionMethod::direct;
  out.g.assign(n_max + 1, 0.0);
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    KahanSum acc;
    for (std::uint64_t k = 1; k < n; ++k) {
      acc.add(t.values[k] * t.values[n - k]);
    }
    out.g[n] = acc.value();
  }
  return out;
}

// FFT autoconvolution.  Rounding noise can make entries that are exactly zero
// in the direct sum come out tiny and negative; for the built-in non-negative
// weights those are clamped to zero.
inline GoldbachSeries goldbach_fast(
    const WeightTable& t, std::uint64_t n_max,
    std::uint64_t transform_capacity = kDefaultTransformCapacity) {
  detail::check_convolution_request(t, n_max);
  std::vector<double> coeff(n_max);  // coeff[k] = w[k] for k in [1, n_max-1]
  for (std::uint64_t k = 1; k < n_max; ++k) coeff[k] = t.values[k];
  const auto conv = autoconvolve(coeff, transform_capacity);

  GoldbachSeries out;
  out.n_max = n_max;
  out.source_kind = t.kind;
  out.method = ConvolutionMethod::fast;
  out.g.assign(n_max + 1, 0.0);
  const bool clamp = t.kind != WeightKind::custom;
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    double v = conv[n];
    if (clamp && v < 0.0) v = 0.0;
    out.g[n] = v;
  }
  return out;
}

inline SummatorySeries summatory(const GoldbachSeries& g, double c) {
  if (!std::isfinite(c)) {
    throw std::invalid_argument("summatory: c must be finite");
  }
  SummatorySeries out;
  out.n_max = g.n_max;
  out.c = c;
  out.s.assign(g.n_max + 1, 0.0);
  out.e.assign(g.n_max + 1, 0.0);
  KahanSum acc;
  for (std::uint64_t n = 1; n <= g.n_max; ++n) {
    acc.add(g.g[n]);
    out.s[n] = acc.value();
    const double x = static_cast<double>(n);
    out.e[n] = out.s[n] - c * x * x;
  }
  return out;
}

}  // namespace gbps
