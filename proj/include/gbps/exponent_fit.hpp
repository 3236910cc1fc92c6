#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gbps/errors.hpp"
#include "gbps/numeric.hpp"

namespace gbps {

// Samples below this magnitude carry no exponent information (they are
// cancellation noise) and are dropped, not fitted.
inline constexpr double kFitDropThreshold = 1e-14;

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t sample_count = 0;
  std::size_t dropped_count = 0;
};

struct DyadicSamples {
  std::vector<std::pair<double, double>> points;  // (x, |values[x]|)
  std::size_t dropped = 0;
};

// (x, |values[x]|) at x = x_min, 2*x_min, 4*x_min, ... <= x_max.
// values is 1-based, as produced by the table and series builders.
inline DyadicSamples dyadic_samples(const std::vector<double>& values,
                                    std::uint64_t x_min, std::uint64_t x_max) {
  if (x_min < 2 || x_min >= x_max) {
    throw std::invalid_argument("dyadic_samples: need 2 <= x_min < x_max");
  }
  if (x_max >= values.size()) {
    throw std::out_of_range("dyadic_samples: x_max = " + std::to_string(x_max) +
                            " outside the sequence (length " +
                            std::to_string(values.size() - 1) + ")");
  }
  DyadicSamples out;
  for (std::uint64_t x = x_min; x <= x_max; x *= 2) {
    const double y = std::abs(values[x]);
    if (y < kFitDropThreshold) {
      ++out.dropped;
      continue;
    }
    out.points.emplace_back(static_cast<double>(x), y);
  }
  if (out.points.empty()) {
    throw degenerate_input_error(
        "dyadic_samples: every sample fell below the drop threshold");
  }
  return out;
}

// Ordinary least squares of log y against log x.  Duplicate x values are
// collapsed by averaging log y before fitting, so repeated abscissas cannot
// skew the slope.  residual_rms is over the collapsed points.
inline ExponentFit fit_exponent(
    const std::vector<std::pair<double, double>>& samples,
    std::size_t dropped = 0) {
  std::map<double, std::pair<KahanSum, std::size_t>> by_x;
  for (const auto& [x, y] : samples) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument("fit_exponent: samples must be positive");
    }
    auto& [sum_log_y, count] = by_x[std::log(x)];
    sum_log_y.add(std::log(y));
    ++count;
  }
  if (by_x.size() < 2) {
    throw degenerate_input_error(
        "fit_exponent: need at least two distinct x values");
  }

  std::vector<std::pair<double, double>> pts;  // (log x, mean log y)
  pts.reserve(by_x.size());
  for (const auto& [lx, acc] : by_x) {
    pts.emplace_back(lx, acc.first.value() / static_cast<double>(acc.second));
  }

  const auto n = static_cast<double>(pts.size());
  KahanSum sx, sy;
  for (const auto& [lx, ly] : pts) {
    sx.add(lx);
    sy.add(ly);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  KahanSum sxx, sxy;
  for (const auto& [lx, ly] : pts) {
    sxx.add((lx - mx) * (lx - mx));
    sxy.add((lx - mx) * (ly - my));
  }
  if (!(sxx.value() > 0.0)) {
    throw degenerate_input_error("fit_exponent: abscissas are degenerate");
  }

  ExponentFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  fit.sample_count = pts.size();
  fit.dropped_count = dropped;
  KahanSum srr;
  for (const auto& [lx, ly] : pts) {
    const double r = ly - (fit.intercept + fit.slope * lx);
    srr.add(r * r);
  }
  fit.residual_rms = std::sqrt(srr.value() / n);
  return fit;
}

// Under the model |E(x)| ~ x^(2-delta), the fitted slope recovers delta.
inline double estimate_delta(const ExponentFit& fit) { return 2.0 - fit.slope; }

}  // namespace gbps
