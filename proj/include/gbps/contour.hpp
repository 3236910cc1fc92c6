#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gbps/errors.hpp"
#include "gbps/fft.hpp"
#include "gbps/numeric.hpp"
#include "gbps/weight_table.hpp"

namespace gbps {

// Certified envelope for the discarded series tail: for any weights with
// w_n <= log n + 1 (covers both built-in kinds),
//   sum_{n>L} w_n R^n <= R^{L+1} * N * (log L + N/L + 1),   R = 1 - 1/N,
// using log n <= log L + (n-L)/L for n > L and the closed geometric sums.
inline double tail_bound_value(std::uint64_t L, std::uint64_t N) {
  if (L < 1 || N < 2) {
    throw std::invalid_argument("tail_bound_value: need L >= 1, N >= 2");
  }
  const double n = static_cast<double>(N);
  const double l = static_cast<double>(L);
  const double log_r = std::log1p(-1.0 / n);
  return std::exp(static_cast<double>(L + 1) * log_r) * n *
         (std::log(l) + n / l + 1.0);
}

// Smallest L with tail_bound_value(L, N) <= epsilon.  The envelope is
// strictly decreasing in L, so an exponential bracket plus bisection finds
// the same L a linear scan would.
inline std::uint64_t truncation_length(std::uint64_t N, double epsilon) {
  if (N < 2) throw std::invalid_argument("truncation_length: need N >= 2");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("truncation_length: need 0 < epsilon < 1");
  }
  auto passes = [&](std::uint64_t L) {
    return tail_bound_value(L, N) <= epsilon;
  };
  if (passes(1)) return 1;
  std::uint64_t lo = 1, hi = 2;  // lo fails, search for the first pass
  while (!passes(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

// M uniformly spaced quadrature nodes z_j = R*exp(2*pi*i*j/M) on the circle
// |z| = R = 1 - 1/N, with major-arc membership |1 - z_j| < N^{delta/3 - 1}
// (strict; a node exactly at the threshold is minor).  Nodes are mirrored so
// that nodes[M-j] == conj(nodes[j]) holds bit-exactly; every downstream
// reality property leans on that.
struct ContourGrid {
  std::uint64_t N = 0;
  std::uint64_t M = 0;
  double R = 0.0;
  double delta = 0.0;
  double major_threshold = 0.0;
  std::vector<std::complex<double>> nodes;
  std::vector<std::uint8_t> major_flags;

  double angle(std::uint64_t j) const {
    return kTwoPi * static_cast<double>(j) / static_cast<double>(M);
  }
};

inline ContourGrid make_contour_grid(std::uint64_t N, std::uint64_t M,
                                     double delta) {
  if (N < 2) throw std::invalid_argument("contour grid: need N >= 2");
  if (M < 2) throw std::invalid_argument("contour grid: need M >= 2");
  if (!std::isfinite(delta) || delta <= 0.0) {
    throw std::invalid_argument("contour grid: need delta > 0");
  }
  ContourGrid g;
  g.N = N;
  g.M = M;
  g.R = 1.0 - 1.0 / static_cast<double>(N);
  g.delta = delta;
  g.major_threshold =
      std::pow(static_cast<double>(N), delta / 3.0 - 1.0);
  g.nodes.resize(M);
  g.nodes[0] = {g.R, 0.0};
  if (M % 2 == 0) g.nodes[M / 2] = {-g.R, 0.0};
  for (std::uint64_t j = 1; 2 * j < M; ++j) {
    const double theta = g.angle(j);
    const std::complex<double> z{g.R * std::cos(theta),
                                 g.R * std::sin(theta)};
    g.nodes[j] = z;
    g.nodes[M - j] = std::conj(z);
  }
  g.major_flags.resize(M);
  for (std::uint64_t j = 0; j < M; ++j) {
    g.major_flags[j] =
        std::abs(1.0 - g.nodes[j]) < g.major_threshold ? 1 : 0;
  }
  return g;
}

inline std::shared_ptr<const ContourGrid> make_contour_grid_shared(
    std::uint64_t N, std::uint64_t M, double delta) {
  return std::make_shared<const ContourGrid>(make_contour_grid(N, M, delta));
}

// Horner evaluation of sum_{n=1}^{L} values[n] * z^n at a single point.
inline std::complex<double> eval_series_at(const WeightTable& table,
                                           std::uint64_t L,
                                           std::complex<double> z) {
  if (L < 1 || L > table.n_max) {
    throw std::out_of_range("series evaluation: L = " + std::to_string(L) +
                            " outside table length " +
                            std::to_string(table.n_max));
  }
  std::complex<double> p{0.0, 0.0};
  for (std::uint64_t n = L; n >= 1; --n) {
    p = p * z + table.values[n];
  }
  return p * z;
}

enum class EvalPath : std::uint8_t { automatic, horner, transform };

// F at every grid node, truncated at degree L, plus the certified tail bound
// for what was discarded.
struct SeriesValues {
  std::shared_ptr<const ContourGrid> grid;
  std::vector<std::complex<double>> f_values;
  std::uint64_t truncation_length = 0;
  double tail_bound = 0.0;
};

namespace detail {

// Force exact conjugate symmetry f[M-j] == conj(f[j]) by averaging mirror
// pairs.  The transform path computes pairs independently and drifts apart
// by a few ulps otherwise.
inline void symmetrize_on_grid(std::vector<std::complex<double>>& f) {
  const std::uint64_t M = f.size();
  f[0] = {f[0].real(), 0.0};
  if (M % 2 == 0) f[M / 2] = {f[M / 2].real(), 0.0};
  for (std::uint64_t j = 1; 2 * j < M; ++j) {
    const std::complex<double> avg =
        0.5 * (f[j] + std::conj(f[M - j]));
    f[j] = avg;
    f[M - j] = std::conj(avg);
  }
}

}  // namespace detail

// f_values[j] = sum_{n=1}^{L} values[n] * z_j^n.  With M a power of two and
// M >= L + 1 the sums are one FFT of the radius-scaled coefficients; other
// configurations fall back to Horner per node (mirrored across conjugates).
inline SeriesValues eval_series_on_grid(
    const WeightTable& table, std::shared_ptr<const ContourGrid> grid,
    std::uint64_t L, EvalPath path = EvalPath::automatic,
    std::uint64_t transform_capacity = kDefaultTransformCapacity) {
  if (!grid) throw std::invalid_argument("series evaluation: null grid");
  if (L < 1 || L > table.n_max) {
    throw std::out_of_range("series evaluation: L = " + std::to_string(L) +
                            " outside table length " +
                            std::to_string(table.n_max));
  }
  const std::uint64_t M = grid->M;
  const bool transform_ok =
      is_pow2(M) && M >= L + 1 && M <= transform_capacity;
  if (path == EvalPath::transform && !transform_ok) {
    if (is_pow2(M) && M >= L + 1) {
      throw capacity_error("series evaluation: transform size " +
                           std::to_string(M) + " exceeds budget " +
                           std::to_string(transform_capacity));
    }
    throw configuration_error(
        "series evaluation: transform path needs a power-of-two node count "
        ">= L + 1");
  }
  const bool use_transform =
      path == EvalPath::transform || (path == EvalPath::automatic && transform_ok);

  SeriesValues sv;
  sv.grid = grid;
  sv.truncation_length = L;
  sv.tail_bound = tail_bound_value(L, grid->N);

  const double log_r = std::log1p(-1.0 / static_cast<double>(grid->N));
  if (use_transform) {
    // FFT with kernel exp(-2*pi*i*jn/M) of b_n = values[n]*R^n gives
    // conj(F(z_j)) since b is real; conjugate to recover F.
    std::vector<std::complex<double>> buf(M, {0.0, 0.0});
    for (std::uint64_t n = 1; n <= L; ++n) {
      buf[n] = {table.values[n] *
                    std::exp(static_cast<double>(n) * log_r),
                0.0};
    }
    fft_inplace(buf, false);
    sv.f_values.resize(M);
    for (std::uint64_t j = 0; j < M; ++j) {
      sv.f_values[j] = std::conj(buf[j]);
    }
  } else {
    sv.f_values.resize(M);
    for (std::uint64_t j = 0; 2 * j <= M; ++j) {
      sv.f_values[j] = eval_series_at(table, L, grid->nodes[j]);
    }
    for (std::uint64_t j = 1; 2 * j < M; ++j) {
      sv.f_values[M - j] = std::conj(sv.f_values[j]);
    }
  }
  detail::symmetrize_on_grid(sv.f_values);
  return sv;
}

// Residuals of the two main-term approximations on the contour.  per_node
// entries that are not defined (minor nodes, for the root form) hold NaN.
struct ResidualSummary {
  std::vector<double> per_node;
  double max_major = 0.0;
  double max_all = 0.0;
};

// r_j = |F(z_j)^2 - (1-z_j)^{-2}| / (|1-z_j| * N^{3-delta}), every node.
inline ResidualSummary square_residual(const SeriesValues& sv, double delta) {
  const ContourGrid& g = *sv.grid;
  const double scale_pow = std::pow(static_cast<double>(g.N), 3.0 - delta);
  ResidualSummary out;
  out.per_node.resize(g.M);
  for (std::uint64_t j = 0; j < g.M; ++j) {
    const std::complex<double> one_minus_z = 1.0 - g.nodes[j];
    const std::complex<double> main = 1.0 / (one_minus_z * one_minus_z);
    const double r = std::abs(sv.f_values[j] * sv.f_values[j] - main) /
                     (std::abs(one_minus_z) * scale_pow);
    out.per_node[j] = r;
    if (r > out.max_all) out.max_all = r;
    if (g.major_flags[j] && r > out.max_major) out.max_major = r;
  }
  return out;
}

// q_j = |F(z_j) - (1-z_j)^{-1}| / (|1-z_j|^2 * N^{3-delta}), major arc only.
inline ResidualSummary root_residual(const SeriesValues& sv, double delta) {
  const ContourGrid& g = *sv.grid;
  bool any_major = false;
  for (std::uint64_t j = 0; j < g.M; ++j) {
    if (g.major_flags[j]) {
      any_major = true;
      break;
    }
  }
  if (!any_major) {
    throw degenerate_input_error(
        "root residual: no node inside the major-arc threshold " +
        std::to_string(g.major_threshold));
  }
  const double scale_pow = std::pow(static_cast<double>(g.N), 3.0 - delta);
  ResidualSummary out;
  out.per_node.assign(g.M, std::numeric_limits<double>::quiet_NaN());
  for (std::uint64_t j = 0; j < g.M; ++j) {
    if (!g.major_flags[j]) continue;
    const std::complex<double> one_minus_z = 1.0 - g.nodes[j];
    const double a = std::abs(one_minus_z);
    const double q =
        std::abs(sv.f_values[j] - 1.0 / one_minus_z) / (a * a * scale_pow);
    out.per_node[j] = q;
    if (q > out.max_major) out.max_major = q;
  }
  out.max_all = out.max_major;
  return out;
}

}  // namespace gbps
