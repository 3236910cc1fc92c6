#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gbps/contour.hpp"
#include "gbps/errors.hpp"
#include "gbps/exponent_fit.hpp"
#include "gbps/numeric.hpp"
#include "gbps/weight_table.hpp"

namespace gbps {

// Below this distance from z = 1 the closed form (1 - z^N)/(1 - z) loses
// digits to cancellation and the expanded Laurent sum takes over.
inline constexpr double kKernelSeriesSwitch = 1e-6;

namespace detail {

// sum_{j=2}^{N+1} z^{-j}, the kernel's Laurent expansion.  O(N), used only
// near the removable singularity at z = 1 (and as the test oracle).
inline std::complex<double> kernel_laurent_sum(std::complex<double> z,
                                               std::uint64_t N) {
  const std::complex<double> zinv = 1.0 / z;
  KahanComplexSum acc;
  std::complex<double> term = zinv * zinv;
  for (std::uint64_t j = 2; j <= N + 1; ++j) {
    acc.add(term);
    term *= zinv;
  }
  return acc.value();
}

inline std::complex<double> kernel_closed_form(std::complex<double> z,
                                               std::uint64_t N) {
  const std::complex<double> z_pow_n = ipow(z, N);
  return (1.0 - z_pow_n) / ((1.0 - z) * (z_pow_n * z));
}

}  // namespace detail

// K(z) = z^{-N-1} (1 - z^N)/(1 - z) = sum_{j=2}^{N+1} z^{-j}.  Paired with a
// power series under (1/2*pi*i) contour integration it selects the sum of
// the first N coefficients.  Built from conjugation-equivariant operations
// only, so K(conj(z)) == conj(K(z)) exactly.
inline std::complex<double> kernel_value(std::complex<double> z,
                                         std::uint64_t N) {
  if (N < 1) throw std::invalid_argument("kernel: need N >= 1");
  if (z == std::complex<double>{0.0, 0.0}) {
    throw std::domain_error("kernel: z = 0 is a pole");
  }
  if (std::abs(1.0 - z) < kKernelSeriesSwitch) {
    return detail::kernel_laurent_sum(z, N);
  }
  return detail::kernel_closed_form(z, N);
}

namespace detail {

// (1/M) sum over all M nodes of a term with exact mirror symmetry
// term(M-j) == conj(term(j)): endpoints j = 0 (and M/2 when M is even) are
// real, each mirror pair folds to 2*Re(term(j)).  The fold keeps the
// reduction deterministic and the result exactly real.
template <class TermFn>
double symmetric_trapezoid_mean(std::uint64_t M, TermFn&& term) {
  KahanSum acc;
  acc.add(term(0).real());
  for (std::uint64_t j = 1; 2 * j < M; ++j) {
    acc.add(2.0 * term(j).real());
  }
  if (M % 2 == 0) acc.add(term(M / 2).real());
  return acc.value() / static_cast<double>(M);
}

}  // namespace detail

// Re of (1/2*pi*i) contour integral of F(z) K(z) dz by the M-node trapezoid
// rule; with M >= L + N + 2 the integrand is a Laurent polynomial with
// exponent range shorter than M, so discrete orthogonality of the roots of
// unity makes the quadrature exact and the value is the sum of the first N
// coefficients: the partial sum of the weights.
inline double extract_partial_sum(const SeriesValues& sv) {
  const ContourGrid& g = *sv.grid;
  if (g.M < sv.truncation_length + g.N + 2) {
    throw configuration_error(
        "extraction: node count " + std::to_string(g.M) +
        " below the exactness bound L + N + 2 = " +
        std::to_string(sv.truncation_length + g.N + 2));
  }
  return detail::symmetric_trapezoid_mean(g.M, [&](std::uint64_t j) {
    return sv.f_values[j] * kernel_value(g.nodes[j], g.N) * g.nodes[j];
  });
}

inline double extract_partial_sum(
    const WeightTable& table, std::uint64_t N, double epsilon,
    std::uint64_t transform_capacity = kDefaultTransformCapacity) {
  const std::uint64_t L = truncation_length(N, epsilon);
  if (L > table.n_max) {
    throw std::out_of_range("extraction: truncation length " +
                            std::to_string(L) + " exceeds table length " +
                            std::to_string(table.n_max));
  }
  const std::uint64_t M = next_pow2(L + N + 2);
  if (M > transform_capacity) {
    throw capacity_error("extraction: node count " + std::to_string(M) +
                         " exceeds transform budget " +
                         std::to_string(transform_capacity));
  }
  const auto grid = make_contour_grid_shared(N, M, 1.0);
  const auto sv = eval_series_on_grid(table, grid, L, EvalPath::automatic,
                                      transform_capacity);
  return extract_partial_sum(sv);
}

// Half-angle of the major arc: the t in [0, pi] solving
// |1 - R e^{it}|^2 = (1-R)^2 + 4 R sin^2(t/2) = N^{2(delta/3 - 1)}.
// Returns 0 when the threshold is at or below 1 - R (strict membership is
// then impossible) and pi when the whole circle lies inside.
inline double major_arc_half_angle(std::uint64_t N, double delta) {
  const double r = 1.0 - 1.0 / static_cast<double>(N);
  const double th = std::pow(static_cast<double>(N), delta / 3.0 - 1.0);
  const double s2 = (th * th - (1.0 - r) * (1.0 - r)) / (4.0 * r);
  if (s2 <= 0.0) return 0.0;
  if (s2 >= 1.0) return kPi;
  return 2.0 * std::asin(std::sqrt(s2));
}

// Major/minor split of the contour integral of (F(z) - 1/(1-z)) K(z).
// The 1/(1-z) subtraction removes the main term: paired with the kernel it
// contributes exactly N, so Re(total) recovers psi(N) - N.
struct ArcDecomposition {
  std::uint64_t N = 0;
  std::uint64_t M = 0;
  double delta = 0.0;
  std::complex<double> major{0.0, 0.0};
  std::complex<double> minor{0.0, 0.0};
  std::complex<double> total{0.0, 0.0};
  double psi_reference = 0.0;
  double t0 = 0.0;
  bool major_empty = false;
};

inline ArcDecomposition decompose_arcs(const SeriesValues& sv,
                                       double psi_reference) {
  const ContourGrid& g = *sv.grid;
  if (g.M < sv.truncation_length + g.N + 2) {
    throw configuration_error(
        "arc decomposition: node count " + std::to_string(g.M) +
        " below the exactness bound L + N + 2 = " +
        std::to_string(sv.truncation_length + g.N + 2));
  }
  auto term = [&](std::uint64_t j) {
    const std::complex<double> z = g.nodes[j];
    return (sv.f_values[j] - 1.0 / (1.0 - z)) * kernel_value(z, g.N) * z;
  };

  ArcDecomposition dec;
  dec.N = g.N;
  dec.M = g.M;
  dec.delta = g.delta;
  dec.psi_reference = psi_reference;
  dec.t0 = major_arc_half_angle(g.N, g.delta);

  // Same folded reduction as symmetric_trapezoid_mean, split by arc
  // membership (flags are mirror-symmetric since |1 - conj z| = |1 - z|).
  KahanSum major_acc, minor_acc;
  auto deposit = [&](std::uint64_t j, double weight) {
    (g.major_flags[j] ? major_acc : minor_acc).add(weight * term(j).real());
  };
  deposit(0, 1.0);
  for (std::uint64_t j = 1; 2 * j < g.M; ++j) deposit(j, 2.0);
  if (g.M % 2 == 0) deposit(g.M / 2, 1.0);
  const double m = static_cast<double>(g.M);
  dec.major = {major_acc.value() / m, 0.0};
  dec.minor = {minor_acc.value() / m, 0.0};
  dec.total = {detail::symmetric_trapezoid_mean(g.M, term), 0.0};

  dec.major_empty = std::none_of(g.major_flags.begin(), g.major_flags.end(),
                                 [](std::uint8_t f) { return f != 0; });
  return dec;
}

inline ArcDecomposition arc_decomposition(
    const WeightTable& table, std::uint64_t N, double delta, double epsilon,
    std::uint64_t transform_capacity = kDefaultTransformCapacity) {
  const std::uint64_t L = truncation_length(N, epsilon);
  if (L > table.n_max) {
    throw std::out_of_range("arc decomposition: truncation length " +
                            std::to_string(L) + " exceeds table length " +
                            std::to_string(table.n_max));
  }
  const std::uint64_t M = next_pow2(L + N + 2);
  if (M > transform_capacity) {
    throw capacity_error("arc decomposition: node count " +
                         std::to_string(M) + " exceeds transform budget " +
                         std::to_string(transform_capacity));
  }
  const auto grid = make_contour_grid_shared(N, M, delta);
  const auto sv = eval_series_on_grid(table, grid, L, EvalPath::automatic,
                                      transform_capacity);
  return decompose_arcs(sv, partial_sum(table, N));
}

namespace detail {

inline ExponentFit arc_bound_fit(const std::vector<ArcDecomposition>& runs,
                                 bool minor_side) {
  if (runs.size() < 3) {
    throw degenerate_input_error(
        "arc bound check: need at least 3 decompositions");
  }
  std::vector<std::uint64_t> seen;
  for (const auto& d : runs) {
    if (d.delta != runs[0].delta) {
      throw std::invalid_argument("arc bound check: mixed delta values");
    }
    seen.push_back(d.N);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw std::invalid_argument("arc bound check: duplicate N");
  }

  std::vector<std::pair<double, double>> samples;
  std::size_t dropped = 0;
  for (const auto& d : runs) {
    const double n = static_cast<double>(d.N);
    double y = minor_side ? std::abs(d.minor.real()) / std::sqrt(std::log(n))
                          : std::abs(d.major.real());
    if (y < kFitDropThreshold) {
      ++dropped;
      continue;
    }
    samples.emplace_back(n, y);
  }
  if (samples.empty()) {
    throw degenerate_input_error(
        "arc bound check: every magnitude fell below the drop threshold");
  }
  return fit_exponent(samples, dropped);
}

}  // namespace detail

// Growth rate of the major-arc contribution: fits log|Re(major)| against
// log N.  The asymptotic claim corresponds to slope <= 1 - delta/3.
inline ExponentFit major_arc_bound_check(
    const std::vector<ArcDecomposition>& runs) {
  return detail::arc_bound_fit(runs, false);
}

// Growth rate of the minor-arc contribution with the sqrt-log factor peeled
// off: fits log(|Re(minor)| / sqrt(log N)) against log N.  The claim
// corresponds to slope <= 1 - delta/6.
inline ExponentFit minor_arc_bound_check(
    const std::vector<ArcDecomposition>& runs) {
  return detail::arc_bound_fit(runs, true);
}

// Both sides of the mean-square identity for F - 1/(1-z) on the contour.
// lhs integrates against the angle measure dt (the measure under which the
// coefficient identity is exact); rhs sums the squared coefficients.
struct ParsevalReport {
  std::uint64_t N = 0;
  std::uint64_t M = 0;
  std::uint64_t L = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double tail_bound = 0.0;
};

// lhs = (2*pi/M) sum_j |F_L(z_j) - T_L(z_j)|^2 where T_L is the degree-L
// truncation of 1/(1-z), so the difference has coefficients d_0 = -1,
// d_n = values[n] - 1 for 1 <= n <= L.  rhs = 2*pi sum_{n=0}^{L} d_n^2
// R^{2n}; the n = 0 term contributes the constant 2*pi*1 on both sides
// (T_L includes n = 0, F does not).  With M >= 2L + 2 the quadrature of the
// squared modulus is exact, so lhs and rhs differ only by rounding;
// tail_bound certifies the gap to the untruncated series, via
// sum_{n>L} d_n^2 R^{2n} <= (sum_{n>L} |d_n| R^n)^2 <= TailBound^2.
inline ParsevalReport parseval_check(
    const WeightTable& table, std::uint64_t N, std::uint64_t M,
    double epsilon = 1e-9,
    std::uint64_t transform_capacity = kDefaultTransformCapacity) {
  if (N < 2) throw std::invalid_argument("parseval: need N >= 2");
  const std::uint64_t L = truncation_length(N, epsilon);
  if (L > table.n_max) {
    throw std::out_of_range("parseval: truncation length " +
                            std::to_string(L) + " exceeds table length " +
                            std::to_string(table.n_max));
  }
  if (M < 2 * L + 2) {
    throw configuration_error(
        "parseval: node count " + std::to_string(M) +
        " below the bandwidth bound 2L + 2 = " + std::to_string(2 * L + 2));
  }
  if (!is_pow2(M)) {
    throw configuration_error("parseval: node count must be a power of two");
  }
  if (M > transform_capacity) {
    throw capacity_error("parseval: node count " + std::to_string(M) +
                         " exceeds transform budget " +
                         std::to_string(transform_capacity));
  }

  const double log_r = std::log1p(-1.0 / static_cast<double>(N));
  std::vector<std::complex<double>> buf(M, {0.0, 0.0});
  buf[0] = {-1.0, 0.0};
  for (std::uint64_t n = 1; n <= L; ++n) {
    buf[n] = {(table.values[n] - 1.0) *
                  std::exp(static_cast<double>(n) * log_r),
              0.0};
  }
  fft_inplace(buf, false);  // buf[j] = conj(D(z_j)); |.| is all we need
  detail::symmetrize_on_grid(buf);

  KahanSum lhs_acc;
  lhs_acc.add(std::norm(buf[0]));
  for (std::uint64_t j = 1; 2 * j < M; ++j) {
    lhs_acc.add(2.0 * std::norm(buf[j]));
  }
  lhs_acc.add(std::norm(buf[M / 2]));

  KahanSum rhs_acc;
  rhs_acc.add(1.0);  // d_0 = -1
  for (std::uint64_t n = 1; n <= L; ++n) {
    const double d = table.values[n] - 1.0;
    rhs_acc.add(d * d * std::exp(2.0 * static_cast<double>(n) * log_r));
  }

  ParsevalReport rep;
  rep.N = N;
  rep.M = M;
  rep.L = L;
  rep.lhs = kTwoPi * lhs_acc.value() / static_cast<double>(M);
  rep.rhs = kTwoPi * rhs_acc.value();
  const double tb = tail_bound_value(L, N);
  rep.tail_bound = kTwoPi * tb * tb;
  return rep;
}

// I = sum over minor-arc nodes of |K(z_j)|^2 |dz|, |dz| = 2*pi*R/M.  The
// asymptotic claim is I = O(N^{1-delta/3}), checked as boundedness of the
// normalized values across N.
inline double minor_kernel_l2(const ContourGrid& g) {
  KahanSum acc;
  auto deposit = [&](std::uint64_t j, double weight) {
    if (g.major_flags[j]) return;
    acc.add(weight * std::norm(kernel_value(g.nodes[j], g.N)));
  };
  deposit(0, 1.0);
  for (std::uint64_t j = 1; 2 * j < g.M; ++j) deposit(j, 2.0);
  if (g.M % 2 == 0) deposit(g.M / 2, 1.0);
  return acc.value() * kTwoPi * g.R / static_cast<double>(g.M);
}

inline double minor_kernel_l2(std::uint64_t N, double delta,
                              std::uint64_t M) {
  return minor_kernel_l2(make_contour_grid(N, M, delta));
}

}  // namespace gbps
