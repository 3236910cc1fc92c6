#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbps/contour.hpp"
#include "gbps/errors.hpp"
#include "gbps/exponent_fit.hpp"
#include "gbps/kernel.hpp"
#include "gbps/numeric.hpp"
#include "gbps/weight_table.hpp"

namespace gbps {

// Everything one N produces: extraction, arc split, Parseval sides, and the
// minor-arc kernel L2, all on one grid (Parseval runs its own transform at
// the doubled bandwidth).
struct ArcRunReport {
  std::uint64_t N = 0;
  std::uint64_t M = 0;
  std::uint64_t L = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  double psi_sieve = 0.0;
  double psi_extracted = 0.0;
  double major_re = 0.0;
  double minor_re = 0.0;
  double total_re = 0.0;
  double total_im = 0.0;
  double t0 = 0.0;
  double parseval_lhs = 0.0;
  double parseval_rhs = 0.0;
  double parseval_tail = 0.0;
  double kernel_l2_minor = 0.0;
  bool major_empty = false;
};

inline ArcRunReport run_arc_analysis(
    const WeightTable& table, std::uint64_t N, double delta, double epsilon,
    std::optional<std::uint64_t> nodes_override = std::nullopt,
    std::uint64_t transform_capacity = kDefaultTransformCapacity) {
  const std::uint64_t L = truncation_length(N, epsilon);
  if (L > table.n_max) {
    throw std::out_of_range("arc analysis: truncation length " +
                            std::to_string(L) + " exceeds table length " +
                            std::to_string(table.n_max));
  }
  const std::uint64_t M = nodes_override.value_or(next_pow2(L + N + 2));
  if (M < L + N + 2) {
    throw configuration_error(
        "arc analysis: node count " + std::to_string(M) +
        " below the exactness bound L + N + 2 = " +
        std::to_string(L + N + 2));
  }
  if (M > transform_capacity) {
    throw capacity_error("arc analysis: node count " + std::to_string(M) +
                         " exceeds transform budget " +
                         std::to_string(transform_capacity));
  }

  const auto grid = make_contour_grid_shared(N, M, delta);
  const auto sv =
      eval_series_on_grid(table, grid, L, EvalPath::automatic,
                          transform_capacity);
  const double psi_sieve = partial_sum(table, N);
  const auto dec = decompose_arcs(sv, psi_sieve);
  const auto par = parseval_check(table, N, next_pow2(2 * L + 2), epsilon,
                                  transform_capacity);

  ArcRunReport rep;
  rep.N = N;
  rep.M = M;
  rep.L = L;
  rep.delta = delta;
  rep.epsilon = epsilon;
  rep.psi_sieve = psi_sieve;
  rep.psi_extracted = extract_partial_sum(sv);
  rep.major_re = dec.major.real();
  rep.minor_re = dec.minor.real();
  rep.total_re = dec.total.real();
  rep.total_im = dec.total.imag();
  rep.t0 = dec.t0;
  rep.parseval_lhs = par.lhs;
  rep.parseval_rhs = par.rhs;
  rep.parseval_tail = par.tail_bound;
  rep.kernel_l2_minor = minor_kernel_l2(*grid);
  rep.major_empty = dec.major_empty;
  return rep;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct ReportSummary {
  double delta = 0.0;
  double epsilon = 0.0;
  std::vector<std::uint64_t> n_list;
  std::vector<ArcRunReport> runs;
  std::vector<CheckResult> checks;
  bool all_pass = true;
};

namespace detail {

inline void push_check(ReportSummary& rs, std::string name, double observed,
                       double bound, bool pass, std::string detail) {
  rs.checks.push_back({std::move(name), pass, observed, bound,
                       std::move(detail)});
  rs.all_pass = rs.all_pass && pass;
}

inline void push_upper_check(ReportSummary& rs, std::string name,
                             double observed, double bound,
                             std::string detail) {
  push_check(rs, std::move(name), observed, bound, observed <= bound,
             std::move(detail));
}

}  // namespace detail

// Per-N identity checks plus, when three or more N are given, the growth
// checks: major slope <= 1 - delta/3 + 0.15, minor slope <= 1 - delta/6
// + 0.15, Parseval rhs slope vs N log N within 1 +- 0.15, and max/min of
// the normalized kernel L2 <= 20.
inline ReportSummary run_report_checks(
    const WeightTable& table, const std::vector<std::uint64_t>& n_list,
    double delta, double epsilon,
    std::uint64_t transform_capacity = kDefaultTransformCapacity) {
  if (n_list.empty()) {
    throw degenerate_input_error("report: empty N list");
  }
  ReportSummary rs;
  rs.delta = delta;
  rs.epsilon = epsilon;
  rs.n_list = n_list;

  for (const std::uint64_t n : n_list) {
    const auto rep = run_arc_analysis(table, n, delta, epsilon, std::nullopt,
                                      transform_capacity);
    rs.runs.push_back(rep);
    const std::string tag = "[N=" + std::to_string(n) + "]";
    const double nd = static_cast<double>(n);

    detail::push_upper_check(
        rs, "extraction_identity" + tag,
        std::abs(rep.psi_extracted - rep.psi_sieve), epsilon + 1e-8 * nd,
        "quadrature partial sum vs sieve");
    detail::push_upper_check(
        rs, "decomposition_identity" + tag,
        std::abs(rep.total_re - (rep.psi_sieve - nd)), epsilon + 1e-7 * nd,
        "Re(total) vs psi(N) - N");
    const double total_mag = std::hypot(rep.total_re, rep.total_im);
    detail::push_upper_check(rs, "reality" + tag, std::abs(rep.total_im),
                             1e-8 * (1.0 + total_mag),
                             "imaginary part of the full-circle integral");
    detail::push_upper_check(
        rs, "arc_additivity" + tag,
        std::abs(rep.major_re + rep.minor_re - rep.total_re), 1e-10,
        "major + minor vs total");
    detail::push_upper_check(
        rs, "parseval_identity" + tag,
        std::abs(rep.parseval_lhs / rep.parseval_rhs - 1.0),
        1e-6 + rep.parseval_tail / rep.parseval_rhs,
        "quadrature vs coefficient sum");
  }

  if (n_list.size() >= 3) {
    std::vector<ArcDecomposition> decs;
    for (const auto& rep : rs.runs) {
      ArcDecomposition d;
      d.N = rep.N;
      d.M = rep.M;
      d.delta = rep.delta;
      d.major = {rep.major_re, 0.0};
      d.minor = {rep.minor_re, 0.0};
      d.total = {rep.total_re, rep.total_im};
      d.psi_reference = rep.psi_sieve;
      d.t0 = rep.t0;
      decs.push_back(d);
    }
    const auto major_fit = major_arc_bound_check(decs);
    detail::push_upper_check(rs, "major_arc_slope", major_fit.slope,
                             1.0 - delta / 3.0 + 0.15,
                             "log|Re(major)| vs log N");
    const auto minor_fit = minor_arc_bound_check(decs);
    detail::push_upper_check(rs, "minor_arc_slope", minor_fit.slope,
                             1.0 - delta / 6.0 + 0.15,
                             "log(|Re(minor)|/sqrt(log N)) vs log N");

    std::vector<std::pair<double, double>> growth;
    for (const auto& rep : rs.runs) {
      const double nd = static_cast<double>(rep.N);
      growth.emplace_back(nd * std::log(nd), rep.parseval_rhs);
    }
    const auto growth_fit = fit_exponent(growth);
    detail::push_check(rs, "parseval_growth_slope", growth_fit.slope, 1.15,
                       std::abs(growth_fit.slope - 1.0) <= 0.15,
                       "log(rhs) vs log(N log N), band 1 +- 0.15");

    double ratio_min = 0.0, ratio_max = 0.0;
    bool first = true;
    for (const auto& rep : rs.runs) {
      const double norm =
          rep.kernel_l2_minor /
          std::pow(static_cast<double>(rep.N), 1.0 - delta / 3.0);
      if (first || norm < ratio_min) ratio_min = norm;
      if (first || norm > ratio_max) ratio_max = norm;
      first = false;
    }
    detail::push_upper_check(rs, "kernel_l2_ratio", ratio_max / ratio_min,
                             20.0, "max/min of I / N^{1-delta/3}");
  }
  return rs;
}

}  // namespace gbps
