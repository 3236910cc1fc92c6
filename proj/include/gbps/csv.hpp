#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gbps/contour.hpp"
#include "gbps/exponent_fit.hpp"
#include "gbps/goldbach.hpp"
#include "gbps/kernel.hpp"
#include "gbps/pipeline.hpp"

namespace gbps {

// 17 significant decimal digits: enough to reproduce any double exactly.
inline std::string fmt_sig17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_goldbach_csv(std::ostream& os, const GoldbachSeries& g,
                               const SummatorySeries& sum) {
  os << "n,G,S,E\n";
  for (std::uint64_t n = 2; n <= g.n_max; ++n) {
    os << n << ',' << fmt_sig17(g.g[n]) << ',' << fmt_sig17(sum.s[n]) << ','
       << fmt_sig17(sum.e[n]) << '\n';
  }
}

inline void write_samples_csv(std::ostream& os, const DyadicSamples& samples) {
  os << "x,absE\n";
  for (const auto& [x, y] : samples.points) {
    os << fmt_sig17(x) << ',' << fmt_sig17(y) << '\n';
  }
}

// Per-node dump of a contour evaluation with both residual forms; the root
// residual column is empty on minor-arc nodes where it is not defined.
inline void write_contour_csv(std::ostream& os, const SeriesValues& sv,
                              const ResidualSummary& square,
                              const ResidualSummary& root) {
  const ContourGrid& g = *sv.grid;
  os << "j,angle,re_z,im_z,abs_one_minus_z,major,abs_F,square_residual,"
        "root_residual\n";
  for (std::uint64_t j = 0; j < g.M; ++j) {
    os << j << ',' << fmt_sig17(g.angle(j)) << ','
       << fmt_sig17(g.nodes[j].real()) << ',' << fmt_sig17(g.nodes[j].imag())
       << ',' << fmt_sig17(std::abs(1.0 - g.nodes[j])) << ','
       << (g.major_flags[j] ? 1 : 0) << ',' << fmt_sig17(std::abs(sv.f_values[j]))
       << ',' << fmt_sig17(square.per_node[j]) << ',';
    if (!std::isnan(root.per_node[j])) os << fmt_sig17(root.per_node[j]);
    os << '\n';
  }
}

inline void write_arc_runs_csv(std::ostream& os,
                               const std::vector<ArcRunReport>& runs) {
  os << "N,M,L,delta,psi_sieve,psi_extracted,major_re,minor_re,total_re,"
        "total_im,t0,parseval_lhs,parseval_rhs,kernel_l2_minor\n";
  for (const auto& r : runs) {
    os << r.N << ',' << r.M << ',' << r.L << ',' << fmt_sig17(r.delta) << ','
       << fmt_sig17(r.psi_sieve) << ',' << fmt_sig17(r.psi_extracted) << ','
       << fmt_sig17(r.major_re) << ',' << fmt_sig17(r.minor_re) << ','
       << fmt_sig17(r.total_re) << ',' << fmt_sig17(r.total_im) << ','
       << fmt_sig17(r.t0) << ',' << fmt_sig17(r.parseval_lhs) << ','
       << fmt_sig17(r.parseval_rhs) << ',' << fmt_sig17(r.kernel_l2_minor)
       << '\n';
  }
}

inline void write_parseval_csv(std::ostream& os,
                               const std::vector<ParsevalReport>& reports) {
  os << "N,M,L,lhs,rhs,tail_bound\n";
  for (const auto& r : reports) {
    os << r.N << ',' << r.M << ',' << r.L << ',' << fmt_sig17(r.lhs) << ','
       << fmt_sig17(r.rhs) << ',' << fmt_sig17(r.tail_bound) << '\n';
  }
}

}  // namespace gbps
