// Recovers the Chebyshev partial sum psi(N) two ways: directly from the
// sieve, and by pairing the power series of the von Mangoldt weights with
// the Dirichlet-type kernel on the circle |z| = 1 - 1/N.

#include <cstdio>

#include "gbps/contour.hpp"
#include "gbps/kernel.hpp"
#include "gbps/weight_table.hpp"

int main() {
  const std::uint64_t N = 100;
  const double epsilon = 1e-9;

  const std::uint64_t L = gbps::truncation_length(N, epsilon);
  const auto table = gbps::build_mangoldt_table(L);

  const double psi_sieve = gbps::partial_sum(table, N);
  const double psi_contour = gbps::extract_partial_sum(table, N, epsilon);

  std::printf("N = %llu, truncation length L = %llu\n",
              static_cast<unsigned long long>(N),
              static_cast<unsigned long long>(L));
  std::printf("psi from sieve:   %.12f\n", psi_sieve);
  std::printf("psi from contour: %.12f\n", psi_contour);
  std::printf("difference:       %.3e\n", psi_contour - psi_sieve);
  return 0;
}
