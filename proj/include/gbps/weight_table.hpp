#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gbps/errors.hpp"
#include "gbps/numeric.hpp"

namespace gbps {

// Largest table length accepted by default (2^27 entries, ~1 GiB of doubles).
inline constexpr std::uint64_t kDefaultTableCapacity = std::uint64_t{1} << 27;

enum class WeightKind : std::uint8_t {
  von_mangoldt = 0,
  unit = 1,
  custom = 2,
};

inline const char* weight_kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::von_mangoldt:
      return "von_mangoldt";
    case WeightKind::unit:
      return "unit";
    case WeightKind::custom:
      return "custom";
  }
  return "custom";
}

// Arithmetic weights on [1, n_max], stored 1-based; values[0] is kept at 0.
struct WeightTable {
  std::uint64_t n_max = 0;
  WeightKind kind = WeightKind::custom;
  std::vector<double> values;

  double at(std::uint64_t n) const { return values[n]; }
};

namespace detail {

// Plain Eratosthenes sieve for the base primes of the segmented pass.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<char> is_prime(limit + 1, 1);
  is_prime[0] = is_prime[1] = 0;
  for (std::uint64_t p = 2; p * p <= limit; ++p) {
    if (!is_prime[p]) continue;
    for (std::uint64_t q = p * p; q <= limit; q += p) is_prime[q] = 0;
  }
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (is_prime[p]) primes.push_back(p);
  }
  return primes;
}

inline void check_table_request(std::uint64_t n_max, std::uint64_t capacity) {
  if (n_max == 0) {
    throw capacity_error("weight table length must be at least 1");
  }
  if (n_max > capacity) {
    throw capacity_error("weight table length " + std::to_string(n_max) +
                         " exceeds budget " + std::to_string(capacity));
  }
}

}  // namespace detail

// log p at prime powers p^k <= n_max, zero elsewhere.  Prime detection uses a
// segmented sieve and power enumeration stays in exact integer arithmetic, so
// the support set is exact; only the stored log p carries rounding.
inline WeightTable build_mangoldt_table(
    std::uint64_t n_max, std::uint64_t capacity = kDefaultTableCapacity) {
  detail::check_table_request(n_max, capacity);
  WeightTable t;
  t.n_max = n_max;
  t.kind = WeightKind::von_mangoldt;
  t.values.assign(n_max + 1, 0.0);

  if (n_max < 2) return t;
  const auto base = detail::primes_up_to(isqrt(n_max));

  constexpr std::uint64_t kSegment = std::uint64_t{1} << 18;
  std::vector<char> seg;
  for (std::uint64_t low = 2; low <= n_max; low += kSegment) {
    const std::uint64_t high = std::min(low + kSegment - 1, n_max);
    seg.assign(high - low + 1, 1);
    for (std::uint64_t p : base) {
      if (p * p > high) break;
      std::uint64_t start = ((low + p - 1) / p) * p;
      if (start < p * p) start = p * p;
      for (std::uint64_t q = start; q <= high; q += p) seg[q - low] = 0;
    }
    for (std::uint64_t n = low; n <= high; ++n) {
      if (!seg[n - low]) continue;
      const double log_p = std::log(static_cast<double>(n));
      t.values[n] = log_p;
      for (std::uint64_t q = n; q <= n_max / n;) {
        q *= n;
        t.values[q] = log_p;
      }
    }
  }
  return t;
}

// Weight 1 at every n in [1, n_max].  Closed forms for the derived series
// (autoconvolution n-1, partial sums N) make this the exactness reference.
inline WeightTable build_unit_table(
    std::uint64_t n_max, std::uint64_t capacity = kDefaultTableCapacity) {
  detail::check_table_request(n_max, capacity);
  WeightTable t;
  t.n_max = n_max;
  t.kind = WeightKind::unit;
  t.values.assign(n_max + 1, 1.0);
  t.values[0] = 0.0;
  return t;
}

// sum_{n<=N} values[n], compensated, in increasing n.  For the von Mangoldt
// table this is the Chebyshev psi function.
inline double partial_sum(const WeightTable& t, std::uint64_t N) {
  if (N < 1 || N > t.n_max) {
    throw std::out_of_range("partial_sum: N = " + std::to_string(N) +
                            " outside [1, " + std::to_string(t.n_max) + "]");
  }
  KahanSum acc;
  for (std::uint64_t n = 1; n <= N; ++n) acc.add(t.values[n]);
  return acc.value();
}

}  // namespace gbps
