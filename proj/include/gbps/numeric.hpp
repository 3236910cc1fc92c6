#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace gbps {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Neumaier-compensated accumulator. Results are deterministic for a fixed
// add order; all reductions in this library use a fixed order.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class KahanComplexSum {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_, im_;
};

constexpr bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Smallest power of two >= n.  n must leave room for the result.
constexpr std::uint64_t next_pow2(std::uint64_t n) {
  std::uint64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Floor of sqrt(n) in exact integer arithmetic.
inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// z^e by binary powering.  Uses only complex multiplication, so the result
// commutes with conjugation exactly: ipow(conj(z), e) == conj(ipow(z, e)).
inline std::complex<double> ipow(std::complex<double> z, std::uint64_t e) {
  std::complex<double> acc{1.0, 0.0};
  while (e != 0) {
    if (e & 1) acc *= z;
    e >>= 1;
    if (e != 0) z *= z;
  }
  return acc;
}

}  // namespace gbps
