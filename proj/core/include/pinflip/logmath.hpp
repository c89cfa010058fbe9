#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace pinflip {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b), exact for -inf operands.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// log(cosh(x)). The overflow-safe form |x| + log1p(e^{-2|x|}) - log 2 cancels
// badly near 0, where log1p(2 sinh^2(x/2)) keeps full relative precision.
inline double log_cosh(double x) {
  const double a = std::fabs(x);
  if (a < 1.0) {
    const double s = std::sinh(0.5 * a);
    return std::log1p(2.0 * s * s);
  }
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Relative difference of two log-domain values, measured on the linear scale
// |e^a - e^b| / e^max(a,b). Two -inf values compare equal.
inline double log_rel_diff(double a, double b) {
  if (a == kNegInf && b == kNegInf) return 0.0;
  if (a == kNegInf || b == kNegInf) return 1.0;
  return -std::expm1(-std::fabs(a - b));
}

// Catalan number C_n; exact in 64 bits for n <= 35.
inline std::uint64_t catalan(int n) {
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) {
    // C_{k+1} = C_k * 2(2k+1) / (k+2)
    c = c * 2 * (2 * k + 1) / (k + 2);
  }
  return c;
}

}  // namespace pinflip
