#pragma once

// Independent reference implementations in extended precision. They share no
// code with the library on purpose.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>

namespace qkdfinite::oracle {

inline long double h(long double x) {
  if (x <= 0.0L || x >= 1.0L) return 0.0L;
  return -x * std::log2(x) - (1.0L - x) * std::log2(1.0L - x);
}

// Eve's information for a fixed split u of the correlation between the
// key-basis term and the error term; negative when u is not admissible.
inline long double eve_objective(long double q, long double c, long double u) {
  const long double rest = c / 2.0L - (1.0L - q) * (1.0L - q) * u * u;
  if (rest < -1e-15L) return -1.0L;
  long double v = 0.0L;
  if (q > 0.0L) v = std::sqrt(std::max(rest, 0.0L)) / q;
  if (v > 1.0L + 1e-12L) return -1.0L;
  return (1.0L - q) * h((1.0L + u) / 2.0L) +
         (q > 0.0L ? q * h((1.0L + std::min(v, 1.0L)) / 2.0L) : 0.0L);
}

// Maximizes eve_objective over every admissible u by a dense scan followed
// by golden-section refinement of the best cell.
inline long double eve_information_brute(long double q, long double c) {
  const long double s = std::sqrt(c / 2.0L);
  const long double hi = std::min(s / (1.0L - q), 1.0L);
  const long double lo =
      std::clamp(std::sqrt(std::max(c / 2.0L - q * q, 0.0L)) / (1.0L - q),
                 0.0L, hi);
  constexpr int kCells = 20000;
  long double best = -1.0L;
  int best_i = 0;
  for (int i = 0; i <= kCells; ++i) {
    const long double u = lo + (hi - lo) * i / kCells;
    const long double f = eve_objective(q, c, u);
    if (f > best) {
      best = f;
      best_i = i;
    }
  }
  long double a = lo + (hi - lo) * std::max(best_i - 1, 0) / kCells;
  long double b = lo + (hi - lo) * std::min(best_i + 1, kCells) / kCells;
  const long double g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  for (int it = 0; it < 200; ++it) {
    const long double x1 = b - g * (b - a);
    const long double x2 = a + g * (b - a);
    if (eve_objective(q, c, x1) >= eve_objective(q, c, x2)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  return std::max({best, eve_objective(q, c, 0.5L * (a + b)),
                   eve_objective(q, c, lo), eve_objective(q, c, hi)});
}

// sum_d e^{i theta d} P_N(d) with P_N from Pascal's triangle.
inline std::complex<long double> walk_characteristic(long double theta,
                                                     int n_steps) {
  std::complex<long double> acc = 0.0L;
  long double binom = 1.0L;
  for (int j = 0; j <= n_steps; ++j) {
    const int d = 2 * j - n_steps;
    acc += binom * std::ldexp(1.0L, -n_steps) *
           std::polar(1.0L, theta * static_cast<long double>(d));
    binom = binom * (n_steps - j) / (j + 1);
  }
  return acc;
}

// (1/N) sum_{k<N} (cos theta)^k, directly.
inline long double step_averaged_walk(long double theta, std::uint64_t n) {
  long double acc = 0.0L;
  long double term = 1.0L;
  const long double c = std::cos(theta);
  for (std::uint64_t k = 0; k < n; ++k) {
    acc += term;
    term *= c;
  }
  return acc / static_cast<long double>(n);
}

}  // namespace qkdfinite::oracle
