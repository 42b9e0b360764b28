//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "liemom/random.hpp"
#include "liemom/so_n.hpp"

namespace liemom {

// p(x) = x / (1 - exp(-x))
inline double p_series(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0;
  }
  return x / -std::expm1(-x);
}

inline std::complex<double> p_series(std::complex<double> z) {
  if (std::abs(z) < 1e-4) {
    const auto z2 = z * z;
    return 1.0 + 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0;
  }
  // 1 - e^{-z} with 1 - cos b = 2 sin^2(b/2), which avoids cancellation for small |b|
  const double a = z.real(), b = z.imag(), sh = std::sin(0.5 * b);
  const double ea = std::exp(-a);
  return z / std::complex<double>(-std::expm1(-a) + 2.0 * ea * sh * sh, ea * std::sin(b));
}

// q(x) = |p(ix) - 1| on (0, 2*pi)
inline double q_bound(double x) {
  if (!(x > 0.0 && x < 2.0 * std::numbers::pi)) throw std::domain_error("q_bound: x must lie in (0, 2*pi)");
  return std::abs(p_series(std::complex<double>(0.0, x)) - 1.0);
}

// Lower bound on A = max_{|X|=1} |ad_X|_op from random unit X and power iteration
// on -ad_X^2. The result is a running maximum, so it never decreases with more samples.
inline double estimate_A(int n, int samples, std::uint64_t seed, int power_iterations = 200) {
  if (n < 2) throw std::invalid_argument("estimate_A: n must be at least 2");
  Rng rng(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const AlgebraElement x = random_unit_skew(n, rng);
    AlgebraElement y = random_unit_skew(n, rng);
    for (int it = 0; it < power_iterations; ++it) {
      const AlgebraElement ady = bracket(x, y);
      const double gain = ady.norm();
      best = std::max(best, gain);
      const AlgebraElement next = bracket(x, ady);
      const double norm = next.norm();
      if (norm == 0.0) break;
      y = next * (1.0 / norm);
    }
  }
  return best;
}

namespace detail {

inline double zeta_even(int s) {
  constexpr double pi = std::numbers::pi;
  switch (s) {
    case 2: return pi * pi / 6.0;
    case 4: return std::pow(pi, 4) / 90.0;
    case 6: return std::pow(pi, 6) / 945.0;
    case 8: return std::pow(pi, 8) / 9450.0;
    case 10: return std::pow(pi, 10) / 93555.0;
    default: break;
  }
  double sum = 1.0;
  for (int j = 2;; ++j) {
    const double term = std::pow(static_cast<double>(j), -s);
    sum += term;
    if (term < 1e-18) break;
  }
  return sum;
}

}  // namespace detail

// p(ad_{log g}) xi via the power series of p,
//   p(x) = 1 + x/2 + sum_m (-1)^{m+1} 2 zeta(2m) (x / 2pi)^{2m},
// truncated once the remaining tail is below 1e-14 |xi| (and never before order 20).
inline AlgebraElement dlog_apply(const GroupElement& g, const AlgebraElement& xi,
                                 const Tolerances& tol = kDefaultTolerances) {
  require_same_dim(g.dim(), xi.dim());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const AlgebraElement x = group_log(g, tol);
  const double radius = ad_operator_norm(x);
  if (radius >= two_pi - tol.series_margin) throw SeriesDivergence(radius);
  const double rho = radius / two_pi;
  const double xi_norm = xi.norm();

  const AlgebraElement scaled_x = x * (1.0 / two_pi);
  AlgebraElement term = bracket(scaled_x, xi);  // (ad_X / 2pi)^1 xi
  AlgebraElement sum = xi + std::numbers::pi * term;
  for (int m = 1;; ++m) {
    term = bracket(scaled_x, term);
    const double zeta = detail::zeta_even(2 * m);
    sum += ((m % 2 == 1) ? 2.0 : -2.0) * zeta * term;
    if (2 * m >= 20) {
      // |remaining| <= 2 zeta(2) sum_{j > m} rho^{2j} |xi|
      const double rho2 = rho * rho;
      const double tail = 2.0 * detail::zeta_even(2) * std::pow(rho2, m + 1) / (1.0 - rho2) * xi_norm;
      if (tail <= 1e-14 * std::max(xi_norm, 1e-300) || xi_norm == 0.0) break;
    }
    term = bracket(scaled_x, term);  // odd powers carry no coefficient beyond the first
  }
  return sum;
}

}  // namespace liemom
