#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "corram/common.hpp"

namespace corram {

// sinc(x) = sin(x)/x with sinc(0) = 1.  Series below 1e-4 keeps full
// precision where direct division would just waste the argument's low bits.
inline double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

// d/dx sinc(x) = (cos x - sinc x)/x; series below 1e-3 avoids cancellation.
inline double sinc_prime(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = x * x;
    return -x / 3.0 * (1.0 - x2 / 10.0);
  }
  return (std::cos(x) - sinc(x)) / x;
}

namespace detail {

// v = k*pi + r with integer k and |r| <= pi/2, r computed without losing the
// low bits of v to the k*pi subtraction.
struct ReducedAngle {
  long long k;
  double r;
};

inline ReducedAngle reduce_pi_multiple(double v) {
  const long long k = static_cast<long long>(std::llround(v / pi));
  const double kd = static_cast<double>(k);
  const double r = (v - kd * pi) - kd * pi_lo;
  return {k, r};
}

// sin(m*r)/sin(r), the Dirichlet-style ratio that appears when a pulse-train
// response function is Fourier summed.  Finite for all r; equals m at r = 0.
inline double dirichlet_ratio(long long m, double r) {
  if (r == 0.0) return static_cast<double>(m);
  return std::sin(static_cast<double>(m) * r) / std::sin(r);
}

// d/dr of dirichlet_ratio.  The direct quotient-rule numerator
//   m*cos(m r)*sin(r) - sin(m r)*cos(r)
// is O(r^3) built from O(r) terms, so for small (m+1)|r| it is summed as the
// series  sum_{n>=1} (-1)^n r^(2n+1) (m^2-1)[(m+1)^(2n)-(m-1)^(2n)] / (2(2n+1)!).
inline double dirichlet_ratio_prime(long long m, double r) {
  const double md = static_cast<double>(m);
  if (r == 0.0) return 0.0;
  const double s = std::sin(r);
  if ((md + 1.0) * std::abs(r) >= 1.0) {
    return (md * std::cos(md * r) * s - std::sin(md * r) * std::cos(r)) / (s * s);
  }
  const double m2m1 = md * md - 1.0;
  if (m2m1 == 0.0) return 0.0;  // m = 1: ratio is identically 1
  const double ap = (md + 1.0) * r;
  const double am = (md - 1.0) * r;
  const double ap2 = ap * ap;
  const double am2 = am * am;
  // term_n = (-1)^n r (m^2-1) [(m+1)^(2n) - (m-1)^(2n)] r^(2n) / (2(2n+1)!)
  double pow_p = ap2;  // ((m+1) r)^(2n)
  double pow_m = am2;
  double fact = 6.0;   // (2n+1)!
  double sign = -1.0;
  double sum = 0.0;
  for (int n = 1; n <= 16; ++n) {
    const double term = sign * r * m2m1 * (pow_p - pow_m) / (2.0 * fact);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    pow_p *= ap2;
    pow_m *= am2;
    fact *= (2.0 * n + 2.0) * (2.0 * n + 3.0);
    sign = -sign;
  }
  return sum / (s * s);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integral of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12) {
  if (a == b) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 15, abs_tol, &error);
}

// Golden-section maximization of f on [a, b]; deterministic, no derivatives.
inline double golden_section_max(const std::function<double(double)>& f, double a,
                                 double b, int iterations = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations && (b - a) > 0.0; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace corram
