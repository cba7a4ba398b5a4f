#pragma once

#include <cmath>
#include <functional>

#include "corram/core.hpp"
#include "corram/math.hpp"

namespace corram {

// Phase accumulated over one free evolution of length tau_r starting at
// t_start:  xi*tau_r * cos(omega*(t_start + tau_r/2) + phi) * sinc(omega*tau_r/2).
// A nonzero start time only shifts the effective signal phase by omega*t_start.
inline double ramsey_phase(const SignalParams& s, double tau_r, double t_start = 0.0) {
  const double u = 0.5 * s.omega * tau_r;
  const double alpha = s.omega * (t_start + 0.5 * tau_r) + s.phi;
  return s.xi * tau_r * std::cos(alpha) * sinc(u);
}

namespace detail {

// Factors of the pulse-train phase, written with v = (omega*tau + pi)/2
// reduced to v = k*pi + r.  The raw closed form has a 0/0 at every odd
// multiple of omega*tau = pi; in reduced variables it is
//   phi_dd = -xi*tau * (-1)^k * cos(m*r + phi) * sin(m*r)/sin(r) * sin(w)*sinc(w)
// with w = omega*tau/4, which is finite and smooth everywhere.
struct DDPhaseParts {
  long long k;
  double r;        // reduced angle
  double sign;     // (-1)^k
  double ratio;    // sin(m r)/sin(r)
  double w;        // omega*tau/4
  double env;      // sin(w)*sinc(w)
};

inline DDPhaseParts dd_phase_parts(const DDProtocol& p, double omega) {
  const double v = 0.5 * (omega * p.tau + pi);
  const auto red = reduce_pi_multiple(v);
  DDPhaseParts parts;
  parts.k = red.k;
  parts.r = red.r;
  parts.sign = (red.k % 2 == 0) ? 1.0 : -1.0;
  parts.ratio = dirichlet_ratio(p.m, red.r);
  parts.w = 0.25 * omega * p.tau;
  parts.env = std::sin(parts.w) * sinc(parts.w);
  return parts;
}

}  // namespace detail

// Phase accumulated across an m-pulse train (sign-flipping response function
// convolved with the tone).  t_start shifts the signal phase by omega*t_start.
inline double dd_phase(const SignalParams& s, const DDProtocol& p, double t_start = 0.0) {
  const auto f = detail::dd_phase_parts(p, s.omega);
  const double md = static_cast<double>(p.m);
  const double phase = md * f.r + s.phi + s.omega * t_start;
  return -s.xi * p.tau * f.sign * std::cos(phase) * f.ratio * f.env;
}

// Small-detuning limit of dd_phase around the matched point omega = pi/tau:
//   (2 m xi tau / pi) * cos(m*delta*tau/2 + phi) * sinc(m*delta*tau/2),
// with delta = omega - pi/tau.
inline double dd_phase_detuned(const SignalParams& s, const DDProtocol& p, double delta) {
  const double md = static_cast<double>(p.m);
  const double g = 0.5 * md * delta * p.tau;
  return (2.0 * md * s.xi * p.tau / pi) * std::cos(g + s.phi) * sinc(g);
}

// Direct numerical integral of h(t)*xi*cos(omega t + phi) over the support,
// split exactly at the response-function breakpoints.  Independent of the
// closed forms above; used to check them.
inline double phase_quadrature_oracle(const SignalParams& s, const ResponseFunction& rf,
                                      double abs_tol = 1e-12) {
  if (s.xi == 0.0) return 0.0;
  double total = 0.0;
  const double seg_tol = abs_tol / static_cast<double>(rf.values.size());
  for (std::size_t i = 0; i < rf.values.size(); ++i) {
    const double a = rf.breakpoints[i];
    const double b = rf.breakpoints[i + 1];
    const double h = static_cast<double>(rf.values[i]);
    total += integrate(
        [&](double t) { return h * s.xi * std::cos(s.omega * t + s.phi); }, a, b,
        seg_tol);
  }
  return total;
}

inline double phase_quadrature_oracle(const SignalParams& s, const RamseyProtocol& p,
                                      double abs_tol = 1e-12) {
  return phase_quadrature_oracle(s, response_function(p), abs_tol);
}

inline double phase_quadrature_oracle(const SignalParams& s, const DDProtocol& p,
                                      double abs_tol = 1e-12) {
  return phase_quadrature_oracle(s, response_function(p), abs_tol);
}

// Phase-averaged squared Ramsey phase: xi^2 tau_r^2 sinc^2(omega tau_r/2) / 2.
inline double ramsey_filter_function(double omega, double xi, double tau_r) {
  const double u = 0.5 * omega * tau_r;
  const double sc = sinc(u);
  return 0.5 * xi * xi * tau_r * tau_r * sc * sc;
}

struct MaxFrequencyResult {
  double omega = 0.0;
  bool at_boundary = false;  // scan argmax hit the search window edge
};

// Frequency maximizing |ramsey_phase| for a given initial phase.  Dense scan
// of the closed form over (0, 4*pi/tau_r], golden-section refinement, then
// comparison against the static value at omega = 0.  For phi = n*pi the
// static value wins and 0 is returned.
inline MaxFrequencyResult ramsey_max_frequency(double phi, double tau_r) {
  if (!(tau_r > 0.0)) throw validation_error("tau_r must be positive");
  const auto mag = [&](double omega) {
    return std::abs(ramsey_phase({omega, 1.0, phi}, tau_r));
  };
  const double omega_max = 4.0 * pi / tau_r;
  const int scan_points = 4096;
  const double step = omega_max / scan_points;
  double best_omega = step;
  double best_val = mag(step);
  for (int i = 2; i <= scan_points; ++i) {
    const double w = step * i;
    const double m = mag(w);
    if (m > best_val) {
      best_val = m;
      best_omega = w;
    }
  }
  MaxFrequencyResult result;
  if (best_omega >= omega_max - 0.5 * step) {
    result.omega = omega_max;
    result.at_boundary = true;
    return result;
  }
  const double lo = std::max(0.0, best_omega - step);
  const double hi = best_omega + step;
  const double refined = golden_section_max(mag, lo, hi);
  if (mag(0.0) >= mag(refined)) {
    result.omega = 0.0;
  } else {
    result.omega = refined;
  }
  return result;
}

// Probability of finding the qubit in its initial state after accumulating
// `phase` over `elapsed_time` with coherence time t_s.
inline double survival_probability(double phase, double elapsed_time, double t_s) {
  if (!(t_s > 0.0)) throw validation_error("t_s must be positive");
  if (!(elapsed_time >= 0.0)) throw validation_error("elapsed_time must be non-negative");
  const double p = 0.5 * (1.0 + std::exp(-elapsed_time / t_s) * std::cos(phase));
  return std::min(1.0, std::max(0.0, p));
}

}  // namespace corram
