#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "corram/common.hpp"

namespace corram {

// Single-tone target signal S(t) = xi*cos(omega*t + phi).
//   omega  angular frequency [rad / time]
//   xi     amplitude as a phase-accumulation rate [rad / time]
//   phi    initial phase [rad], kept in [0, 2*pi)
struct SignalParams {
  double omega = 0.0;
  double xi = 0.0;
  double phi = 0.0;
};

inline double normalize_phase(double phi) {
  double p = std::fmod(phi, 2.0 * pi);
  if (p < 0.0) p += 2.0 * pi;
  return p;
}

inline SignalParams make_signal(double omega, double xi, double phi) {
  if (!(omega >= 0.0) || !std::isfinite(omega))
    throw validation_error("omega must be finite and non-negative");
  if (!(xi >= 0.0) || !std::isfinite(xi))
    throw validation_error("xi must be finite and non-negative");
  if (!std::isfinite(phi)) throw validation_error("phi must be finite");
  return {omega, xi, normalize_phase(phi)};
}

// Dephasing model.  t2_star is the free-evolution dephasing time; a pulse
// train stretches the usable coherence to t2_base * m^dd_exponent, capped by
// t1_cap when a relaxation limit is given.  t2_base defaults to t2_star and
// exists so that an experimentally calibrated single-echo coherence larger
// than t2_star can be expressed.
struct NoiseModel {
  double t2_star = 1.0;
  double dd_exponent = 1.0;
  std::optional<double> t2_base;
  std::optional<double> t1_cap;

  double dd_base() const { return t2_base ? *t2_base : t2_star; }
};

inline NoiseModel make_noise(double t2_star, double dd_exponent = 1.0,
                             std::optional<double> t2_base = std::nullopt,
                             std::optional<double> t1_cap = std::nullopt) {
  if (!(t2_star > 0.0) || !std::isfinite(t2_star))
    throw validation_error("t2_star must be positive");
  if (!(dd_exponent >= 0.0) || !std::isfinite(dd_exponent))
    throw validation_error("dd_exponent must be non-negative");
  if (t2_base && (!(*t2_base >= t2_star) || !std::isfinite(*t2_base)))
    throw validation_error("t2_base must be >= t2_star");
  if (t1_cap && (!(*t1_cap > 0.0) || !std::isfinite(*t1_cap)))
    throw validation_error("t1_cap must be positive");
  return {t2_star, dd_exponent, t2_base, t1_cap};
}

// Coherence time available to a pulse train of m pulses.
inline double coherence_time(const NoiseModel& noise, long long m) {
  if (m < 1) throw validation_error("m must be at least 1");
  double t2 = noise.dd_base() * std::pow(static_cast<double>(m), noise.dd_exponent);
  if (noise.t1_cap) t2 = std::min(t2, *noise.t1_cap);
  return t2;
}

// N repetitions of free evolution tau_r + readout/reset overhead tau_o.
// Shot j (0-based) starts at j * tilde_tau, so the first shot starts at 0.
struct RamseyProtocol {
  double tau_r = 0.0;
  double tau_o = 0.0;
  long long n = 0;

  double tilde_tau() const { return tau_r + tau_o; }
  double total_time() const { return static_cast<double>(n) * tilde_tau(); }
  double start_time(long long shot) const { return static_cast<double>(shot) * tilde_tau(); }
};

inline RamseyProtocol make_ramsey_protocol(double tau_r, double tau_o, long long n) {
  if (!(tau_r > 0.0) || !std::isfinite(tau_r))
    throw validation_error("tau_r must be positive");
  if (!(tau_o >= 0.0) || !std::isfinite(tau_o))
    throw validation_error("tau_o must be non-negative");
  if (n < 1) throw validation_error("n must be at least 1");
  return {tau_r, tau_o, n};
}

// Evenly spaced pulse train: m pi pulses, spacing tau, pulse j at (j+1/2)*tau,
// total duration m*tau, passband center omega_dd = pi/tau.
struct DDProtocol {
  long long m = 0;
  double tau = 0.0;

  double total_time() const { return static_cast<double>(m) * tau; }
  double omega_dd() const { return pi / tau; }
  double pulse_time(long long j) const { return (static_cast<double>(j) + 0.5) * tau; }
};

inline DDProtocol make_dd_protocol(long long m, double tau) {
  if (m < 1) throw validation_error("m must be at least 1");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw validation_error("tau must be positive");
  return {m, tau};
}

// Piecewise-constant coherence sign h(t): +1 until the first pulse, flipping
// at every pulse, 0 outside the support.  Stored as breakpoints so that
// quadrature can split exactly at the sign changes.
struct ResponseFunction {
  std::vector<double> breakpoints;  // size = intervals + 1, starts at 0
  std::vector<int> values;          // +1 / -1 per interval

  double support_end() const { return breakpoints.back(); }

  // h(t); half-open intervals, end point inclusive.
  int value_at(double t) const {
    if (t < breakpoints.front() || t > breakpoints.back()) return 0;
    if (t == breakpoints.back()) return values.back();
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const auto idx = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    return values[idx];
  }
};

inline ResponseFunction response_function(const RamseyProtocol& p) {
  return {{0.0, p.tau_r}, {1}};
}

inline ResponseFunction response_function(const DDProtocol& p) {
  ResponseFunction rf;
  rf.breakpoints.reserve(static_cast<std::size_t>(p.m) + 2);
  rf.values.reserve(static_cast<std::size_t>(p.m) + 1);
  rf.breakpoints.push_back(0.0);
  int sign = 1;
  for (long long j = 0; j < p.m; ++j) {
    rf.breakpoints.push_back(p.pulse_time(j));
    rf.values.push_back(sign);
    sign = -sign;
  }
  rf.breakpoints.push_back(p.total_time());
  rf.values.push_back(sign);
  return rf;
}

inline int response_function(const RamseyProtocol& p, double t) {
  return (t >= 0.0 && t <= p.tau_r) ? 1 : 0;
}

inline int response_function(const DDProtocol& p, double t) {
  if (t < 0.0 || t > p.total_time()) return 0;
  // number of pulses at or before t; sign flips at each
  const double q = (t / p.tau) - 0.5;
  long long flips = q < 0.0 ? 0 : static_cast<long long>(std::floor(q)) + 1;
  if (flips > p.m) flips = p.m;
  if (flips < 0) flips = 0;
  // the division can land one pulse off when t sits exactly on a pulse time;
  // settle against the same products that define the pulse times
  while (flips < p.m && p.pulse_time(flips) <= t) ++flips;
  while (flips > 0 && p.pulse_time(flips - 1) > t) --flips;
  return (flips % 2 == 0) ? 1 : -1;
}

}  // namespace corram
