#pragma once

#include <cmath>
#include <limits>

#include "corram/core.hpp"
#include "corram/phase.hpp"

namespace corram {

// Signal parameter being estimated; numbering follows a^1 = omega,
// a^2 = xi, a^3 = phi.
enum class Param : int { frequency = 1, amplitude = 2, phase = 3 };

struct FisherResult {
  double value = 0.0;
  Param param = Param::frequency;
  bool phase_averaged = false;
};

// Mean of FI over phi used wherever "phase averaged" results are produced.
// 128 uniform nodes average the cos^2/sin^2 structure of these integrands to
// machine precision.
inline constexpr int default_phase_grid = 128;

// Analytic derivative of the closed-form Ramsey phase with respect to one
// signal parameter, sinc' terms included.
inline double phase_derivative(const SignalParams& s, const RamseyProtocol& p,
                               Param param, double t_start = 0.0) {
  const double tau_r = p.tau_r;
  const double u = 0.5 * s.omega * tau_r;
  const double alpha = s.omega * (t_start + 0.5 * tau_r) + s.phi;
  switch (param) {
    case Param::frequency:
      return s.xi * tau_r *
             (-(t_start + 0.5 * tau_r) * std::sin(alpha) * sinc(u) +
              std::cos(alpha) * sinc_prime(u) * 0.5 * tau_r);
    case Param::amplitude:
      return tau_r * std::cos(alpha) * sinc(u);
    case Param::phase:
      return -s.xi * tau_r * std::sin(alpha) * sinc(u);
  }
  return 0.0;
}

// Same for the pulse-train phase, via the product rule on the reduced form.
// All factors are smooth through the matched point omega*tau = pi, so no
// special casing is needed there.
inline double phase_derivative(const SignalParams& s, const DDProtocol& p,
                               Param param, double t_start = 0.0) {
  const auto f = detail::dd_phase_parts(p, s.omega);
  const double md = static_cast<double>(p.m);
  const double beta = md * f.r + s.phi + s.omega * t_start;
  const double cb = std::cos(beta);
  const double sb = std::sin(beta);
  switch (param) {
    case Param::frequency: {
      const double dr_domega = 0.5 * p.tau;
      const double dw_domega = 0.25 * p.tau;
      const double ratio_prime = detail::dirichlet_ratio_prime(p.m, f.r);
      const double env_prime = 2.0 * sinc(2.0 * f.w) - sinc(f.w) * sinc(f.w);
      const double dbeta_domega = md * dr_domega + t_start;
      return -s.xi * p.tau * f.sign *
             (-sb * dbeta_domega * f.ratio * f.env +
              cb * ratio_prime * dr_domega * f.env +
              cb * f.ratio * env_prime * dw_domega);
    }
    case Param::amplitude:
      return -p.tau * f.sign * cb * f.ratio * f.env;
    case Param::phase:
      return s.xi * p.tau * f.sign * sb * f.ratio * f.env;
  }
  return 0.0;
}

namespace detail {

// sin^2(phase)/(exp(2t/Ts) - cos^2(phase)) * deriv^2, evaluated through the
// decaying form so that t >> Ts underflows to 0 instead of overflowing.
inline double fisher_from_phase(double phase, double deriv, double elapsed,
                                double coherence) {
  const double decay = std::exp(-2.0 * elapsed / coherence);
  const double sp = std::sin(phase);
  const double cp = std::cos(phase);
  const double numerator = decay * sp * sp * deriv * deriv;
  if (numerator == 0.0) return 0.0;
  return numerator / (1.0 - decay * cp * cp);
}

}  // namespace detail

// FI of a single Ramsey shot started at t_start; dephasing over tau_r with
// coherence t2_star.
inline FisherResult fisher_single(const RamseyProtocol& p, const SignalParams& s,
                                  const NoiseModel& noise, Param param,
                                  double t_start = 0.0) {
  const double phase = ramsey_phase(s, p.tau_r, t_start);
  const double deriv = phase_derivative(s, p, param, t_start);
  return {detail::fisher_from_phase(phase, deriv, p.tau_r, noise.t2_star), param, false};
}

// FI of one full pulse-train sequence; dephasing over m*tau with the
// train-extended coherence time.
inline FisherResult fisher_single(const DDProtocol& p, const SignalParams& s,
                                  const NoiseModel& noise, Param param,
                                  double t_start = 0.0) {
  const double phase = dd_phase(s, p, t_start);
  const double deriv = phase_derivative(s, p, param, t_start);
  const double t2 = coherence_time(noise, p.m);
  return {detail::fisher_from_phase(phase, deriv, p.total_time(), t2), param, false};
}

// Total FI of n time-tagged Ramsey shots, shot j starting at j*tilde_tau.
// With phase_average the whole sum is averaged over a uniform phi grid.
inline FisherResult fisher_correlated_ramsey(const RamseyProtocol& p,
                                             const SignalParams& s,
                                             const NoiseModel& noise, Param param,
                                             bool phase_average = false,
                                             int phase_grid = default_phase_grid) {
  if (!phase_average) {
    double total = 0.0;
    for (long long j = 0; j < p.n; ++j) {
      total += fisher_single(p, s, noise, param, p.start_time(j)).value;
    }
    return {total, param, false};
  }
  double mean = 0.0;
  SignalParams sg = s;
  for (int g = 0; g < phase_grid; ++g) {
    sg.phi = 2.0 * pi * g / phase_grid;
    double total = 0.0;
    for (long long j = 0; j < p.n; ++j) {
      total += fisher_single(p, sg, noise, param, p.start_time(j)).value;
    }
    mean += total;
  }
  return {mean / phase_grid, param, true};
}

// FI of a single pulse-train sequence.  The phase-averaged phase-parameter
// value is 0 by definition: one sequence carries no absolute time reference,
// so an unknown signal phase cannot be estimated from it.
inline FisherResult fisher_dd(const DDProtocol& p, const SignalParams& s,
                              const NoiseModel& noise, Param param,
                              bool phase_average = false,
                              int phase_grid = default_phase_grid) {
  if (!phase_average) return fisher_single(p, s, noise, param);
  if (param == Param::phase) return {0.0, param, true};
  double mean = 0.0;
  SignalParams sg = s;
  for (int g = 0; g < phase_grid; ++g) {
    sg.phi = 2.0 * pi * g / phase_grid;
    mean += fisher_single(p, sg, noise, param).value;
  }
  return {mean / phase_grid, param, true};
}

// Leading-order low-frequency FI of n Ramsey shots:
//   f * tau_r^2 T / (2 tilde_tau) * exp(-2 tau_r / t2_star),
// f = xi^2 T^2/3, 1, xi^2 for omega, xi, phi.
inline FisherResult fisher_approx_nr(const RamseyProtocol& p, const SignalParams& s,
                                     const NoiseModel& noise, Param param) {
  const double t = p.total_time();
  double f = 0.0;
  switch (param) {
    case Param::frequency: f = s.xi * s.xi * t * t / 3.0; break;
    case Param::amplitude: f = 1.0; break;
    case Param::phase: f = s.xi * s.xi; break;
  }
  const double value = f * p.tau_r * p.tau_r * t / (2.0 * p.tilde_tau()) *
                       std::exp(-2.0 * p.tau_r / noise.t2_star);
  return {value, param, true};
}

// Leading-order low-detuning FI of one matched pulse train:
//   f_dd * T^2/(2 pi^2) * exp(-2 T / T2),  f_dd = xi^2 T^2, 4 for omega, xi;
// exactly 0 for phi.
inline FisherResult fisher_approx_dd(const DDProtocol& p, const SignalParams& s,
                                     const NoiseModel& noise, Param param) {
  const double t = p.total_time();
  if (param == Param::phase) return {0.0, param, true};
  const double f = (param == Param::frequency) ? s.xi * s.xi * t * t : 4.0;
  const double t2 = coherence_time(noise, p.m);
  const double value = f * t * t / (2.0 * pi * pi) * std::exp(-2.0 * t / t2);
  return {value, param, true};
}

struct LogGain {
  double value = 0.0;
  bool infinite = false;  // a zero FI on one side made the log-gain +/-inf
};

// Matched shot count: largest n with n*tilde_tau <= total_time, with a
// one-part-in-1e6 slack so grid arithmetic does not drop a shot.
inline long long matched_shot_count(double tau_r, double tau_o, double total_time) {
  const double q = total_time / (tau_r + tau_o);
  return static_cast<long long>(std::floor(q * (1.0 + 1e-6)));
}

inline RamseyProtocol make_matched_ramsey(double tau_r, double tau_o,
                                          const DDProtocol& dd) {
  const long long n = matched_shot_count(tau_r, tau_o, dd.total_time());
  return make_ramsey_protocol(tau_r, tau_o, n);
}

// ln(I_NR / I_DD) with phase-averaged exact FI on both sides.  The Ramsey
// protocol must be the floor-truncated match of the train duration.
inline LogGain gain_exact(const RamseyProtocol& ramsey, const DDProtocol& dd,
                          const SignalParams& s, const NoiseModel& noise, Param param,
                          int phase_grid = default_phase_grid) {
  const long long n_expected = matched_shot_count(ramsey.tau_r, ramsey.tau_o,
                                                  dd.total_time());
  if (ramsey.n != n_expected)
    throw validation_error("ramsey shot count does not match the train duration");
  const double i_nr =
      fisher_correlated_ramsey(ramsey, s, noise, param, true, phase_grid).value;
  const double i_dd = fisher_dd(dd, s, noise, param, true, phase_grid).value;
  LogGain g;
  if (i_dd == 0.0) {
    g.value = std::numeric_limits<double>::infinity();
    g.infinite = true;
  } else if (i_nr == 0.0) {
    g.value = -std::numeric_limits<double>::infinity();
    g.infinite = true;
  } else {
    g.value = std::log(i_nr / i_dd);
  }
  return g;
}

// Low-frequency limit of the log-gain:
//   2 (T/T2 - tau_r/t2_star) + ln(pi^2 tau_r^2 f / (T tilde_tau)),
// f = 1/3 for omega, 1/4 for xi.
inline double gain_approx(double tau_r, double tau_o, double dd_total_time,
                          double t2_dd, double t2_star, Param param) {
  if (param == Param::phase)
    throw validation_error("param must be frequency or amplitude for the approximate gain");
  const double f = (param == Param::frequency) ? 1.0 / 3.0 : 0.25;
  return 2.0 * (dd_total_time / t2_dd - tau_r / t2_star) +
         std::log(pi * pi * tau_r * tau_r * f / (dd_total_time * (tau_r + tau_o)));
}

inline double gain_approx(const RamseyProtocol& ramsey, const DDProtocol& dd,
                          const NoiseModel& noise, Param param) {
  return gain_approx(ramsey.tau_r, ramsey.tau_o, dd.total_time(),
                     coherence_time(noise, dd.m), noise.t2_star, param);
}

// sqrt(FI / T): information rate per unit total time.
inline double sensitivity(double fisher_value, double total_time) {
  if (!(total_time > 0.0)) throw validation_error("total_time must be positive");
  if (!(fisher_value >= 0.0)) throw validation_error("fisher_value must be non-negative");
  return std::sqrt(fisher_value / total_time);
}

// Minimum information for a resolvable estimate: 4/omega^2 for frequency
// (Rayleigh-style criterion), 10/pi for phase (5% of the search interval).
inline double detection_threshold(Param param, double omega = 0.0) {
  switch (param) {
    case Param::frequency:
      if (!(omega > 0.0)) throw validation_error("omega must be positive");
      return 4.0 / (omega * omega);
    case Param::phase:
      return 10.0 / pi;
    case Param::amplitude:
      break;
  }
  throw validation_error("no threshold defined for amplitude");
}

}  // namespace corram
