#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "corram/core.hpp"
#include "corram/fisher.hpp"
#include "corram/math.hpp"
#include "corram/phase.hpp"
#include "corram/rng.hpp"

namespace corram {

// One time-tagged readout.  outcome is 1 when the qubit is found in its
// initial state; stored as a double so that expected (fractional) outcomes
// can be carried by diagnostic traces.
struct MeasurementRecord {
  double t_start = 0.0;
  double outcome = 0.0;
};

struct TimeTrace {
  std::vector<MeasurementRecord> records;
  RamseyProtocol protocol;
  NoiseModel noise;
  std::optional<SignalParams> true_params;
  std::uint64_t seed = 0;
};

namespace detail {

inline double shot_probability(const SignalParams& s, const RamseyProtocol& p,
                               const NoiseModel& noise, double t_start) {
  const double phase = ramsey_phase(s, p.tau_r, t_start);
  return survival_probability(phase, p.tau_r, noise.t2_star);
}

}  // namespace detail

// Draw one binary trace; shot j uses value j of the counter stream, so the
// same (signal, protocol, noise, seed) always reproduces the same bits.
inline TimeTrace simulate_trace(const SignalParams& s, const RamseyProtocol& p,
                                const NoiseModel& noise, std::uint64_t seed) {
  TimeTrace trace{{}, p, noise, s, seed};
  trace.records.reserve(static_cast<std::size_t>(p.n));
  for (long long j = 0; j < p.n; ++j) {
    const double t = p.start_time(j);
    const double prob = detail::shot_probability(s, p, noise, t);
    const double u = rng::uniform01(seed, static_cast<std::uint64_t>(j));
    trace.records.push_back({t, u < prob ? 1.0 : 0.0});
  }
  return trace;
}

// Noise-free variant carrying the per-shot expectation values instead of
// sampled bits; for estimator self-consistency checks.
inline TimeTrace simulate_expected_trace(const SignalParams& s, const RamseyProtocol& p,
                                         const NoiseModel& noise) {
  TimeTrace trace{{}, p, noise, s, 0};
  trace.records.reserve(static_cast<std::size_t>(p.n));
  for (long long j = 0; j < p.n; ++j) {
    const double t = p.start_time(j);
    trace.records.push_back({t, detail::shot_probability(s, p, noise, t)});
  }
  return trace;
}

// Bernoulli log-likelihood of the trace under a candidate signal.
// Probabilities are clamped to [1e-12, 1 - 1e-12] as a floor against -inf.
inline double log_likelihood(const TimeTrace& trace, const SignalParams& candidate) {
  constexpr double clamp = 1e-12;
  double total = 0.0;
  for (const auto& rec : trace.records) {
    double prob = detail::shot_probability(candidate, trace.protocol, trace.noise,
                                           rec.t_start);
    prob = std::min(1.0 - clamp, std::max(clamp, prob));
    total += rec.outcome * std::log(prob) + (1.0 - rec.outcome) * std::log(1.0 - prob);
  }
  return total;
}

// Search axis for one parameter; steps == 1 pins the parameter at lo.
struct SearchAxis {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;

  bool free() const { return steps > 1; }
  double at(int i) const {
    if (steps == 1) return lo;
    return lo + (hi - lo) * i / (steps - 1);
  }
};

struct SearchBounds {
  SearchAxis omega;
  SearchAxis xi;
  SearchAxis phi;
};

struct EstimationResult {
  SignalParams estimate;
  double log_likelihood = 0.0;
  bool uninformative = false;  // all outcomes identical
  int grid_evaluations = 0;
  int refine_passes = 0;
};

namespace detail {

inline void validate_axis(const SearchAxis& axis, const char* name) {
  if (!(axis.lo <= axis.hi))
    throw validation_error(std::string(name) + " bounds must satisfy lo <= hi");
  if (axis.lo < axis.hi && axis.steps < 2)
    throw validation_error(std::string(name) + " bounds need at least 2 grid points");
  if (axis.steps < 1)
    throw validation_error(std::string(name) + " steps must be at least 1");
}

}  // namespace detail

// Coarse grid search over (omega, xi, phi) followed by coordinate-wise
// golden-section refinement of the free parameters.
inline EstimationResult estimate_mle(const TimeTrace& trace, const SearchBounds& bounds,
                                     int refine_passes = 3) {
  if (trace.records.empty()) throw validation_error("trace must contain records");
  detail::validate_axis(bounds.omega, "omega");
  detail::validate_axis(bounds.xi, "xi");
  detail::validate_axis(bounds.phi, "phi");

  const auto ll = [&](double omega, double xi, double phi) {
    return log_likelihood(trace, {omega, xi, phi});
  };

  EstimationResult result;
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0, best_j = 0, best_k = 0;
  for (int i = 0; i < bounds.omega.steps; ++i) {
    for (int j = 0; j < bounds.xi.steps; ++j) {
      for (int k = 0; k < bounds.phi.steps; ++k) {
        const double value = ll(bounds.omega.at(i), bounds.xi.at(j), bounds.phi.at(k));
        ++result.grid_evaluations;
        if (value > best) {
          best = value;
          best_i = i;
          best_j = j;
          best_k = k;
        }
      }
    }
  }

  double omega = bounds.omega.at(best_i);
  double xi = bounds.xi.at(best_j);
  double phi = bounds.phi.at(best_k);

  const auto refine = [&](const SearchAxis& axis, double current,
                          const std::function<double(double)>& f) {
    if (!axis.free()) return current;
    const double cell = (axis.hi - axis.lo) / (axis.steps - 1);
    const double lo = std::max(axis.lo, current - cell);
    const double hi = std::min(axis.hi, current + cell);
    return golden_section_max(f, lo, hi, 120);
  };

  for (int pass = 0; pass < refine_passes; ++pass) {
    omega = refine(bounds.omega, omega, [&](double w) { return ll(w, xi, phi); });
    xi = refine(bounds.xi, xi, [&](double x) { return ll(omega, x, phi); });
    phi = refine(bounds.phi, phi, [&](double p) { return ll(omega, xi, p); });
  }
  result.refine_passes = refine_passes;
  result.estimate = {omega, xi, phi};
  result.log_likelihood = ll(omega, xi, phi);

  const double first = trace.records.front().outcome;
  result.uninformative = std::all_of(
      trace.records.begin(), trace.records.end(),
      [&](const MeasurementRecord& r) { return r.outcome == first; });
  return result;
}

struct CrbReport {
  double ratio = 0.0;      // empirical MSE * Fisher information
  double mse = 0.0;
  bool suspicious = false; // ratio below 0.8 suggests bias or a wrong FI
};

namespace detail {

inline double circular_difference(double a, double b) {
  double d = std::fmod(a - b, 2.0 * pi);
  if (d > pi) d -= 2.0 * pi;
  if (d < -pi) d += 2.0 * pi;
  return d;
}

inline double param_error(const SignalParams& estimate, const SignalParams& truth,
                          Param param) {
  switch (param) {
    case Param::frequency: return estimate.omega - truth.omega;
    case Param::amplitude: return estimate.xi - truth.xi;
    case Param::phase: return circular_difference(estimate.phi, truth.phi);
  }
  return 0.0;
}

}  // namespace detail

// Efficiency ratio of an estimator ensemble against the information bound;
// asymptotically >= ~1 for an unbiased estimator.
inline CrbReport crb_report(const std::vector<EstimationResult>& ensemble,
                            const SignalParams& truth, double fisher_value,
                            Param param) {
  if (ensemble.size() < 30)
    throw validation_error("ensemble must contain at least 30 results");
  double mse = 0.0;
  for (const auto& r : ensemble) {
    const double err = detail::param_error(r.estimate, truth, param);
    mse += err * err;
  }
  mse /= static_cast<double>(ensemble.size());
  CrbReport report;
  report.mse = mse;
  report.ratio = mse * fisher_value;
  report.suspicious = report.ratio < 0.8;
  return report;
}

// --- trace file format -----------------------------------------------------
//
//   # corram-trace v1
//   # tau_r = <float>        # tau_o, n, t2_star, dd_exponent likewise
//   # t2_base = <float>      # only when set
//   # t1_cap = <float>       # only when set
//   # seed = <uint64>
//   # true_omega = <float>   # true_xi / true_phi likewise, only when known
//   t_start,outcome
//   <float>,<0|1>
//
// Floats are written with 17 significant digits so a round trip is bit exact.

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_trace(std::ostream& out, const TimeTrace& trace) {
  out << "# corram-trace v1\n";
  out << "# tau_r = " << detail::fmt17(trace.protocol.tau_r) << "\n";
  out << "# tau_o = " << detail::fmt17(trace.protocol.tau_o) << "\n";
  out << "# n = " << trace.protocol.n << "\n";
  out << "# t2_star = " << detail::fmt17(trace.noise.t2_star) << "\n";
  out << "# dd_exponent = " << detail::fmt17(trace.noise.dd_exponent) << "\n";
  if (trace.noise.t2_base) out << "# t2_base = " << detail::fmt17(*trace.noise.t2_base) << "\n";
  if (trace.noise.t1_cap) out << "# t1_cap = " << detail::fmt17(*trace.noise.t1_cap) << "\n";
  out << "# seed = " << trace.seed << "\n";
  if (trace.true_params) {
    out << "# true_omega = " << detail::fmt17(trace.true_params->omega) << "\n";
    out << "# true_xi = " << detail::fmt17(trace.true_params->xi) << "\n";
    out << "# true_phi = " << detail::fmt17(trace.true_params->phi) << "\n";
  }
  out << "t_start,outcome\n";
  for (const auto& rec : trace.records) {
    out << detail::fmt17(rec.t_start) << "," << detail::fmt17(rec.outcome) << "\n";
  }
}

inline TimeTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# corram-trace v1")
    throw io_error("not a corram-trace v1 file");

  std::map<std::string, std::string> header;
  while (in.peek() == '#') {
    std::getline(in, line);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw io_error("malformed trace header line: " + line);
    std::string key = line.substr(1, eq - 1);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    trim(key);
    trim(value);
    header[key] = value;
  }
  const auto need = [&](const std::string& key) {
    auto it = header.find(key);
    if (it == header.end()) throw io_error("trace header missing " + key);
    return it->second;
  };

  const double tau_r = std::stod(need("tau_r"));
  const double tau_o = std::stod(need("tau_o"));
  const long long n = std::stoll(need("n"));
  std::optional<double> t2_base;
  std::optional<double> t1_cap;
  if (header.count("t2_base")) t2_base = std::stod(header["t2_base"]);
  if (header.count("t1_cap")) t1_cap = std::stod(header["t1_cap"]);

  TimeTrace trace;
  trace.protocol = make_ramsey_protocol(tau_r, tau_o, n);
  trace.noise = make_noise(std::stod(need("t2_star")), std::stod(need("dd_exponent")),
                           t2_base, t1_cap);
  trace.seed = std::stoull(need("seed"));
  if (header.count("true_omega")) {
    trace.true_params = make_signal(std::stod(header["true_omega"]),
                                    std::stod(header["true_xi"]),
                                    std::stod(header["true_phi"]));
  }

  if (!std::getline(in, line) || line != "t_start,outcome")
    throw io_error("trace data header missing");
  trace.records.reserve(static_cast<std::size_t>(n));
  long long j = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw io_error("malformed trace row: " + line);
    MeasurementRecord rec;
    rec.t_start = std::stod(line.substr(0, comma));
    rec.outcome = std::stod(line.substr(comma + 1));
    if (!(rec.outcome >= 0.0 && rec.outcome <= 1.0))
      throw io_error("trace outcome out of range: " + line);
    const double expected = trace.protocol.start_time(j);
    if (rec.t_start != expected)
      throw io_error("trace row " + std::to_string(j) + " breaks the tilde_tau spacing");
    trace.records.push_back(rec);
    ++j;
  }
  if (j != n) throw io_error("trace row count does not match header n");
  return trace;
}

}  // namespace corram
