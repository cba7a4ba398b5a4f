#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "corram/fisher.hpp"
#include "corram/sweep.hpp"
#include "corram/table.hpp"

namespace corram {

struct GainAxis {
  std::string name;
  std::string unit;
  std::vector<double> values;
};

// 2-D log-gain grid.  Cells whose exact gain diverged (one side's FI was
// exactly zero) are clipped to just past the finite range and flagged, so
// every stored value is finite and plot-ready.
struct GainMap {
  GainAxis x;
  GainAxis y;
  std::vector<double> values;         // row-major, x fastest; clipped, finite
  std::vector<std::uint8_t> infinite; // 1 where the raw value was +/-inf
  std::vector<double> raw;            // unclipped values, +/-inf preserved
  std::vector<std::pair<std::string, std::string>> metadata;

  double& at(std::size_t ix, std::size_t iy) { return values[iy * x.values.size() + ix]; }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * x.values.size() + ix]; }
};

namespace detail {

// Replace +/-inf by (max finite + 1)/(min finite - 1) and set flags.
inline void clip_gain_map(GainMap& map) {
  map.raw = map.values;
  map.infinite.assign(map.values.size(), 0);
  double max_finite = -std::numeric_limits<double>::infinity();
  double min_finite = std::numeric_limits<double>::infinity();
  for (const double v : map.values) {
    if (std::isfinite(v)) {
      max_finite = std::max(max_finite, v);
      min_finite = std::min(min_finite, v);
    }
  }
  if (!std::isfinite(max_finite)) {
    max_finite = 0.0;
    min_finite = 0.0;
  }
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    if (!std::isfinite(map.values[i])) {
      map.infinite[i] = 1;
      map.values[i] = map.values[i] > 0 ? max_finite + 1.0 : min_finite - 1.0;
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Preset: gain map over (tau_r, T) for an m-pulse train matched to omega =
// m*pi/T, coherence m^p * t2_star, against Ramsey shots with overhead tau_o.
struct Fig2aOptions {
  AxisSpec tau_r{"tau_r", 0.05, 5.0, 100, false};
  AxisSpec total_time{"total_time", 1.2, 120.0, 100, false};
  long long m = 8;
  double tau_o = 0.5;
  double xi = 1.0;
  NoiseModel noise = {1.0, 1.0, std::nullopt, std::nullopt};
  Param param = Param::frequency;
  int phase_grid = default_phase_grid;
  unsigned threads = 1;
};

struct GainFigureResult {
  Table table;
  GainMap exact;
  std::vector<double> approx;  // same layout as exact.values
};

namespace detail {

struct GainCell {
  double log_gain_exact = 0.0;
  double log_gain_approx = 0.0;
  long long n_shots = 0;
  bool defined = true;  // false when not even one Ramsey shot fits
};

inline GainCell gain_cell(double tau_r, double tau_o, const DDProtocol& dd,
                          double omega, double xi, const NoiseModel& noise,
                          Param param, int phase_grid) {
  GainCell cell;
  const SignalParams signal{omega, xi, 0.0};
  cell.n_shots = matched_shot_count(tau_r, tau_o, dd.total_time());
  cell.log_gain_approx = gain_approx(tau_r, tau_o, dd.total_time(),
                                     coherence_time(noise, dd.m), noise.t2_star, param);
  if (cell.n_shots < 1) {
    cell.defined = false;
    cell.log_gain_exact = -std::numeric_limits<double>::infinity();
    return cell;
  }
  const auto ramsey = make_ramsey_protocol(tau_r, tau_o, cell.n_shots);
  const auto g = gain_exact(ramsey, dd, signal, noise, param, phase_grid);
  cell.log_gain_exact = g.value;
  return cell;
}

inline void gain_figure_table(GainFigureResult& result, const char* preset,
                              double tau_o, long long m, double xi,
                              const NoiseModel& noise, Param param,
                              const std::function<DDProtocol(double)>& dd_of_t,
                              const std::function<double(const DDProtocol&)>& omega_of_dd,
                              const AxisSpec& x_axis, const AxisSpec& y_axis,
                              double ramsey_tau_r_fixed, bool x_is_tau_r,
                              int phase_grid, unsigned threads) {
  const auto xs = axis_values(x_axis);
  const auto ts = axis_values(y_axis);
  const std::size_t nx = xs.size();
  const std::size_t ny = ts.size();

  std::vector<GainCell> cells(nx * ny);
  parallel_for(nx * ny, threads, [&](std::size_t idx) {
    const std::size_t ix = idx % nx;
    const std::size_t iy = idx / nx;
    const double t = ts[iy];
    const auto dd = dd_of_t(t);
    const double omega = omega_of_dd(dd);
    const double tau_r = x_is_tau_r ? xs[ix] : ramsey_tau_r_fixed;
    const double overhead = x_is_tau_r ? tau_o : xs[ix];
    cells[idx] = gain_cell(tau_r, overhead, dd, omega, xi, noise, param, phase_grid);
  });

  result.exact.x = {x_axis.key, "t2_star", xs};
  result.exact.y = {y_axis.key, "t2_star", ts};
  result.exact.values.resize(nx * ny);
  result.approx.resize(nx * ny);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    result.exact.values[i] = cells[i].log_gain_exact;
    result.approx[i] = cells[i].log_gain_approx;
  }
  detail::clip_gain_map(result.exact);
  result.exact.metadata = {{"preset", preset},
                           {"param", std::to_string(static_cast<int>(param))},
                           {"m_pulses", std::to_string(m)},
                           {"xi", format_double_17(xi)},
                           {"t2_star", format_double_17(noise.t2_star)}};

  Table& table = result.table;
  table.columns = {x_axis.key,      "total_time",       "n_shots",
                   "m_pulses",      "tau",              "omega",
                   "xi",            "tau_r",            "tau_o",
                   "t2_star",       "t2_dd",            "param",
                   "log_gain",      "log_gain_clipped", "log_gain_infinite",
                   "log_gain_approx"};
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const std::size_t ix = idx % nx;
    const std::size_t iy = idx / nx;
    const auto dd = dd_of_t(ts[iy]);
    const double tau_r = x_is_tau_r ? xs[ix] : ramsey_tau_r_fixed;
    const double overhead = x_is_tau_r ? tau_o : xs[ix];
    auto& row = table.add_row();
    row.push_back(Cell{xs[ix]});
    row.push_back(Cell{ts[iy]});
    row.push_back(Cell{cells[idx].n_shots});
    row.push_back(Cell{m});
    row.push_back(Cell{dd.tau});
    row.push_back(Cell{omega_of_dd(dd)});
    row.push_back(Cell{xi});
    row.push_back(Cell{tau_r});
    row.push_back(Cell{overhead});
    row.push_back(Cell{noise.t2_star});
    row.push_back(Cell{coherence_time(noise, dd.m)});
    row.push_back(Cell{static_cast<long long>(static_cast<int>(param))});
    row.push_back(numeric_cell(result.exact.raw[idx]));
    row.push_back(Cell{result.exact.values[idx]});
    row.push_back(Cell{result.exact.infinite[idx] != 0});
    row.push_back(numeric_cell(result.approx[idx]));
  }
}

}  // namespace detail

inline GainFigureResult figure_fig2a(const Fig2aOptions& opt) {
  GainFigureResult result;
  const long long m = opt.m;
  detail::gain_figure_table(
      result, "fig2a", opt.tau_o, m, opt.xi, opt.noise, opt.param,
      [m](double t) { return make_dd_protocol(m, t / static_cast<double>(m)); },
      [](const DDProtocol& dd) { return dd.omega_dd(); }, opt.tau_r, opt.total_time,
      0.0, true, opt.phase_grid, opt.threads);
  return result;
}

// ---------------------------------------------------------------------------
// Preset: gain map over (tau_o, T) for a single-echo sequence of duration T
// probed at its passband omega = 2*pi/T, with a calibrated echo coherence.
struct Fig2bOptions {
  AxisSpec tau_o{"tau_o", 0.05, 1.5, 80, false};
  AxisSpec total_time{"total_time", 2.0, 40.0, 80, false};
  double tau_r = 0.5;
  double xi = 1.0;
  NoiseModel noise = {1.0, 1.0, 30.0, std::nullopt};
  Param param = Param::frequency;
  int phase_grid = default_phase_grid;
  unsigned threads = 1;
};

inline GainFigureResult figure_fig2b(const Fig2bOptions& opt) {
  GainFigureResult result;
  detail::gain_figure_table(
      result, "fig2b", 0.0, 1, opt.xi, opt.noise, opt.param,
      [](double t) { return make_dd_protocol(1, t); },
      [](const DDProtocol& dd) { return 2.0 * pi / dd.total_time(); }, opt.tau_o,
      opt.total_time, opt.tau_r, false, opt.phase_grid, opt.threads);
  return result;
}

// ---------------------------------------------------------------------------
// Preset: frequency-estimation information against the resolvability
// threshold 4/omega^2 over a frequency sweep, Ramsey shots vs a matched
// pulse train with m = max(1, floor(T*omega/pi)).
struct Fig3aOptions {
  AxisSpec omega{"omega", 1e-3, 3.0, 121, true};
  double total_time = 1000.0;
  double tau_r = 0.5;
  double tau_o = 0.5;
  double phi_a = 0.0;
  double phi_b = 0.5 * pi;
  NoiseModel noise = {1.0, 1.0, std::nullopt, std::nullopt};
  int phase_grid = default_phase_grid;
  unsigned threads = 1;
};

// Largest pulse count fitting the matching condition, with the same
// one-part-in-1e6 slack as matched_shot_count so grid arithmetic like
// floor(11*pi/pi) does not drop a pulse.
inline long long matched_pulse_count(double total_time, double omega) {
  const double q = total_time * omega / pi;
  const long long m = static_cast<long long>(std::floor(q * (1.0 + 1e-6)));
  return std::max<long long>(1, m);
}

inline Table figure_fig3a(const Fig3aOptions& opt) {
  const auto omegas = axis_values(opt.omega);
  const double xi_nr = 1.0 / opt.tau_r;
  const auto ramsey = make_ramsey_protocol(
      opt.tau_r, opt.tau_o,
      matched_shot_count(opt.tau_r, opt.tau_o, opt.total_time));

  struct Row {
    double i1_phi_a, i1_phi_b, i1_avg, i1_dd;
    long long m;
    double tau, xi_dd, t2_dd;
  };
  std::vector<Row> rows(omegas.size());
  parallel_for(omegas.size(), opt.threads, [&](std::size_t i) {
    const double omega = omegas[i];
    Row r{};
    r.i1_phi_a = fisher_correlated_ramsey(ramsey, {omega, xi_nr, opt.phi_a}, opt.noise,
                                          Param::frequency, false).value;
    r.i1_phi_b = fisher_correlated_ramsey(ramsey, {omega, xi_nr, opt.phi_b}, opt.noise,
                                          Param::frequency, false).value;
    r.i1_avg = fisher_correlated_ramsey(ramsey, {omega, xi_nr, 0.0}, opt.noise,
                                        Param::frequency, true, opt.phase_grid).value;
    r.m = matched_pulse_count(opt.total_time, omega);
    r.tau = opt.total_time / static_cast<double>(r.m);
    r.xi_dd = 1.0 / r.tau;
    r.t2_dd = coherence_time(opt.noise, r.m);
    r.i1_dd = fisher_dd(make_dd_protocol(r.m, r.tau), {omega, r.xi_dd, 0.0}, opt.noise,
                        Param::frequency, true, opt.phase_grid).value;
    rows[i] = r;
  });

  Table table;
  table.columns = {"omega",      "total_time", "n_shots",   "tau_r",
                   "tau_o",      "xi_nr",      "phi_a",     "phi_b",
                   "i1_nr_phi_a","i1_nr_phi_b","i1_nr_avg", "m_pulses",
                   "tau",        "xi_dd",      "t2_dd",     "i1_dd_avg",
                   "rayleigh_threshold"};
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    auto& row = table.add_row();
    row.push_back(Cell{omegas[i]});
    row.push_back(Cell{opt.total_time});
    row.push_back(Cell{ramsey.n});
    row.push_back(Cell{opt.tau_r});
    row.push_back(Cell{opt.tau_o});
    row.push_back(Cell{xi_nr});
    row.push_back(Cell{opt.phi_a});
    row.push_back(Cell{opt.phi_b});
    row.push_back(Cell{rows[i].i1_phi_a});
    row.push_back(Cell{rows[i].i1_phi_b});
    row.push_back(Cell{rows[i].i1_avg});
    row.push_back(Cell{rows[i].m});
    row.push_back(Cell{rows[i].tau});
    row.push_back(Cell{rows[i].xi_dd});
    row.push_back(Cell{rows[i].t2_dd});
    row.push_back(Cell{rows[i].i1_dd});
    row.push_back(Cell{4.0 / (omegas[i] * omegas[i])});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Preset: phase-estimation information vs the 10/pi threshold for two low
// frequencies and two total times, resolved over a phi grid plus its mean.
struct Fig3bOptions {
  double omega_a = 0.05 * pi;
  double omega_b = 0.2 * pi;
  double total_time_a = 100.0;
  double total_time_b = 1000.0;
  int phi_steps = 64;
  double tau_r = 0.5;
  double tau_o = 0.5;
  NoiseModel noise = {1.0, 1.0, std::nullopt, std::nullopt};
  int phase_grid = default_phase_grid;
  unsigned threads = 1;
};

inline Table figure_fig3b(const Fig3bOptions& opt) {
  const double xi = 1.0 / opt.tau_r;
  Table table;
  table.columns = {"omega", "total_time", "n_shots", "tau_r",     "tau_o", "xi",
                   "phi",   "i3_nr",      "i3_nr_avg", "phase_threshold"};
  const double threshold = 10.0 / pi;
  for (const double omega : {opt.omega_a, opt.omega_b}) {
    for (const double total : {opt.total_time_a, opt.total_time_b}) {
      const auto ramsey = make_ramsey_protocol(
          opt.tau_r, opt.tau_o, matched_shot_count(opt.tau_r, opt.tau_o, total));
      const double avg = fisher_correlated_ramsey(ramsey, {omega, xi, 0.0}, opt.noise,
                                                  Param::phase, true, opt.phase_grid)
                             .value;
      for (int k = 0; k < opt.phi_steps; ++k) {
        const double phi = 2.0 * pi * k / opt.phi_steps;
        const double i3 = fisher_correlated_ramsey(ramsey, {omega, xi, phi}, opt.noise,
                                                   Param::phase, false).value;
        auto& row = table.add_row();
        row.push_back(Cell{omega});
        row.push_back(Cell{total});
        row.push_back(Cell{ramsey.n});
        row.push_back(Cell{opt.tau_r});
        row.push_back(Cell{opt.tau_o});
        row.push_back(Cell{xi});
        row.push_back(Cell{phi});
        row.push_back(Cell{i3});
        row.push_back(Cell{avg});
        row.push_back(Cell{threshold});
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Preset: sensitivity sqrt(I1/T) vs total time at omega = pi/t2_star for
// Ramsey and for pulse trains under two coherence scaling exponents.
struct Fig3cOptions {
  double t_min = 2.0;
  double t_max = 100.0;
  double omega = pi;
  double tau_r = 0.5;
  double tau_o = 0.5;
  double dd_exponent_a = 1.0;
  double dd_exponent_b = 0.8;
  double t2_star = 1.0;
  int phase_grid = default_phase_grid;
  unsigned threads = 1;
};

inline Table figure_fig3c(const Fig3cOptions& opt) {
  std::vector<double> times;
  for (double t = opt.t_min; t <= opt.t_max + 0.5; t += 1.0) times.push_back(t);

  const double xi_nr = 1.0 / opt.tau_r;
  const NoiseModel noise_a = {opt.t2_star, opt.dd_exponent_a, std::nullopt, std::nullopt};
  const NoiseModel noise_b = {opt.t2_star, opt.dd_exponent_b, std::nullopt, std::nullopt};

  struct Row {
    double eta_nr, eta_dd_a, eta_dd_b;
    long long m;
    double tau;
  };
  std::vector<Row> rows(times.size());
  parallel_for(times.size(), opt.threads, [&](std::size_t i) {
    const double total = times[i];
    Row r{};
    const auto ramsey = make_ramsey_protocol(
        opt.tau_r, opt.tau_o, matched_shot_count(opt.tau_r, opt.tau_o, total));
    const double i_nr = fisher_correlated_ramsey(ramsey, {opt.omega, xi_nr, 0.0},
                                                 noise_a, Param::frequency, true,
                                                 opt.phase_grid).value;
    r.eta_nr = sensitivity(i_nr, total);
    r.m = matched_pulse_count(total, opt.omega);
    r.tau = total / static_cast<double>(r.m);
    const auto dd = make_dd_protocol(r.m, r.tau);
    const SignalParams sig_dd{opt.omega, 1.0 / r.tau, 0.0};
    r.eta_dd_a = sensitivity(
        fisher_dd(dd, sig_dd, noise_a, Param::frequency, true, opt.phase_grid).value,
        total);
    r.eta_dd_b = sensitivity(
        fisher_dd(dd, sig_dd, noise_b, Param::frequency, true, opt.phase_grid).value,
        total);
    rows[i] = r;
  });

  Table table;
  table.columns = {"total_time", "omega",    "tau_r",      "tau_o",
                   "xi_nr",      "m_pulses", "tau",        "eta_ramsey",
                   "eta_dd_p1",  "eta_dd_p08"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto& row = table.add_row();
    row.push_back(Cell{times[i]});
    row.push_back(Cell{opt.omega});
    row.push_back(Cell{opt.tau_r});
    row.push_back(Cell{opt.tau_o});
    row.push_back(Cell{xi_nr});
    row.push_back(Cell{rows[i].m});
    row.push_back(Cell{rows[i].tau});
    row.push_back(Cell{rows[i].eta_nr});
    row.push_back(Cell{rows[i].eta_dd_a});
    row.push_back(Cell{rows[i].eta_dd_b});
  }
  return table;
}

}  // namespace corram
