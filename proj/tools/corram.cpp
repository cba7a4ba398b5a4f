// Command-line front end: single-point evaluations, 1-D/2-D sweeps, figure
// presets, trace simulation and maximum-likelihood estimation campaigns.
//
// Exit codes: 0 success, 1 validation/usage error, 2 runtime error (I/O, or a
// numerical sentinel encountered under --strict).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corram/corram.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace corram;

namespace {

// ---------------------------------------------------------------------------
// Run configuration: command, flat key-value parameters, output settings.
// `threads` is an execution detail and is deliberately not part of the
// serialized config so outputs stay byte-identical across thread counts.

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> params;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  bool strict = false;

  bool operator==(const RunConfig&) const = default;
};

json config_to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = "1";
  j["command"] = cfg.command;
  j["parameters"] = cfg.params;
  j["out"] = cfg.out;
  j["format"] = cfg.format;
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["strict"] = cfg.strict;
  return j;
}

RunConfig config_from_json(const json& j, const std::string& command) {
  const json& c = j.contains("config") ? j["config"] : j;
  RunConfig cfg;
  cfg.command = c.value("command", command);
  if (c.contains("parameters")) {
    for (auto it = c["parameters"].begin(); it != c["parameters"].end(); ++it) {
      cfg.params[it.key()] = it.value().get<std::string>();
    }
  }
  cfg.out = c.value("out", "");
  cfg.format = c.value("format", "csv");
  if (c.contains("seed") && !c["seed"].is_null()) cfg.seed = c["seed"].get<std::uint64_t>();
  cfg.strict = c.value("strict", false);
  return cfg;
}

// Flat key = value text, '#' comments.  JSON results files are also accepted;
// their embedded config block is reused.
void load_config_file(const std::string& path, const std::string& command,
                      RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const RunConfig loaded = config_from_json(json::parse(text), command);
    for (const auto& [k, v] : loaded.params) cfg.params[k] = v;
    if (!loaded.out.empty()) cfg.out = loaded.out;
    cfg.format = loaded.format;
    cfg.seed = loaded.seed;
    cfg.strict = loaded.strict;
    return;
  }
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("config line " + std::to_string(lineno) +
                             " is not key = value: " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    trim(key);
    trim(value);
    if (key == "out") cfg.out = value;
    else if (key == "format") cfg.format = value;
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "strict") cfg.strict = (value == "true" || value == "1");
    else if (key == "threads") continue;  // execution detail, flag-only
    else cfg.params[key] = value;
  }
}

// ---------------------------------------------------------------------------
// Typed access to the key-value parameters with unknown-key rejection.

class ParamReader {
public:
  explicit ParamReader(const std::map<std::string, std::string>& params)
      : params_(params) {}

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    auto it = params_.find(key);
    if (it == params_.end()) return std::nullopt;
    return it->second;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    auto v = get(key);
    return v ? *v : fallback;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw validation_error("missing required parameter " + key);
    return *v;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw validation_error("missing required parameter " + key);
    }
    try {
      std::size_t pos = 0;
      const double x = std::stod(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("");
      return x;
    } catch (const std::exception&) {
      throw validation_error("parameter " + key + " is not a number: " + *v);
    }
  }

  std::optional<double> number_opt(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return number(key);
  }

  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
    auto v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw validation_error("missing required parameter " + key);
    }
    try {
      return std::stoll(*v);
    } catch (const std::exception&) {
      throw validation_error("parameter " + key + " is not an integer: " + *v);
    }
  }

  bool flag(const std::string& key, bool fallback) {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true" || *v == "yes") return true;
    if (*v == "0" || *v == "false" || *v == "no") return false;
    throw validation_error("parameter " + key + " is not a boolean: " + *v);
  }

  // Call after all reads: any parameter never consumed is unknown.
  void reject_unknown() const {
    std::vector<std::string> unknown;
    for (const auto& [k, v] : params_) {
      if (!used_.count(k)) unknown.push_back(k);
    }
    if (!unknown.empty()) {
      std::string msg = "unknown parameter(s):";
      for (const auto& k : unknown) msg += " " + k;
      throw validation_error(msg);
    }
  }

private:
  const std::map<std::string, std::string>& params_;
  std::set<std::string> used_;
};

Param parse_param(const std::string& v) {
  if (v == "1" || v == "omega" || v == "frequency") return Param::frequency;
  if (v == "2" || v == "xi" || v == "amplitude") return Param::amplitude;
  if (v == "3" || v == "phi" || v == "phase") return Param::phase;
  throw validation_error("param must be 1|2|3 or frequency|amplitude|phase");
}

NoiseModel read_noise(ParamReader& r) {
  return make_noise(r.number("t2_star", 1.0), r.number("dd_exponent", 1.0),
                    r.number_opt("t2_base"), r.number_opt("t1_cap"));
}

// ---------------------------------------------------------------------------
// Output plumbing.

struct CommandResult {
  Table table;
  bool sentinel = false;  // an infinite log-gain was emitted
  std::string raw_text;   // when set, written verbatim instead of the table
};

std::string default_out_path(const RunConfig& cfg, const std::string& suffix) {
  std::string name = cfg.command;
  if (!suffix.empty()) name += "_" + suffix;
  name += cfg.command == "simulate" ? ".trace" : (cfg.format == "json" ? ".json" : ".csv");
  const char* dir = std::getenv("CORRAM_OUT_DIR");
  if (dir && *dir) return (fs::path(dir) / name).string();
  return name;
}

void echo_config(Table& table, const RunConfig& cfg) {
  table.metadata.emplace_back("schema_version", "1");
  table.metadata.emplace_back("command", cfg.command);
  for (const auto& [k, v] : cfg.params) table.metadata.emplace_back("config." + k, v);
  if (cfg.seed) table.metadata.emplace_back("seed", std::to_string(*cfg.seed));
  table.metadata.emplace_back("format", cfg.format);
  table.metadata.emplace_back("strict", cfg.strict ? "true" : "false");
}

void write_output(const RunConfig& cfg, const CommandResult& result) {
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw io_error("cannot open output path " + cfg.out);
  if (!result.raw_text.empty()) {
    out << result.raw_text;
  } else if (cfg.format == "json") {
    json j;
    j["schema_version"] = "1";
    j["config"] = config_to_json(cfg);
    j["columns"] = result.table.columns;
    json meta = json::object();
    for (const auto& [k, v] : result.table.metadata) meta[k] = v;
    j["metadata"] = meta;
    json rows = json::array();
    for (const auto& row : result.table.rows) {
      json jr = json::array();
      for (const auto& cell : row) jr.push_back(cell_to_json(cell));
      rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << "\n";
  } else {
    write_csv(out, result.table);
  }
  if (!out.good()) throw io_error("write failed for " + cfg.out);
}

// ---------------------------------------------------------------------------
// phase: single-point closed-form evaluation, optional oracle cross-check.

CommandResult cmd_phase(const RunConfig& cfg) {
  ParamReader r(cfg.params);
  const std::string protocol = r.str("protocol", "ramsey");
  const double xi = r.number("xi", 1.0);
  const double phi = r.number("phi", 0.0);
  const bool with_oracle = r.flag("with_oracle", false);

  CommandResult result;
  Table& t = result.table;
  if (protocol == "ramsey") {
    const double omega = r.number("omega");
    const double tau_r = r.number("tau_r");
    const double t_start = r.number("t_start", 0.0);
    r.reject_unknown();
    const SignalParams s = make_signal(omega, xi, phi);
    const auto rp = make_ramsey_protocol(tau_r, 0.0, 1);
    t.columns = {"protocol", "omega", "xi", "phi", "tau_r", "t_start", "phase"};
    auto& row = t.add_row();
    row = {Cell{std::string("ramsey")}, Cell{omega}, Cell{xi}, Cell{s.phi},
           Cell{tau_r}, Cell{t_start}, Cell{ramsey_phase(s, tau_r, t_start)}};
    if (with_oracle) {
      t.columns.push_back("phase_oracle");
      SignalParams shifted = s;
      shifted.phi = s.phi + s.omega * t_start;
      row.push_back(Cell{phase_quadrature_oracle(shifted, rp)});
    }
  } else if (protocol == "dd" || protocol == "dd_detuned") {
    const long long m = r.integer("m");
    const double tau = r.number("tau");
    const bool detuned = protocol == "dd_detuned";
    const bool with_detuned = r.flag("with_detuned", false);
    double omega = 0.0, delta = 0.0;
    if (detuned) {
      delta = r.number("delta");
      omega = pi / tau + delta;
    } else {
      omega = r.number("omega");
      delta = omega - pi / tau;
    }
    r.reject_unknown();
    const SignalParams s = make_signal(omega, xi, phi);
    const auto dp = make_dd_protocol(m, tau);
    t.columns = {"protocol", "omega", "xi", "phi", "m", "tau", "delta", "phase"};
    auto& row = t.add_row();
    const double value = detuned ? dd_phase_detuned(s, dp, delta) : dd_phase(s, dp);
    row = {Cell{protocol}, Cell{omega}, Cell{xi}, Cell{s.phi}, Cell{m},
           Cell{tau}, Cell{delta}, Cell{value}};
    if (with_oracle) {
      t.columns.push_back("phase_oracle");
      row.push_back(Cell{phase_quadrature_oracle(s, dp)});
    }
    if (with_detuned && !detuned) {
      t.columns.push_back("phase_detuned");
      row.push_back(Cell{dd_phase_detuned(s, dp, delta)});
    }
  } else {
    throw validation_error("protocol must be ramsey, dd, or dd_detuned");
  }
  return result;
}

// ---------------------------------------------------------------------------
// fisher: exact or approximate Fisher information, with sensitivity.

CommandResult cmd_fisher(const RunConfig& cfg) {
  ParamReader r(cfg.params);
  const std::string protocol = r.str("protocol", "ramsey");
  const std::string kind = r.str("kind", "exact");
  const Param param = parse_param(r.require("param"));
  const bool phase_average = r.flag("phase_average", false);
  const int phase_grid = static_cast<int>(r.integer("phase_grid", default_phase_grid));
  const bool with_threshold = r.flag("with_threshold", false);
  const SignalParams s = make_signal(r.number("omega"), r.number("xi", 1.0),
                                     r.number("phi", 0.0));
  const NoiseModel noise = read_noise(r);

  double fisher_value = 0.0;
  double total_time = 0.0;
  CommandResult result;
  Table& t = result.table;
  t.columns = {"protocol", "kind",  "param",    "phase_average", "omega",
               "xi",       "phi",   "t2_star",  "dd_exponent",   "total_time",
               "fisher",   "sensitivity"};
  auto& row = t.add_row();
  row.push_back(Cell{protocol});
  row.push_back(Cell{kind});
  row.push_back(Cell{static_cast<long long>(static_cast<int>(param))});

  if (protocol == "ramsey") {
    const auto rp = make_ramsey_protocol(r.number("tau_r"), r.number("tau_o", 0.0),
                                         r.integer("n", 1));
    r.reject_unknown();
    total_time = rp.total_time();
    if (kind == "exact") {
      fisher_value =
          fisher_correlated_ramsey(rp, s, noise, param, phase_average, phase_grid).value;
    } else if (kind == "approx") {
      fisher_value = fisher_approx_nr(rp, s, noise, param).value;
    } else {
      throw validation_error("kind must be exact or approx");
    }
    t.columns.insert(t.columns.end(), {"tau_r", "tau_o", "n"});
  } else if (protocol == "dd") {
    const auto dp = make_dd_protocol(r.integer("m"), r.number("tau"));
    r.reject_unknown();
    total_time = dp.total_time();
    if (kind == "exact") {
      fisher_value = fisher_dd(dp, s, noise, param, phase_average, phase_grid).value;
    } else if (kind == "approx") {
      fisher_value = fisher_approx_dd(dp, s, noise, param).value;
    } else {
      throw validation_error("kind must be exact or approx");
    }
    t.columns.insert(t.columns.end(), {"m", "tau", "t2_dd"});
  } else {
    throw validation_error("protocol must be ramsey or dd");
  }

  row.push_back(Cell{phase_average});
  row.push_back(Cell{s.omega});
  row.push_back(Cell{s.xi});
  row.push_back(Cell{s.phi});
  row.push_back(Cell{noise.t2_star});
  row.push_back(Cell{noise.dd_exponent});
  row.push_back(Cell{total_time});
  row.push_back(Cell{fisher_value});
  row.push_back(Cell{sensitivity(fisher_value, total_time)});
  if (protocol == "ramsey") {
    ParamReader echo(cfg.params);
    row.push_back(Cell{echo.number("tau_r")});
    row.push_back(Cell{echo.number("tau_o", 0.0)});
    row.push_back(Cell{echo.integer("n", 1)});
  } else {
    ParamReader echo(cfg.params);
    row.push_back(Cell{echo.integer("m")});
    row.push_back(Cell{echo.number("tau")});
    row.push_back(Cell{coherence_time(noise, echo.integer("m"))});
  }
  if (with_threshold) {
    t.columns.push_back("threshold");
    row.push_back(Cell{detection_threshold(param, s.omega)});
  }
  return result;
}

// ---------------------------------------------------------------------------
// gain: exact or approximate protocol gain at a single setting.

CommandResult cmd_gain(const RunConfig& cfg) {
  ParamReader r(cfg.params);
  const std::string kind = r.str("kind", "exact");
  const Param param = parse_param(r.str("param", "1"));
  const double tau_r = r.number("tau_r");
  const double tau_o = r.number("tau_o");
  const long long m = r.integer("m");
  const double tau = r.number("tau");
  const double xi = r.number("xi", 1.0);
  const int phase_grid = static_cast<int>(r.integer("phase_grid", default_phase_grid));
  const NoiseModel noise = read_noise(r);
  const auto dd = make_dd_protocol(m, tau);
  const double omega = r.number("omega", dd.omega_dd());
  r.reject_unknown();

  CommandResult result;
  Table& t = result.table;
  t.columns = {"kind",  "param",   "tau_r",  "tau_o",   "m",
               "tau",   "omega",   "xi",     "t2_star", "t2_dd",
               "total_time", "n_shots", "log_gain", "log_gain_infinite"};
  auto& row = t.add_row();
  row.push_back(Cell{kind});
  row.push_back(Cell{static_cast<long long>(static_cast<int>(param))});
  row.push_back(Cell{tau_r});
  row.push_back(Cell{tau_o});
  row.push_back(Cell{m});
  row.push_back(Cell{tau});
  row.push_back(Cell{omega});
  row.push_back(Cell{xi});
  row.push_back(Cell{noise.t2_star});
  row.push_back(Cell{coherence_time(noise, m)});
  row.push_back(Cell{dd.total_time()});

  if (kind == "exact") {
    const auto ramsey = make_matched_ramsey(tau_r, tau_o, dd);
    const auto g = gain_exact(ramsey, dd, make_signal(omega, xi, 0.0), noise, param,
                              phase_grid);
    row.push_back(Cell{ramsey.n});
    row.push_back(numeric_cell(g.value));
    row.push_back(Cell{g.infinite});
    result.sentinel = g.infinite;
  } else if (kind == "approx") {
    const double g = gain_approx(tau_r, tau_o, dd.total_time(),
                                 coherence_time(noise, m), noise.t2_star, param);
    row.push_back(Cell{matched_shot_count(tau_r, tau_o, dd.total_time())});
    row.push_back(numeric_cell(g));
    row.push_back(Cell{!std::isfinite(g)});
    result.sentinel = !std::isfinite(g);
  } else {
    throw validation_error("kind must be exact or approx");
  }
  return result;
}

// ---------------------------------------------------------------------------
// sweep: evaluate a named quantity over a 1-D or 2-D grid.

struct TargetSpec {
  std::vector<std::string> keys;                  // numeric keys with meaning
  std::map<std::string, double> defaults;         // optional keys -> default
  std::vector<std::string> output_columns;
};

const std::map<std::string, TargetSpec>& target_specs() {
  static const std::map<std::string, TargetSpec> specs = {
      {"ramsey_phase",
       {{"omega", "xi", "phi", "tau_r", "t_start"},
        {{"xi", 1.0}, {"phi", 0.0}, {"t_start", 0.0}},
        {"phase"}}},
      {"dd_phase",
       {{"omega", "xi", "phi", "m", "tau"},
        {{"xi", 1.0}, {"phi", 0.0}},
        {"phase"}}},
      {"dd_phase_detuned",
       {{"delta", "xi", "phi", "m", "tau"},
        {{"xi", 1.0}, {"phi", 0.0}},
        {"phase"}}},
      {"filter_function",
       {{"omega", "xi", "tau_r"}, {{"xi", 1.0}}, {"filter_function"}}},
      {"fisher_ramsey",
       {{"omega", "xi", "phi", "tau_r", "tau_o", "n", "t2_star", "dd_exponent",
         "t2_base", "t1_cap", "param", "phase_average", "phase_grid"},
        {{"xi", 1.0}, {"phi", 0.0}, {"tau_o", 0.0}, {"t2_star", 1.0},
         {"dd_exponent", 1.0}, {"phase_average", 0.0},
         {"phase_grid", double(default_phase_grid)}},
        {"fisher", "sensitivity"}}},
      {"fisher_dd",
       {{"omega", "xi", "phi", "m", "tau", "t2_star", "dd_exponent", "t2_base",
         "t1_cap", "param", "phase_average", "phase_grid"},
        {{"xi", 1.0}, {"phi", 0.0}, {"t2_star", 1.0}, {"dd_exponent", 1.0},
         {"phase_average", 0.0}, {"phase_grid", double(default_phase_grid)}},
        {"fisher", "sensitivity"}}},
      {"fisher_approx_nr",
       {{"omega", "xi", "tau_r", "tau_o", "n", "t2_star", "param"},
        {{"xi", 1.0}, {"tau_o", 0.0}, {"t2_star", 1.0}},
        {"fisher"}}},
      {"fisher_approx_dd",
       {{"xi", "m", "tau", "t2_star", "dd_exponent", "t2_base", "t1_cap", "param"},
        {{"xi", 1.0}, {"t2_star", 1.0}, {"dd_exponent", 1.0}},
        {"fisher"}}},
      {"gain_exact",
       {{"omega", "xi", "tau_r", "tau_o", "m", "tau", "t2_star", "dd_exponent",
         "t2_base", "t1_cap", "param", "phase_grid"},
        {{"xi", 1.0}, {"t2_star", 1.0}, {"dd_exponent", 1.0}, {"param", 1.0},
         {"phase_grid", double(default_phase_grid)}},
        {"n_shots", "log_gain", "log_gain_infinite"}}},
      // xi is accepted so amplitude sweeps can demonstrate that the shared
      // amplitude cancels out of the approximate gain
      {"gain_approx",
       {{"xi", "tau_r", "tau_o", "m", "tau", "t2_star", "dd_exponent", "t2_base",
         "t1_cap", "param"},
        {{"xi", 1.0}, {"t2_star", 1.0}, {"dd_exponent", 1.0}, {"param", 1.0}},
        {"log_gain"}}},
  };
  return specs;
}

NoiseModel noise_from(const std::map<std::string, double>& p) {
  std::optional<double> t2_base, t1_cap;
  if (p.count("t2_base")) t2_base = p.at("t2_base");
  if (p.count("t1_cap")) t1_cap = p.at("t1_cap");
  return make_noise(p.at("t2_star"), p.at("dd_exponent"), t2_base, t1_cap);
}

struct TargetValue {
  std::vector<Cell> outputs;
  bool sentinel = false;
};

TargetValue evaluate_target(const std::string& target,
                            const std::map<std::string, double>& p,
                            bool validate_only) {
  TargetValue out;
  const auto grid = [&] { return static_cast<int>(p.at("phase_grid")); };
  if (target == "ramsey_phase") {
    const auto s = make_signal(p.at("omega"), p.at("xi"), p.at("phi"));
    make_ramsey_protocol(p.at("tau_r"), 0.0, 1);
    if (validate_only) return out;
    out.outputs = {Cell{ramsey_phase(s, p.at("tau_r"), p.at("t_start"))}};
  } else if (target == "dd_phase") {
    const auto s = make_signal(p.at("omega"), p.at("xi"), p.at("phi"));
    const auto dd = make_dd_protocol(llround(p.at("m")), p.at("tau"));
    if (validate_only) return out;
    out.outputs = {Cell{dd_phase(s, dd)}};
  } else if (target == "dd_phase_detuned") {
    const auto dd = make_dd_protocol(llround(p.at("m")), p.at("tau"));
    const double omega = pi / p.at("tau") + p.at("delta");
    const auto s = make_signal(omega, p.at("xi"), p.at("phi"));
    if (validate_only) return out;
    out.outputs = {Cell{dd_phase_detuned(s, dd, p.at("delta"))}};
  } else if (target == "filter_function") {
    make_ramsey_protocol(p.at("tau_r"), 0.0, 1);
    if (validate_only) return out;
    out.outputs = {Cell{ramsey_filter_function(p.at("omega"), p.at("xi"), p.at("tau_r"))}};
  } else if (target == "fisher_ramsey") {
    const auto s = make_signal(p.at("omega"), p.at("xi"), p.at("phi"));
    const auto rp = make_ramsey_protocol(p.at("tau_r"), p.at("tau_o"), llround(p.at("n")));
    const auto noise = noise_from(p);
    const Param param = parse_param(std::to_string(llround(p.at("param"))));
    if (validate_only) return out;
    const double v = fisher_correlated_ramsey(rp, s, noise, param,
                                              p.at("phase_average") != 0.0, grid()).value;
    out.outputs = {Cell{v}, Cell{sensitivity(v, rp.total_time())}};
  } else if (target == "fisher_dd") {
    const auto s = make_signal(p.at("omega"), p.at("xi"), p.at("phi"));
    const auto dd = make_dd_protocol(llround(p.at("m")), p.at("tau"));
    const auto noise = noise_from(p);
    const Param param = parse_param(std::to_string(llround(p.at("param"))));
    if (validate_only) return out;
    const double v = fisher_dd(dd, s, noise, param, p.at("phase_average") != 0.0,
                               grid()).value;
    out.outputs = {Cell{v}, Cell{sensitivity(v, dd.total_time())}};
  } else if (target == "fisher_approx_nr") {
    const auto s = make_signal(p.at("omega"), p.at("xi"), 0.0);
    const auto rp = make_ramsey_protocol(p.at("tau_r"), p.at("tau_o"), llround(p.at("n")));
    const NoiseModel noise = make_noise(p.at("t2_star"));
    const Param param = parse_param(std::to_string(llround(p.at("param"))));
    if (validate_only) return out;
    out.outputs = {Cell{fisher_approx_nr(rp, s, noise, param).value}};
  } else if (target == "fisher_approx_dd") {
    const auto s = make_signal(0.0, p.at("xi"), 0.0);
    const auto dd = make_dd_protocol(llround(p.at("m")), p.at("tau"));
    const auto noise = noise_from(p);
    const Param param = parse_param(std::to_string(llround(p.at("param"))));
    if (validate_only) return out;
    out.outputs = {Cell{fisher_approx_dd(dd, s, noise, param).value}};
  } else if (target == "gain_exact") {
    const auto dd = make_dd_protocol(llround(p.at("m")), p.at("tau"));
    const double omega = p.count("omega") ? p.at("omega") : dd.omega_dd();
    const auto s = make_signal(omega, p.at("xi"), 0.0);
    const auto noise = noise_from(p);
    const Param param = parse_param(std::to_string(llround(p.at("param"))));
    const auto ramsey = make_matched_ramsey(p.at("tau_r"), p.at("tau_o"), dd);
    if (validate_only) return out;
    const auto g = gain_exact(ramsey, dd, s, noise, param, grid());
    out.outputs = {Cell{ramsey.n}, numeric_cell(g.value), Cell{g.infinite}};
    out.sentinel = g.infinite;
  } else if (target == "gain_approx") {
    make_ramsey_protocol(p.at("tau_r"), p.at("tau_o"), 1);
    const auto dd = make_dd_protocol(llround(p.at("m")), p.at("tau"));
    const auto noise = noise_from(p);
    const Param param = parse_param(std::to_string(llround(p.at("param"))));
    if (validate_only) return out;
    const double g = gain_approx(p.at("tau_r"), p.at("tau_o"), dd.total_time(),
                                 coherence_time(noise, dd.m), noise.t2_star, param);
    out.outputs = {numeric_cell(g)};
    out.sentinel = !std::isfinite(g);
  } else {
    throw validation_error("unknown sweep target " + target);
  }
  return out;
}

CommandResult cmd_sweep(const RunConfig& cfg, unsigned threads) {
  ParamReader r(cfg.params);
  const std::string target = r.require("target");
  const auto spec_it = target_specs().find(target);
  if (spec_it == target_specs().end())
    throw validation_error("unknown sweep target " + target);
  const TargetSpec& spec = spec_it->second;

  // axes
  if (!cfg.params.count("axis1") && cfg.params.count("axis2"))
    throw validation_error("axis2 given without axis1");
  std::vector<AxisSpec> axes;
  for (const std::string prefix : {"axis1", "axis2"}) {
    auto key = r.get(prefix);
    if (!key) continue;
    AxisSpec axis;
    axis.key = *key;
    axis.min = r.number(prefix + "_min");
    axis.max = r.number(prefix + "_max");
    axis.steps = static_cast<int>(r.integer(prefix + "_steps"));
    const std::string scale = r.str(prefix + "_scale", "linear");
    if (scale == "log") axis.log_scale = true;
    else if (scale != "linear") throw validation_error(prefix + "_scale must be linear or log");
    axis.validate();
    if (std::find(spec.keys.begin(), spec.keys.end(), axis.key) == spec.keys.end())
      throw validation_error("axis key " + axis.key + " is not a parameter of " + target);
    axes.push_back(axis);
  }
  if (axes.empty()) throw validation_error("sweep requires axis1");

  // base parameters: defaults, then explicit values
  std::map<std::string, double> base = spec.defaults;
  if (!base.count("phase_grid")) base["phase_grid"] = default_phase_grid;
  for (const auto& key : spec.keys) {
    auto v = r.number_opt(key);
    if (v) base[key] = *v;
  }
  r.reject_unknown();
  for (const auto& key : spec.keys) {
    bool is_axis = false;
    for (const auto& axis : axes) is_axis |= (axis.key == key);
    if (!base.count(key) && !is_axis && key != "t2_base" && key != "t1_cap" &&
        !(target == "gain_exact" && key == "omega")) {
      throw validation_error("missing required parameter " + key);
    }
  }

  const std::size_t n1 = static_cast<std::size_t>(axes[0].steps);
  const std::size_t n2 = axes.size() > 1 ? static_cast<std::size_t>(axes[1].steps) : 1;
  const std::size_t total = n1 * n2;

  const auto cell_params = [&](std::size_t idx) {
    std::map<std::string, double> p = base;
    p[axes[0].key] = axes[0].at(static_cast<int>(idx % n1));
    if (axes.size() > 1) p[axes[1].key] = axes[1].at(static_cast<int>(idx / n1));
    return p;
  };

  // pre-flight validation over the whole grid
  std::vector<std::string> violations;
  for (std::size_t idx = 0; idx < total; ++idx) {
    try {
      evaluate_target(target, cell_params(idx), true);
    } catch (const validation_error& e) {
      if (violations.size() < 20) {
        std::ostringstream os;
        os << "cell " << idx << " (" << axes[0].key << "="
           << format_double_17(cell_params(idx).at(axes[0].key));
        if (axes.size() > 1)
          os << ", " << axes[1].key << "="
             << format_double_17(cell_params(idx).at(axes[1].key));
        os << "): " << e.what();
        violations.push_back(os.str());
      }
    }
  }
  if (!violations.empty()) {
    std::string msg = "sweep grid violates domain invariants:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw validation_error(msg);
  }

  std::vector<TargetValue> values(total);
  parallel_for(total, threads, [&](std::size_t idx) {
    values[idx] = evaluate_target(target, cell_params(idx), false);
  });

  CommandResult result;
  Table& t = result.table;
  t.columns.push_back(axes[0].key);
  if (axes.size() > 1) t.columns.push_back(axes[1].key);
  for (const auto& [k, v] : base) {
    bool is_axis = false;
    for (const auto& axis : axes) is_axis |= (axis.key == k);
    if (!is_axis) t.columns.push_back(k);
  }
  for (const auto& c : spec.output_columns) t.columns.push_back(c);

  for (std::size_t idx = 0; idx < total; ++idx) {
    auto p = cell_params(idx);
    auto& row = t.add_row();
    row.push_back(Cell{p.at(axes[0].key)});
    if (axes.size() > 1) row.push_back(Cell{p.at(axes[1].key)});
    for (const auto& [k, v] : base) {
      bool is_axis = false;
      for (const auto& axis : axes) is_axis |= (axis.key == k);
      if (!is_axis) row.push_back(Cell{v});
    }
    for (auto& cell : values[idx].outputs) row.push_back(cell);
    result.sentinel |= values[idx].sentinel;
  }
  return result;
}

// ---------------------------------------------------------------------------
// figure: named presets.

CommandResult cmd_figure(const RunConfig& cfg, unsigned threads, std::string& suffix) {
  ParamReader r(cfg.params);
  const std::string preset = r.require("preset");
  suffix = preset;
  CommandResult result;

  if (preset == "fig2a") {
    Fig2aOptions opt;
    opt.threads = threads;
    opt.tau_r.min = r.number("tau_r_min", opt.tau_r.min);
    opt.tau_r.max = r.number("tau_r_max", opt.tau_r.max);
    opt.tau_r.steps = static_cast<int>(r.integer("tau_r_steps", opt.tau_r.steps));
    opt.total_time.min = r.number("t_min", opt.total_time.min);
    opt.total_time.max = r.number("t_max", opt.total_time.max);
    opt.total_time.steps = static_cast<int>(r.integer("t_steps", opt.total_time.steps));
    opt.m = r.integer("m", opt.m);
    opt.tau_o = r.number("tau_o", opt.tau_o);
    opt.xi = r.number("xi", opt.xi);
    opt.noise = read_noise(r);
    opt.param = parse_param(r.str("param", "1"));
    opt.phase_grid = static_cast<int>(r.integer("phase_grid", opt.phase_grid));
    r.reject_unknown();
    auto fig = figure_fig2a(opt);
    result.table = std::move(fig.table);
    for (const auto flag : fig.exact.infinite) result.sentinel |= (flag != 0);
  } else if (preset == "fig2b") {
    Fig2bOptions opt;
    opt.threads = threads;
    opt.tau_o.min = r.number("tau_o_min", opt.tau_o.min);
    opt.tau_o.max = r.number("tau_o_max", opt.tau_o.max);
    opt.tau_o.steps = static_cast<int>(r.integer("tau_o_steps", opt.tau_o.steps));
    opt.total_time.min = r.number("t_min", opt.total_time.min);
    opt.total_time.max = r.number("t_max", opt.total_time.max);
    opt.total_time.steps = static_cast<int>(r.integer("t_steps", opt.total_time.steps));
    opt.tau_r = r.number("tau_r", opt.tau_r);
    opt.xi = r.number("xi", opt.xi);
    NoiseModel defaults = opt.noise;
    opt.noise = make_noise(r.number("t2_star", defaults.t2_star),
                           r.number("dd_exponent", defaults.dd_exponent),
                           r.number_opt("t2_base").value_or(*defaults.t2_base),
                           r.number_opt("t1_cap"));
    opt.param = parse_param(r.str("param", "1"));
    opt.phase_grid = static_cast<int>(r.integer("phase_grid", opt.phase_grid));
    r.reject_unknown();
    auto fig = figure_fig2b(opt);
    result.table = std::move(fig.table);
    for (const auto flag : fig.exact.infinite) result.sentinel |= (flag != 0);
  } else if (preset == "fig3a") {
    Fig3aOptions opt;
    opt.threads = threads;
    opt.omega.min = r.number("omega_min", opt.omega.min);
    opt.omega.max = r.number("omega_max", opt.omega.max);
    opt.omega.steps = static_cast<int>(r.integer("omega_steps", opt.omega.steps));
    opt.total_time = r.number("total_time", opt.total_time);
    opt.tau_r = r.number("tau_r", opt.tau_r);
    opt.tau_o = r.number("tau_o", opt.tau_o);
    opt.phi_a = r.number("phi_a", opt.phi_a);
    opt.phi_b = r.number("phi_b", opt.phi_b);
    opt.noise = read_noise(r);
    opt.phase_grid = static_cast<int>(r.integer("phase_grid", opt.phase_grid));
    r.reject_unknown();
    result.table = figure_fig3a(opt);
  } else if (preset == "fig3b") {
    Fig3bOptions opt;
    opt.threads = threads;
    opt.omega_a = r.number("omega_a", opt.omega_a);
    opt.omega_b = r.number("omega_b", opt.omega_b);
    opt.total_time_a = r.number("total_time_a", opt.total_time_a);
    opt.total_time_b = r.number("total_time_b", opt.total_time_b);
    opt.phi_steps = static_cast<int>(r.integer("phi_steps", opt.phi_steps));
    opt.tau_r = r.number("tau_r", opt.tau_r);
    opt.tau_o = r.number("tau_o", opt.tau_o);
    opt.noise = read_noise(r);
    opt.phase_grid = static_cast<int>(r.integer("phase_grid", opt.phase_grid));
    r.reject_unknown();
    result.table = figure_fig3b(opt);
  } else if (preset == "fig3c") {
    Fig3cOptions opt;
    opt.threads = threads;
    opt.t_min = r.number("t_min", opt.t_min);
    opt.t_max = r.number("t_max", opt.t_max);
    opt.omega = r.number("omega", opt.omega);
    opt.tau_r = r.number("tau_r", opt.tau_r);
    opt.tau_o = r.number("tau_o", opt.tau_o);
    opt.dd_exponent_a = r.number("dd_exponent_a", opt.dd_exponent_a);
    opt.dd_exponent_b = r.number("dd_exponent_b", opt.dd_exponent_b);
    opt.t2_star = r.number("t2_star", opt.t2_star);
    opt.phase_grid = static_cast<int>(r.integer("phase_grid", opt.phase_grid));
    r.reject_unknown();
    result.table = figure_fig3c(opt);
  } else {
    throw validation_error("preset must be one of fig2a, fig2b, fig3a, fig3b, fig3c");
  }
  return result;
}

// ---------------------------------------------------------------------------
// simulate: write one seeded time trace in the trace text format.

CommandResult cmd_simulate(const RunConfig& cfg) {
  ParamReader r(cfg.params);
  const double omega = r.number("omega");
  const double xi = r.number("xi");
  const auto rp = make_ramsey_protocol(r.number("tau_r"), r.number("tau_o", 0.0),
                                       r.integer("n"));
  const NoiseModel noise = read_noise(r);
  const std::uint64_t seed = cfg.seed.value_or(0);
  double phi = 0.0;
  const std::string phi_text = r.str("phi", "0");
  if (phi_text == "random") {
    phi = 2.0 * pi * rng::uniform01(rng::substream(seed, 0x7068u), 0);
  } else {
    phi = r.number("phi", 0.0);
  }
  r.reject_unknown();

  const auto trace = simulate_trace(make_signal(omega, xi, phi), rp, noise, seed);
  std::ostringstream out;
  write_trace(out, trace);
  CommandResult result;
  result.raw_text = out.str();
  return result;
}

// ---------------------------------------------------------------------------
// estimate: single-trace MLE, or a seeded simulate->estimate campaign with a
// CRB summary row.

SearchAxis read_axis(ParamReader& r, const std::string& name,
                     std::optional<double> fixed_default) {
  const auto lo = r.number_opt(name + "_min");
  const auto hi = r.number_opt(name + "_max");
  const auto steps = r.number_opt(name + "_steps");
  if (lo || hi || steps) {
    if (!lo || !hi) throw validation_error(name + " bounds need both min and max");
    SearchAxis axis;
    axis.lo = *lo;
    axis.hi = *hi;
    axis.steps = steps ? static_cast<int>(std::llround(*steps)) : 33;
    return axis;
  }
  const auto fixed = r.number_opt(name);
  if (fixed) return {*fixed, *fixed, 1};
  if (fixed_default) return {*fixed_default, *fixed_default, 1};
  throw validation_error("parameter " + name +
                         " needs a fixed value or min/max/steps bounds");
}

CommandResult cmd_estimate(const RunConfig& cfg, unsigned threads) {
  ParamReader r(cfg.params);
  const auto in_path = r.get("in");
  const int refine_passes = static_cast<int>(r.integer("refine_passes", 3));

  CommandResult result;
  Table& t = result.table;

  if (in_path) {
    // single-trace mode
    std::ifstream in(*in_path);
    if (!in) throw io_error("cannot open trace file " + *in_path);
    const TimeTrace trace = read_trace(in);
    std::optional<double> om, xo, po;
    if (trace.true_params) {
      om = trace.true_params->omega;
      xo = trace.true_params->xi;
      po = trace.true_params->phi;
    }
    SearchBounds bounds;
    bounds.omega = read_axis(r, "omega", om);
    bounds.xi = read_axis(r, "xi", xo);
    bounds.phi = read_axis(r, "phi", po);
    r.reject_unknown();
    const auto est = estimate_mle(trace, bounds, refine_passes);
    t.columns = {"omega_hat", "xi_hat", "phi_hat", "log_likelihood",
                 "uninformative", "n_records"};
    auto& row = t.add_row();
    row = {Cell{est.estimate.omega}, Cell{est.estimate.xi}, Cell{est.estimate.phi},
           Cell{est.log_likelihood}, Cell{est.uninformative},
           Cell{static_cast<long long>(trace.records.size())}};
    return result;
  }

  // campaign mode: trials seeded simulate -> estimate pipelines
  const long long trials = r.integer("trials");
  if (trials < 1) throw validation_error("trials must be at least 1");
  const SignalParams truth = make_signal(r.number("omega"), r.number("xi"),
                                         r.number("phi", 0.0));
  const auto rp = make_ramsey_protocol(r.number("tau_r"), r.number("tau_o", 0.0),
                                       r.integer("n"));
  const NoiseModel noise = read_noise(r);
  SearchBounds bounds;
  bounds.omega = read_axis(r, "est_omega", truth.omega);
  bounds.xi = read_axis(r, "est_xi", truth.xi);
  bounds.phi = read_axis(r, "est_phi", truth.phi);
  r.reject_unknown();
  const std::uint64_t master_seed = cfg.seed.value_or(0);

  std::vector<EstimationResult> estimates(static_cast<std::size_t>(trials));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
    seeds[i] = rng::substream(master_seed, i);
    const auto trace = simulate_trace(truth, rp, noise, seeds[i]);
    estimates[i] = estimate_mle(trace, bounds, refine_passes);
  });

  t.columns = {"row_type", "trial",  "trial_seed",   "omega_hat",
               "xi_hat",   "phi_hat", "log_likelihood", "uninformative",
               "mse",      "fisher",  "crb_ratio",     "crb_param"};
  for (long long i = 0; i < trials; ++i) {
    const auto& est = estimates[static_cast<std::size_t>(i)];
    auto& row = t.add_row();
    row = {Cell{std::string("trial")},
           Cell{i},
           Cell{static_cast<long long>(seeds[static_cast<std::size_t>(i)])},
           Cell{est.estimate.omega},
           Cell{est.estimate.xi},
           Cell{est.estimate.phi},
           Cell{est.log_likelihood},
           Cell{est.uninformative},
           Cell{std::string("")},
           Cell{std::string("")},
           Cell{std::string("")},
           Cell{std::string("")}};
  }
  const auto add_summary = [&](Param param, const char* name) {
    const double fi = fisher_correlated_ramsey(rp, truth, noise, param, false).value;
    const auto report = crb_report(estimates, truth, fi, param);
    auto& row = t.add_row();
    row = {Cell{std::string("summary")},
           Cell{trials},
           Cell{static_cast<long long>(master_seed)},
           Cell{truth.omega},
           Cell{truth.xi},
           Cell{truth.phi},
           Cell{std::string("")},
           Cell{false},
           Cell{report.mse},
           Cell{fi},
           Cell{report.ratio},
           Cell{std::string(name)}};
  };
  if (trials >= 30) {
    if (bounds.omega.free()) add_summary(Param::frequency, "omega");
    if (bounds.xi.free()) add_summary(Param::amplitude, "xi");
    if (bounds.phi.free()) add_summary(Param::phase, "phi");
  }
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"correlated-Ramsey vs dynamical-decoupling sensing toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool strict = false;

  app.add_option("--config", config_path, "config file (key = value, or a JSON results file)");
  app.add_option("--out", out_path, "output path");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "exit 2 when a numerical sentinel is emitted");

  std::map<std::string, std::vector<std::string>> kv_args;
  for (const char* name : {"phase", "fisher", "gain", "sweep", "figure", "simulate",
                           "estimate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("params", kv_args[name], "key=value parameters");
    sub->fallthrough();  // global flags may follow the subcommand
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto* sub = app.get_subcommands().front();
    RunConfig cfg;
    cfg.command = sub->get_name();
    if (!config_path.empty()) load_config_file(config_path, cfg.command, cfg);
    for (const auto& kv : kv_args[cfg.command]) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw validation_error("parameter is not key=value: " + kv);
      cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!out_path.empty()) cfg.out = out_path;
    if (app.count("--format")) cfg.format = format;
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (strict) cfg.strict = true;

    std::string suffix;
    CommandResult result;
    if (cfg.command == "phase") result = cmd_phase(cfg);
    else if (cfg.command == "fisher") result = cmd_fisher(cfg);
    else if (cfg.command == "gain") result = cmd_gain(cfg);
    else if (cfg.command == "sweep") result = cmd_sweep(cfg, threads);
    else if (cfg.command == "figure") result = cmd_figure(cfg, threads, suffix);
    else if (cfg.command == "simulate") result = cmd_simulate(cfg);
    else if (cfg.command == "estimate") result = cmd_estimate(cfg, threads);

    if (cfg.out.empty()) cfg.out = default_out_path(cfg, suffix);
    if (result.raw_text.empty()) echo_config(result.table, cfg);
    write_output(cfg, result);
    if (result.sentinel && cfg.strict) {
      std::cerr << "error: numerical sentinel emitted under --strict\n";
      return 2;
    }
    return 0;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
