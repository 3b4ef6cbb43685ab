#include "flns/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace flns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

long to_int(const std::string& key, const std::string& v) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
}

std::string real_str(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Entry {
  const char* help;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define REAL(field, help)                                                                                \
  Entry {                                                                                                \
    help, [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.field = to_real(k, v); }, \
        [](const ExperimentConfig& c) { return real_str(c.field); }                                       \
  }
#define INT(field, help)                                                                                    \
  Entry {                                                                                                   \
    help, [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.field = to_int(k, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                                   \
  }

const std::vector<std::pair<std::string, Entry>>& table() {
  static const std::vector<std::pair<std::string, Entry>> t = {
      {"experiment",
       {"single_run | conservation | epsilon_sweep | decay_study",
        [](ExperimentConfig& c, const std::string&, const std::string& v) { c.experiment = parse_experiment(v); },
        [](const ExperimentConfig& c) { return experiment_name(c.experiment); }}},
      {"dim", INT(grid.dim, "spatial and velocity dimension, 1 or 2")},
      {"nx", INT(grid.nx, "cells per spatial axis")},
      {"nxi", INT(grid.nxi, "cells per velocity axis")},
      {"xi_max", REAL(grid.xi_max, "velocity box half-width")},
      {"alpha", REAL(params.alpha, "drag toward the fluid")},
      {"beta", REAL(params.beta, "local alignment (physical mode)")},
      {"sigma", REAL(params.sigma, "velocity diffusion (physical mode)")},
      {"mu", REAL(params.mu, "fluid viscosity")},
      {"epsilon", REAL(params.epsilon, "scaling parameter (scaled mode: beta = sigma = 1/epsilon)")},
      {"mode",
       {"physical | scaled",
        [](ExperimentConfig& c, const std::string& k, const std::string& v) {
          if (v == "physical")
            c.params.mode = RunMode::physical;
          else if (v == "scaled")
            c.params.mode = RunMode::scaled;
          else
            throw ConfigError("config: '" + k + "' expects physical or scaled, got '" + v + "'");
        },
        [](const ExperimentConfig& c) { return std::string(c.params.mode == RunMode::scaled ? "scaled" : "physical"); }}},
      {"rho_floor", REAL(params.rho_floor, "density below which u_f is set to 0")},
      {"cfl", REAL(params.cfl, "Courant number in (0, 0.9]")},
      {"rho_amp", REAL(rho_amp, "rho0 = 1 + rho_amp cos(2 pi k . x)")},
      {"wavenumber", INT(wavenumber, "k in the initial profiles")},
      {"uf_amp", REAL(uf_amp, "u_f0 = uf_shift + uf_amp sin(2 pi k x)")},
      {"uf_shift", REAL(uf_shift, "constant part of u_f0 (first component)")},
      {"uf_shift_y", REAL(uf_shift_y, "constant part of u_f0 (second component, d = 2)")},
      {"fluid_u", REAL(fluid_u, "mean fluid velocity (first component)")},
      {"fluid_v", REAL(fluid_v, "mean fluid velocity (second component, d = 2)")},
      {"fluid_psi", REAL(fluid_psi, "d = 2 Taylor-Green stream-function amplitude")},
      {"temperature", REAL(temperature, "temperature of the initial Maxwellian")},
      {"tail_threshold", REAL(tail_threshold, "largest mass fraction allowed in the outer velocity layer")},
      {"align_to_cell",
       {"shift the d = 1 fluid so the limiting velocity sits on a cell centre",
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.align_to_cell = to_bool(k, v); },
        [](const ExperimentConfig& c) { return std::string(c.align_to_cell ? "true" : "false"); }}},
      {"t_end", REAL(t_end, "final time")},
      {"dt", REAL(dt, "time step; 0 picks cfl times the stable step")},
      {"max_steps", INT(max_steps, "if > 0, run exactly this many steps")},
      {"snapshot_every", INT(snapshot_every, "snapshot cadence in steps; 0 writes first and last only")},
      {"epsilons",
       {"comma-separated, strictly decreasing epsilon list for sweeps",
        [](ExperimentConfig& c, const std::string& k, const std::string& v) {
          c.epsilons.clear();
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) c.epsilons.push_back(to_real(k, trim(item)));
        },
        [](const ExperimentConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.epsilons.size(); ++i) out += (i ? "," : "") + real_str(c.epsilons[i]);
          return out;
        }}},
      {"output",
       {"output directory",
        [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output = v; },
        [](const ExperimentConfig& c) { return c.output; }}},
      {"seed", INT(seed, "seed for randomized property suites")},
      {"threads", INT(threads, "worker threads")},
  };
  return t;
}

#undef REAL
#undef INT

}  // namespace

ExperimentKind parse_experiment(const std::string& name) {
  if (name == "single_run" || name == "single") return ExperimentKind::single_run;
  if (name == "conservation" || name == "conserve") return ExperimentKind::conservation;
  if (name == "epsilon_sweep" || name == "sweep") return ExperimentKind::epsilon_sweep;
  if (name == "decay_study" || name == "decay") return ExperimentKind::decay_study;
  throw ConfigError("config: unknown experiment '" + name + "'");
}

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::single_run: return "single_run";
    case ExperimentKind::conservation: return "conservation";
    case ExperimentKind::epsilon_sweep: return "epsilon_sweep";
    case ExperimentKind::decay_study: return "decay_study";
  }
  return "single_run";
}

void ExperimentConfig::validate() const {
  grid.validate();
  params.validate();
  if (!(rho_amp >= 0.0 && rho_amp < 1.0)) throw ConfigError("config: rho_amp must lie in [0, 1)");
  if (wavenumber < 0) throw ConfigError("config: wavenumber must be nonnegative");
  if (!(t_end >= 0.0)) throw ConfigError("config: t_end must be nonnegative");
  if (dt < 0.0) throw ConfigError("config: dt must be nonnegative");
  if (!(temperature > 0.0)) throw ConfigError("config: temperature must be positive");
  if (threads < 1) throw ConfigError("config: threads must be at least 1");
  if (snapshot_every < 0 || max_steps < 0) throw ConfigError("config: step counts must be nonnegative");
  if (experiment == ExperimentKind::epsilon_sweep) {
    if (epsilons.empty()) throw ConfigError("config: epsilons must not be empty");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      if (!(epsilons[i] > 0)) throw ConfigError("config: epsilons must be positive");
      if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ConfigError("config: epsilons must strictly decrease");
    }
  }
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [name, entry] : table()) {
    if (name == key) {
      entry.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("config: override '" + item + "' is not key=value");
    apply_setting(cfg, trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
  }
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, entry] : table()) out += name + " = " + entry.get(cfg) + "\n";
  return out;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& [name, entry] : table()) k.push_back({name.c_str(), entry.help});
    return k;
  }();
  return keys;
}

}  // namespace flns
