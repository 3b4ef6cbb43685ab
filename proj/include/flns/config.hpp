#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flns/fields.hpp"

namespace flns {

enum class ExperimentKind { single_run, conservation, epsilon_sweep, decay_study };

/// Everything a run needs. Read from a flat "key = value" file; see
/// config_keys() for the accepted keys and their meaning.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::single_run;
  PhaseGrid grid{1, 64, 64, 6.0};
  SimParams params;

  // initial data: rho0 = 1 + rho_amp cos(2 pi k . x), u_f0 = uf_shift + uf_amp sin(...)
  double rho_amp = 0.2;
  int wavenumber = 1;
  double uf_amp = 0.1;
  double uf_shift = 0.0;
  double uf_shift_y = 0.0;
  double fluid_u = 0.0;
  double fluid_v = 0.0;
  double fluid_psi = 0.0;  // d = 2 stream-function amplitude
  double temperature = 1.0;
  double tail_threshold = 1e-6;
  /// Shift the fluid so 1/2 (xi_c + u_c) sits on a velocity cell centre (d = 1).
  bool align_to_cell = false;

  double t_end = 1.0;
  double dt = 0.0;  // 0: from cfl
  long max_steps = 0;  // > 0 overrides t_end / dt as a step count
  long snapshot_every = 0;  // 0: first and last only
  std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
  std::string output = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

/// Applies one "key = value" assignment. Throws ConfigError for unknown keys
/// or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses a config file: one assignment per line, '#' starts a comment.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Applies "key=value" overrides in order.
void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides);

/// Every key with its resolved value, in the input format.
std::string render_config(const ExperimentConfig& cfg);

struct ConfigKey {
  const char* name;
  const char* help;
};
const std::vector<ConfigKey>& config_keys();

ExperimentKind parse_experiment(const std::string& name);
std::string experiment_name(ExperimentKind kind);

}  // namespace flns
