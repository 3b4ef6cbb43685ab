#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flns/config.hpp"
#include "flns/hydro.hpp"
#include "flns/series.hpp"

namespace flns {

struct InitialState {
  DistributionField f;
  FluidField u;
};

/// Maxwellian f0 with rho0 = 1 + rho_amp cos(2 pi k . x) and the configured
/// u_f0, plus the configured fluid. In d = 2 the fluid is a Taylor-Green field
/// of amplitude fluid_psi on top of (fluid_u, fluid_v).
InitialState make_initial_state(const ExperimentConfig& cfg);

/// Defaults per experiment (t_end, parameters) before file and CLI overrides.
ExperimentConfig default_config(ExperimentKind kind);

/// Fixed step and step count covering [0, t_end] (or max_steps steps).
struct StepSchedule {
  double dt = 0.0;
  long steps = 0;
};
StepSchedule schedule_steps(const ExperimentConfig& cfg, const DistributionField& f, const FluidField& u);

using StepObserver = std::function<void(long step, const DistributionField&, const FluidField&)>;

struct RunOptions {
  bool write_outputs = true;
  StepObserver observer;  // called at step 0 and after every step
};

struct RunResult {
  std::filesystem::path dir;
  DiagnosticsSeries series;
  nlohmann::ordered_json summary;
  std::vector<std::string> violations;
  StepSchedule schedule;
  DistributionField f;
  FluidField u;

  bool passed() const { return violations.empty(); }
};

/// Coupled kinetic-fluid run. Records diagnostics after every step, checks the
/// conservation invariants, and (with write_outputs) writes resolved_config,
/// diagnostics.csv, summary.json, step_plan.jsonl and snapshots under
/// cfg.output. Solver errors are rethrown after a final snapshot dump.
RunResult run_single(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct SweepRow {
  double epsilon = 0.0;
  double gap_uf = 0.0;   // sup_t ||u_f^eps - u_f||^2
  double gap_rho = 0.0;  // sup_t ||rho^eps - rho||^2
  double gap_u = 0.0;    // sup_t ||u^eps - u||^2
  double gap_sum = 0.0;  // sup_t of the sum
  double entropy = 0.0;  // sup_t int H
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // least-squares slope of log gap_sum against log epsilon
  bool monotone = false;
  double max_square_expansion = 0.0;  // over every kinetic snapshot
  std::string table_csv;
  nlohmann::ordered_json summary;
};

/// Scaled kinetic-fluid runs against the hydrodynamic reference, one per
/// epsilon, on matched grids up to t_end.
SweepResult run_epsilon_sweep(const ExperimentConfig& cfg, bool write_outputs = true);

struct DecayReport {
  bool degenerate = false;
  bool monotone = true;
  double max_increase = 0.0;
  double energy_rate = 0.0;     // -d log E / dt fitted on the tail half
  double alignment_rate = 0.0;  // energy_rate / 2
  double r_squared = 0.0;
  double e_over_d = 0.0;        // sup_t E / D
  double momentum_drift = 0.0;
  double u_c_final = 0.0;
  double u_c_limit = 0.0;  // 1/2 (xi_c(0) + u_c(0)), first component
  double max_square_expansion = 0.0;
  std::vector<double> times;
  std::vector<double> energies;
  nlohmann::ordered_json summary;
};

/// Large-time alignment study (sigma = 0, alpha = beta = 1).
DecayReport run_decay_study(const ExperimentConfig& cfg, bool write_outputs = true);

struct ConservationReport {
  bool passed = false;
  double mass_drift = 0.0;
  double momentum_drift = 0.0;
  double equilibrium_residual = 0.0;
  std::vector<double> energy_residuals;  // per resolution, coarse to fine
  double energy_order = 0.0;
  double lp_rate = 0.0;  // measured growth rate of ||f||_2^2
  double lp_expected = 0.0;
  double max_square_expansion = 0.0;  // over every snapshot of every run
  std::vector<std::string> failures;
  nlohmann::ordered_json summary;
};

/// Conservation, energy-identity and L^p checks over short runs.
ConservationReport run_conservation_suite(const ExperimentConfig& cfg, bool write_outputs = true);

/// Least-squares slope and R^2 of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace flns
