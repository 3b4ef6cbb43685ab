// Command-line entry point: flns <single|sweep|decay|conserve|inspect> [flags]
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

#include "flns/config.hpp"
#include "flns/diagnostics.hpp"
#include "flns/experiments.hpp"
#include "flns/hydro.hpp"
#include "flns/snapshot.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 2;
constexpr int kSolverError = 3;
constexpr int kConfigError = 4;

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key = value config file");
  cmd->add_option("--out", c.out, "output directory (overrides the output key)");
  cmd->add_option("--threads", c.threads, "worker threads (overrides the threads key)");
  cmd->add_option("--override", c.overrides, "key=value, applied after the config file")->take_all();
}

flns::ExperimentConfig resolve(flns::ExperimentKind kind, const Common& c) {
  auto cfg = flns::default_config(kind);
  if (!c.config.empty()) cfg = flns::load_config(c.config, cfg);
  cfg.experiment = kind;
  flns::apply_overrides(cfg, c.overrides);
  if (!c.out.empty()) cfg.output = c.out;
  if (c.threads > 0) cfg.threads = c.threads;
  cfg.validate();
  return cfg;
}

int report(const nlohmann::ordered_json& summary) {
  std::cout << summary.dump(2) << "\n";
  return summary.value("status", "pass") == "pass" ? kPass : kViolation;
}

int inspect(const std::string& path) {
  const auto snap = flns::read_snapshot(path);
  nlohmann::ordered_json j;
  j["subtype"] = snap.subtype;
  j["version"] = snap.version;
  j["dim"] = snap.grid.dim;
  j["nx"] = snap.grid.nx;
  j["nxi"] = snap.grid.nxi;
  j["xi_max"] = snap.grid.xi_max;
  j["time"] = snap.time;
  j["payload_length"] = snap.payload.size();
  if (snap.subtype == "KFLD") {
    flns::DistributionField f;
    flns::FluidField u;
    flns::unpack_kinetic(snap, f, u);
    const auto rec = flns::make_record(f, u, flns::SimParams{});
    j["mass"] = rec.mass;
    j["min_f"] = f.min_value();
    j["max_f"] = f.max_value();
    j["total_momentum"] = rec.total_momentum;
    j["kinetic_energy"] = rec.kinetic_energy;
    j["fluid_energy"] = rec.fluid_energy;
    j["e_total"] = rec.e_total;
  } else if (snap.subtype == "HYDR") {
    const auto h = flns::unpack_hydro(snap);
    double mass = 0.0;
    for (double r : h.rho) mass += r * h.grid.space_volume();
    j["mass"] = mass;
  }
  std::cout << j.dump(2) << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic flocking / Navier-Stokes simulator and diagnostics"};
  app.require_subcommand(1);
  Common common;
  auto* single = app.add_subcommand("single", "one coupled run with diagnostics");
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep against the hydrodynamic reference");
  auto* decay = app.add_subcommand("decay", "large-time alignment study");
  auto* conserve = app.add_subcommand("conserve", "conservation, energy and L^p checks");
  for (auto* cmd : {single, sweep, decay, conserve}) add_common(cmd, common);
  auto* insp = app.add_subcommand("inspect", "print the header and totals of a snapshot");
  std::string snapshot_path;
  insp->add_option("snapshot", snapshot_path, "snapshot file")->required();
  app.add_subcommand("keys", "list config keys")->callback([] {
    for (const auto& k : flns::config_keys()) std::printf("%-16s %s\n", k.name, k.help);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*insp) return inspect(snapshot_path);
    if (*single) {
      const auto run = flns::run_single(resolve(flns::ExperimentKind::single_run, common));
      return report(run.summary);
    }
    if (*sweep) return report(flns::run_epsilon_sweep(resolve(flns::ExperimentKind::epsilon_sweep, common)).summary);
    if (*decay) return report(flns::run_decay_study(resolve(flns::ExperimentKind::decay_study, common)).summary);
    if (*conserve)
      return report(flns::run_conservation_suite(resolve(flns::ExperimentKind::conservation, common)).summary);
  } catch (const flns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const flns::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kViolation;
  } catch (const flns::NonUnitMass& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  }
  return kPass;
}
