#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flns/fields.hpp"

namespace flns {

/// Binary snapshot container.
///
/// Layout (all numbers 8-byte little-endian):
///   "FLNS" | subtype tag (4 ASCII bytes, "KFLD" or "HYDR") | version (int64) |
///   d (int64) | nx (int64) | nxi (int64) | xi_max (real) | time (real) |
///   payload length (int64) | payload (reals, row-major per block).
///
/// KFLD payload: f over (space cell, velocity cell), then d fluid velocity
/// components over space cells, then pressure. HYDR payload: rho, d momentum
/// components, d fluid velocity components, pressure.
struct Snapshot {
  static constexpr std::int64_t kVersion = 1;
  std::string subtype = "KFLD";
  std::int64_t version = kVersion;
  PhaseGrid grid;
  double time = 0.0;
  std::vector<double> payload;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

/// JSON mirror of the header, written next to the binary as <path>.json.
void write_snapshot_sidecar(const std::filesystem::path& path, const Snapshot& snap);

Snapshot pack_kinetic(const DistributionField& f, const FluidField& u);
void unpack_kinetic(const Snapshot& snap, DistributionField& f, FluidField& u);

}  // namespace flns
