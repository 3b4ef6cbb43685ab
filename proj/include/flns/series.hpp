#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flns/diagnostics.hpp"

namespace flns {

/// Time-ordered diagnostics records with a stable CSV layout.
///
/// Columns: time, mass, u_c_<k>, xi_c_<k>, momentum_<k> (k < d), kinetic_energy,
/// fluid_energy, entropy, d1, d2, e_p, e_u, e_f, e_i, e_total, dissipation, l1,
/// l2, linf, then res_<name> for every residual of the first record in name
/// order. Numbers are printed with 17 significant digits.
class DiagnosticsSeries {
 public:
  void add(DiagnosticsRecord r) { records_.push_back(std::move(r)); }
  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  std::vector<std::string> columns() const;
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<DiagnosticsRecord> records_;
};

/// "%.17g" formatting used in every output file.
std::string format_real(double x);

/// Writes text to path, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace flns
