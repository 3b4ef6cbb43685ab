#include "flns/series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "flns/errors.hpp"

namespace flns {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::vector<std::string> DiagnosticsSeries::columns() const {
  std::vector<std::string> cols{"time", "mass"};
  if (records_.empty()) return cols;
  const std::size_t d = records_.front().fluid_momentum.size();
  for (const char* prefix : {"u_c_", "xi_c_", "momentum_"})
    for (std::size_t k = 0; k < d; ++k) cols.push_back(prefix + std::to_string(k));
  for (const char* name : {"kinetic_energy", "fluid_energy", "entropy", "d1", "d2", "e_p", "e_u", "e_f", "e_i",
                           "e_total", "dissipation", "l1", "l2", "linf"})
    cols.push_back(name);
  for (const auto& [name, value] : records_.front().residuals) cols.push_back("res_" + name);
  return cols;
}

std::string DiagnosticsSeries::to_csv() const {
  const auto cols = columns();
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  if (records_.empty()) return out;
  const auto& first = records_.front();
  for (const auto& r : records_) {
    std::vector<double> row{r.time, r.mass};
    row.insert(row.end(), r.fluid_momentum.begin(), r.fluid_momentum.end());
    row.insert(row.end(), r.kinetic_momentum.begin(), r.kinetic_momentum.end());
    row.insert(row.end(), r.total_momentum.begin(), r.total_momentum.end());
    for (double v : {r.kinetic_energy, r.fluid_energy, r.entropy, r.d1, r.d2, r.e_p, r.e_u, r.e_f, r.e_i,
                     r.e_total, r.dissipation, r.l1, r.l2, r.linf})
      row.push_back(v);
    for (const auto& [name, value] : first.residuals) {
      const auto it = r.residuals.find(name);
      row.push_back(it == r.residuals.end() ? std::nan("") : it->second);
    }
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_real(row[i]);
    out += "\n";
  }
  return out;
}

void DiagnosticsSeries::write_csv(const std::filesystem::path& path) const { write_text(path, to_csv()); }

}  // namespace flns
