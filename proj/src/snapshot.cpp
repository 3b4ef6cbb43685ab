#include "flns/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace flns {

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

void put_i64(std::ofstream& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }
void put_f64(std::ofstream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::ifstream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw Error("snapshot: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[i]) << (8 * i);
  return v;
}

std::int64_t get_i64(std::ifstream& in) { return static_cast<std::int64_t>(get_u64(in)); }
double get_f64(std::ifstream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  if (snap.subtype.size() != 4) throw Error("snapshot: subtype tag must be 4 characters");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("snapshot: cannot open " + path.string());
  out.write("FLNS", 4);
  out.write(snap.subtype.data(), 4);
  put_i64(out, snap.version);
  put_i64(out, snap.grid.dim);
  put_i64(out, snap.grid.nx);
  put_i64(out, snap.grid.nxi);
  put_f64(out, snap.grid.xi_max);
  put_f64(out, snap.time);
  put_i64(out, static_cast<std::int64_t>(snap.payload.size()));
  for (double v : snap.payload) put_f64(out, v);
  if (!out) throw Error("snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("snapshot: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "FLNS", 4) != 0) throw Error("snapshot: bad magic in " + path.string());
  Snapshot snap;
  char tag[4];
  in.read(tag, 4);
  if (!in) throw Error("snapshot: truncated file");
  snap.subtype.assign(tag, 4);
  snap.version = get_i64(in);
  if (snap.version != Snapshot::kVersion) throw Error("snapshot: unsupported version");
  snap.grid.dim = static_cast<int>(get_i64(in));
  snap.grid.nx = static_cast<int>(get_i64(in));
  snap.grid.nxi = static_cast<int>(get_i64(in));
  snap.grid.xi_max = get_f64(in);
  snap.grid.validate();
  snap.time = get_f64(in);
  const std::int64_t count = get_i64(in);
  if (count < 0 || count > std::int64_t(1) << 34) throw Error("snapshot: bad payload length");
  snap.payload.resize(static_cast<std::size_t>(count));
  for (auto& v : snap.payload) v = get_f64(in);
  return snap;
}

void write_snapshot_sidecar(const std::filesystem::path& path, const Snapshot& snap) {
  nlohmann::ordered_json j;
  j["magic"] = "FLNS";
  j["subtype"] = snap.subtype;
  j["version"] = snap.version;
  j["d"] = snap.grid.dim;
  j["nx"] = snap.grid.nx;
  j["nxi"] = snap.grid.nxi;
  j["xi_max"] = snap.grid.xi_max;
  j["time"] = snap.time;
  j["payload_length"] = snap.payload.size();
  j["byte_order"] = "little";
  std::ofstream out(path.string() + ".json");
  out << j.dump(2) << '\n';
}

Snapshot pack_kinetic(const DistributionField& f, const FluidField& u) {
  Snapshot snap;
  snap.subtype = "KFLD";
  snap.grid = f.grid;
  snap.time = f.time;
  snap.payload.reserve(f.values.size() + u.velocity.data.size() + u.pressure.size());
  snap.payload.insert(snap.payload.end(), f.values.begin(), f.values.end());
  snap.payload.insert(snap.payload.end(), u.velocity.data.begin(), u.velocity.data.end());
  snap.payload.insert(snap.payload.end(), u.pressure.begin(), u.pressure.end());
  return snap;
}

void unpack_kinetic(const Snapshot& snap, DistributionField& f, FluidField& u) {
  if (snap.subtype != "KFLD") throw Error("snapshot: expected a KFLD snapshot, got " + snap.subtype);
  f = DistributionField(snap.grid, snap.time);
  u = FluidField(snap.grid);
  const std::size_t nf = f.values.size(), nu = u.velocity.data.size(), np = u.pressure.size();
  if (snap.payload.size() != nf + nu + np) throw Error("snapshot: payload length does not match header");
  std::copy_n(snap.payload.begin(), nf, f.values.begin());
  std::copy_n(snap.payload.begin() + nf, nu, u.velocity.data.begin());
  std::copy_n(snap.payload.begin() + nf + nu, np, u.pressure.begin());
}

}  // namespace flns
