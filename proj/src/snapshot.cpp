#include "slicekit/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "slicekit/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; this host is not");

namespace slicekit {

namespace {

std::size_t expected_bytes(std::size_t n) {
  return 4 + 3 * sizeof(std::uint32_t) + 3 * sizeof(double) +
         5 * n * sizeof(double);
}

void put_u32(std::ostream& o, std::uint32_t v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& o, double v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

void write_snapshot(const std::string& path, const SliceState& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open snapshot '" + path + "' for writing");
  const Grid2D& g = state.grid();
  out.write("SLCE", 4);
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(g.nx));
  put_u32(out, static_cast<std::uint32_t>(g.nz));
  put_f64(out, g.Lx);
  put_f64(out, g.H);
  put_f64(out, state.time);
  const std::size_t bytes = g.size() * sizeof(double);
  out.write(reinterpret_cast<const char*>(state.velocity.S.x.data()), bytes);
  out.write(reinterpret_cast<const char*>(state.velocity.S.z.data()), bytes);
  out.write(reinterpret_cast<const char*>(state.velocity.T.data()), bytes);
  out.write(reinterpret_cast<const char*>(state.tracer.theta.data()), bytes);
  out.write(reinterpret_cast<const char*>(state.density.D.data()), bytes);
  if (!out) throw ConfigError("short write to snapshot '" + path + "'");
}

SliceState read_snapshot(const std::string& path, const ModelParams& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());

  auto need = [&](std::size_t want) {
    if (buf.size() < want)
      throw ConfigError("snapshot '" + path + "': truncated, expected " +
                        std::to_string(want) + " bytes, got " +
                        std::to_string(buf.size()));
  };

  need(4 + 3 * sizeof(std::uint32_t));
  if (std::memcmp(buf.data(), "SLCE", 4) != 0)
    throw ConfigError("snapshot '" + path + "': bad magic, not a snapshot");
  std::size_t off = 4;
  auto get_u32 = [&] {
    std::uint32_t v;
    std::memcpy(&v, buf.data() + off, sizeof v);
    off += sizeof v;
    return v;
  };
  auto get_f64 = [&] {
    double v;
    std::memcpy(&v, buf.data() + off, sizeof v);
    off += sizeof v;
    return v;
  };

  const std::uint32_t version = get_u32();
  if (version != kSnapshotVersion)
    throw ConfigError("snapshot '" + path + "': format version " +
                      std::to_string(version) + ", expected " +
                      std::to_string(kSnapshotVersion));
  const std::uint32_t nx = get_u32();
  const std::uint32_t nz = get_u32();
  if (nx > 1u << 20 || nz > 1u << 20)
    throw ConfigError("snapshot '" + path + "': implausible grid size");
  const std::size_t n = static_cast<std::size_t>(nx) * nz;
  const std::size_t want = expected_bytes(n);
  if (buf.size() != want)
    throw ConfigError("snapshot '" + path + "': expected " +
                      std::to_string(want) + " bytes, got " +
                      std::to_string(buf.size()));

  const double Lx = get_f64();
  const double H = get_f64();
  const double t = get_f64();
  Grid2D g(static_cast<int>(nx), static_cast<int>(nz), Lx, H);

  ModelParams p = params;
  p.Lx = Lx;
  p.H = H;
  SliceState state(g, p);
  state.time = t;
  const std::size_t bytes = n * sizeof(double);
  auto read_field = [&](double* dst) {
    std::memcpy(dst, buf.data() + off, bytes);
    off += bytes;
  };
  read_field(state.velocity.S.x.data());
  read_field(state.velocity.S.z.data());
  read_field(state.velocity.T.data());
  read_field(state.tracer.theta.data());
  read_field(state.density.D.data());
  return state;
}

}  // namespace slicekit
