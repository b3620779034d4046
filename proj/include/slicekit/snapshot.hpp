#pragma once

#include <string>

#include "slicekit/dynamics.hpp"

namespace slicekit {

// Binary field snapshot. Layout: magic "SLCE"; format version, nx, nz as
// little-endian u32; Lx, H, t as little-endian f64; then u_Sx, u_Sz, u_T,
// theta_S, D as contiguous f64 arrays indexed (ix, iz) with iz fastest.
inline constexpr unsigned kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const SliceState& state);

// Rebuilds the state against the given parameters (the file carries only
// the domain and fields). tracer.s is taken from params.s; callers with a
// degenerate-closure configuration reset it themselves. Format errors name
// the expected and actual byte counts.
SliceState read_snapshot(const std::string& path, const ModelParams& params);

}  // namespace slicekit
