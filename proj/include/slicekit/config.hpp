#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicekit/dynamics.hpp"
#include "slicekit/noether.hpp"

namespace slicekit {

// Elliptic marker loop request: center, semi-axes, marker count.
struct LoopSpec {
  double cx = 0.0, cz = 0.0;
  double rx = 0.0, rz = 0.0;
  int n = 64;
};

// Full run description, parsed from the flat key = value config format.
// Sections: [grid], [params], [init], [loops.N], [psi], [output].
struct SimConfig {
  Grid2D grid{128, 33, 1.0e6, 1.0e4};
  ModelParams params;
  InitSpec init;

  double dt = 20.0;   // s; default sits near CFL 0.3 for the default shear
  double t_end = 0.0;  // s

  int output_every = 1;    // diagnostics rows, in steps
  int snapshot_every = 0;  // field snapshots, in steps; 0 = first and last only
  int tracer_count = 0;    // 0 disables the tracer column
  unsigned tracer_seed = 2026;
  double projection_tol = 1e-10;  // Poisson compatibility, relative

  std::vector<LoopSpec> loops;      // circ_0..circ_{k-1} columns
  std::vector<PsiSpec> psi_bumps;  // empty disables the symmetry columns

  void validate() const;
};

// Parses config text; error messages carry 1-based line numbers and the
// offending section or key. Unknown sections and keys are rejected.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

// Normalized rendering: fixed section/key order, full-precision numbers.
// Parsing it reproduces the same SimConfig, so the digest survives a
// round trip through the stored config copy.
std::string canonical_config(const SimConfig& cfg);

// FNV-1a (64-bit) over the canonical rendering, as fixed-width hex.
std::string config_digest(const SimConfig& cfg);

}  // namespace slicekit
