#pragma once

#include <string>
#include <vector>

#include "slicekit/dynamics.hpp"

namespace slicekit {

enum class SymmetryMode { psi_generated, free };

struct PsiSpec {
  std::string kind = "cosine_bump";  // gaussian_bump | cosine_bump
  double amplitude = 1.0;
  double cx = 0.0, cz = 0.0;  // bump center (m)
  // gaussian_bump: standard deviations; cosine_bump: support half-widths.
  double sx = 1.0, sz = 1.0;
};

// Density-preserving relabelling generator. In psi_generated mode the pair
// (w_S, w_T) is reconstructed from the transported scalar psi; in free mode
// it evolves by its own transport equations and psi merely rides along.
struct SymmetryField {
  ScalarField psi;
  VectorField2 w_S;
  ScalarField w_T;
  SymmetryMode mode = SymmetryMode::psi_generated;
};

namespace noether {

// Sum of the requested bumps. Support must stay clear of the lids: lid
// values above 1e-14 of the peak are a configuration error.
ScalarField init_psi(const std::vector<PsiSpec>& bumps, const Grid2D& g);

// w_S = (dpsi/dz, -dpsi/dx)/D, the unique in-slice field with
// w_S ⌟ D dx∧dz = dpsi.
VectorField2 w_from_psi(const ScalarField& psi, const DensityField& D);

// w_T = -(1/s) w_S·∇theta_S, cancelling the theta_S change of w_S.
// s = 0 leaves no closure and is a hard error.
ScalarField w_T_closure(const VectorField2& w_S, const TracerPair& tracer);

SymmetryField make_symmetry(const ScalarField& psi, const SliceState& state,
                            SymmetryMode mode);

// Advances the generator through one flow step using the stepper's stage
// velocities. psi_generated: transport psi, rebuild (w_S, w_T) against the
// advanced state. free: integrate dw/dt = -[u, w] directly.
SymmetryField evolve_symmetry(const SymmetryField& sym,
                              const StageVelocities& stages,
                              const SliceState& state_after, double dt);

// ||w_T + (1/s) w_S·∇theta_S||∞ over (||w_T||∞ + closure scale).
double proposition_residual(const SymmetryField& sym, const SliceState& state);

// integrate(D (u_S·w_S + (u_T + f x) w_T)).
double noether_charge(const SymmetryField& sym, const SliceState& state);

// The psi-weighted partner obtained by parts: integrate(psi perp_div(alpha))
// for alpha = u_S - (1/s)(u_T + f x)∇theta_S, the f x part reduced
// analytically. Equals noether_charge up to the boundary defect, which
// vanishes for interior-supported psi.
double noether_charge_dual(const ScalarField& psi, const SliceState& state);

// integrate(psi q D); equals s * noether_charge_dual identically and
// s * noether_charge up to the same boundary defect.
double noether_pv_check(const SymmetryField& sym, const SliceState& state);

}  // namespace noether

}  // namespace slicekit
