#pragma once

#include <string>
#include <utility>

#include "slicekit/slice_algebra.hpp"

namespace slicekit {

struct ModelParams {
  double f = 1e-4;        // Coriolis parameter (1/s)
  double gravity = 9.81;  // m/s^2
  double theta0 = 300.0;  // reference potential temperature (K)
  double s = -3e-6;       // transverse temperature gradient (K/m)
  double Lx = 1.0e6;      // channel length (m)
  double H = 1.0e4;       // channel height (m)

  void validate() const;  // throws ConfigError on nonphysical values
};

struct InitSpec {
  // rest | stratified_rest | eady_basic | eady_perturbed
  std::string kind = "eady_perturbed";
  double N2 = 2.5e-5;     // stratification of the basic states (1/s^2)
  // Perturbation of eady_perturbed: transverse jet amplitude (m/s) with its
  // thermal-wind temperature companion, plus an in-plane streamfunction kick.
  double amplitude = 0.5;
  double amplitude_inplane = 0.02;
  int mode = 1;           // x-wavenumber index of the perturbation
};

struct SliceState {
  SliceVelocity velocity;  // u_S, u_T
  TracerPair tracer;       // theta_S, s
  DensityField density;    // D = 1 throughout
  ModelParams params;
  double time = 0.0;

  SliceState() = default;
  SliceState(const Grid2D& g, const ModelParams& p);
  const Grid2D& grid() const { return velocity.grid(); }
};

// The four variational derivatives of the slice Lagrangian, each divided
// by D where the equations of motion use that combination.
struct VarDerivs {
  VectorField2 m_S;   // u_S
  ScalarField m_T;    // u_T + f x
  ScalarField b;      // (g/theta0)(z - H/2)
  ScalarField dldD;   // 1/2(|u_S|^2+u_T^2) + f u_T x - p + (g/theta0) theta_S (z - H/2)
};

struct Tendencies {
  VectorField2 du_S;
  ScalarField du_T;
  ScalarField dtheta;
};

// Velocities at the four classical Runge-Kutta stage states; co-evolved
// quantities (markers, symmetry generators) integrate against these.
struct StageVelocities {
  SliceVelocity v1, v2, v3, v4;
};

// Relative compatibility tolerance of the pressure Poisson solves.
// Default 1e-10; a per-process knob so run configs can override it.
void set_projection_tolerance(double tol);
double projection_tolerance();

// (g/theta0)(z - H/2) sampled on the grid.
ScalarField buoyancy_factor(const Grid2D& g, const ModelParams& p);

// Neumann pressure of the current state: grad p removes the divergence of
// the unprojected momentum tendency, with dp/dz at the lids taken from the
// z-momentum balance restricted to w = 0.
ScalarField pressure_field(const SliceState& state);

VarDerivs eb_var_derivs(const SliceState& state);

// Projected tendencies of (u_S, u_T, theta_S).
Tendencies eb_rhs(const SliceState& state);
Tendencies eb_rhs(const SliceState& state, ScalarField* pressure_out);

// Pressure-projects u_star: subtracts grad of the Neumann solve (lid data
// from bc_z's lid rows), then applies the exact solenoidal reconstruction.
// Returns the projected field and the pressure.
std::pair<VectorField2, ScalarField> project(const VectorField2& u_star,
                                             const ScalarField& bc_z);

// Classical RK4 with a pressure solve inside every stage and a final
// cleanup projection. dt = 0 returns the input verbatim.
SliceState rk4_step(const SliceState& state, double dt,
                    StageVelocities* stages = nullptr);

SliceState init_state(const InitSpec& init, const Grid2D& grid,
                      const ModelParams& params);

// dt * max|u| / min(dx, dz)
double cfl_number(const SliceState& state, double dt);

}  // namespace slicekit
