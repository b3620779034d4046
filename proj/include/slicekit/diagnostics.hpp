#pragma once

#include <vector>

#include "slicekit/dynamics.hpp"

namespace slicekit {

// Closed marker polyline advected by u_S. x is stored unwrapped along the
// loop; the closing segment is taken through the nearest periodic image.
struct MaterialLoop {
  std::vector<double> x;
  std::vector<double> z;
};

// Passive particles carrying the PV sampled at release time.
struct TracerSet {
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> carried_pv;
  double pv_range0 = 0.0;  // PV dynamic range of the release-time field
};

struct DriftReport {
  double max_drift = 0.0;
  double rms_drift = 0.0;
};

struct EpResidual {
  double s_norm = 0.0;  // max-norm residual of the in-slice momentum equation
  double t_norm = 0.0;  // max-norm residual of the transverse equation
};

namespace diagnostics {

// integrate(D (1/2(|u_S|^2 + u_T^2) - (g/theta0)(z - H/2) theta_S)).
double energy(const SliceState& state);

// q = (1/D)(s perp_div(u_S) - perp_div(u_T grad theta_S) - f d(theta_S)/dz);
// the f x contribution enters through the analytically reduced last term.
ScalarField pv_field(const SliceState& state);

// Elliptic loop of n markers; every marker must sit strictly inside the
// lids and the loop cannot wind around the channel.
MaterialLoop make_loop(const Grid2D& g, double cx, double cz, double rx,
                       double rz, int n);

// Closed-polyline integral of s u_S - (u_T + f x) grad theta_S by the
// segment-trapezoid rule; throws on winding loops.
double circulation(const SliceState& state, const MaterialLoop& loop);

// One RK4 increment of dX/dt = u_S(X, t) against the field stepper's
// stage velocities; x advances unwrapped.
void advect_markers(std::vector<double>& x, std::vector<double>& z,
                    const StageVelocities& stages, double dt);
void advect_loop(MaterialLoop& loop, const StageVelocities& stages, double dt);

TracerSet release_tracers(const SliceState& state, int count, unsigned seed);

// Max and RMS of |q(position, now) - q(release)| over the tracer set.
DriftReport pv_tracers(const SliceState& state, const TracerSet& tracers);

// Centered-time residual of the two vector-calculus momentum equations
// assembled from the variational derivatives at the middle snapshot.
// Snapshots must be equally spaced in time.
EpResidual ep_residual(const SliceState& before, const SliceState& mid,
                       const SliceState& after);

}  // namespace diagnostics

}  // namespace slicekit
