#pragma once

#include "slicekit/grid.hpp"

namespace slicekit {

// Lie-algebra element: in-slice vector field plus transverse scalar field.
// Also carries relabelling generators (w_S, w_T).
struct SliceVelocity {
  VectorField2 S;
  ScalarField T;

  SliceVelocity() = default;
  explicit SliceVelocity(const Grid2D& g) : S(g), T(g) {}
  const Grid2D& grid() const { return S.grid(); }
};

// Advected tracer: in-slice temperature field plus the constant
// transverse gradient s. s never changes under evolution.
struct TracerPair {
  ScalarField theta;
  double s = 0.0;

  TracerPair() = default;
  TracerPair(const Grid2D& g, double s_) : theta(g), s(s_) {}
  const Grid2D& grid() const { return theta.grid(); }
};

// Area-density weight D, D dS the advected 2-form (dS = dx^dz).
struct DensityField {
  ScalarField D;

  DensityField() = default;
  explicit DensityField(const Grid2D& g, double fill = 1.0) : D(g, fill) {}
  const Grid2D& grid() const { return D.grid(); }
};

// Sampled group element (phi, f): target coordinates of each reference
// node plus a transverse displacement. phi_x is stored unwrapped so
// x-shifts compose monotonically on the periodic channel.
struct SliceMapSample {
  ScalarField phi_x;
  ScalarField phi_z;
  ScalarField f;

  SliceMapSample() = default;
  explicit SliceMapSample(const Grid2D& g) : phi_x(g), phi_z(g), f(g) {}
  const Grid2D& grid() const { return phi_x.grid(); }
};

namespace slice_algebra {

SliceMapSample sd_identity(const Grid2D& g);

// (phi_a o phi_b, f_a o phi_b + f_b). a's samples are read at b's target
// points by bicubic interpolation; the x-displacement of a is interpolated
// periodically and re-anchored at b's unwrapped coordinates.
SliceMapSample sd_compose(const SliceMapSample& a, const SliceMapSample& b);

// [(a_S, a_T), (b_S, b_T)] = (a_S·∇b_S − b_S·∇a_S, a_S·∇b_T − b_S·∇a_T).
SliceVelocity lie_bracket(const SliceVelocity& a, const SliceVelocity& b);

// ∇·(u D); transport is dD/dt = −lie_derivative_density(u_S, D).
DensityField lie_derivative_density(const VectorField2& u, const DensityField& D);

// (u_S·∇θ_S + s·u_T, 0).
TracerPair lie_derivative_tracer(const SliceVelocity& v, const TracerPair& t);

}  // namespace slice_algebra

}  // namespace slicekit
