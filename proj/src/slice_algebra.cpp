#include "slicekit/slice_algebra.hpp"

#include <algorithm>
#include <cstddef>

#include "slicekit/grid_ops.hpp"
#include "slicekit/kernels.hpp"

namespace slicekit::slice_algebra {

SliceMapSample sd_identity(const Grid2D& g) {
  SliceMapSample m(g);
  for (int ix = 0; ix < g.nx; ++ix) {
    const double xv = g.x(ix);
    for (int iz = 0; iz < g.nz; ++iz) {
      m.phi_x.at(ix, iz) = xv;
      m.phi_z.at(ix, iz) = g.z(iz);
    }
  }
  return m;
}

SliceMapSample sd_compose(const SliceMapSample& a, const SliceMapSample& b) {
  const Grid2D& g = a.grid();
  require_same_grid(g, b.grid());

  // Periodic part of a's x-map; the identity part rides along b's
  // unwrapped coordinate.
  ScalarField adx(g);
  for (int ix = 0; ix < g.nx; ++ix) {
    const double xv = g.x(ix);
    for (int iz = 0; iz < g.nz; ++iz) adx.at(ix, iz) = a.phi_x.at(ix, iz) - xv;
  }

  SliceMapSample r(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double qx = b.phi_x[i];
    const double qz = b.phi_z[i];
    r.phi_x[i] = qx + grid_ops::interpolate(adx, qx, qz);
    r.phi_z[i] =
        std::min(std::max(grid_ops::interpolate(a.phi_z, qx, qz), 0.0), g.H);
    r.f[i] = grid_ops::interpolate(a.f, qx, qz) + b.f[i];
  }
  return r;
}

SliceVelocity lie_bracket(const SliceVelocity& a, const SliceVelocity& b) {
  const Grid2D& g = a.grid();
  require_same_grid(g, b.grid());
  SliceVelocity r(g);
  const auto& k = kernels::ops();

  ScalarField ab = grid_ops::advect(a.S, b.S.x);
  ScalarField ba = grid_ops::advect(b.S, a.S.x);
  k.axpby(r.S.x.data(), 1.0, ab.data(), -1.0, ba.data(), g.size());

  ab = grid_ops::advect(a.S, b.S.z);
  ba = grid_ops::advect(b.S, a.S.z);
  k.axpby(r.S.z.data(), 1.0, ab.data(), -1.0, ba.data(), g.size());

  ab = grid_ops::advect(a.S, b.T);
  ba = grid_ops::advect(b.S, a.T);
  k.axpby(r.T.data(), 1.0, ab.data(), -1.0, ba.data(), g.size());
  return r;
}

DensityField lie_derivative_density(const VectorField2& u, const DensityField& D) {
  const Grid2D& g = u.grid();
  require_same_grid(g, D.grid());
  VectorField2 flux(g);
  const auto& k = kernels::ops();
  k.hadamard(flux.x.data(), u.x.data(), D.D.data(), g.size());
  k.hadamard(flux.z.data(), u.z.data(), D.D.data(), g.size());
  DensityField r(g, 0.0);
  r.D = grid_ops::divergence(flux);
  return r;
}

TracerPair lie_derivative_tracer(const SliceVelocity& v, const TracerPair& t) {
  const Grid2D& g = v.grid();
  require_same_grid(g, t.grid());
  TracerPair r(g, 0.0);
  ScalarField adv = grid_ops::advect(v.S, t.theta);
  kernels::ops().add_scaled(r.theta.data(), adv.data(), t.s, v.T.data(), g.size());
  return r;
}

}  // namespace slicekit::slice_algebra
