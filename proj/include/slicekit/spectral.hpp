// FFT-in-x engine: spectral x-derivatives, the compact Neumann Poisson
// solve (tridiagonal per wavenumber), and the exact solenoidal projection
// (interior-vorticity match with a lid-pinned streamfunction). One engine
// per grid per thread; plan creation is serialized globally.
#pragma once

#include <memory>
#include <vector>

#include "slicekit/grid.hpp"

namespace slicekit {

class SpectralEngine {
 public:
  explicit SpectralEngine(const Grid2D& g);
  ~SpectralEngine();
  SpectralEngine(const SpectralEngine&) = delete;
  SpectralEngine& operator=(const SpectralEngine&) = delete;

  const Grid2D& grid() const { return g_; }

  // Spectral first derivative in x; Nyquist mode of the result is zero.
  void ddx(ScalarField& dst, const ScalarField& src);
  // Spectral second derivative in x (Nyquist retained).
  void d2dx2(ScalarField& dst, const ScalarField& src);

  // Solves (d2/dx2 + compact d2/dz2) p = rhs with ghost-centered Neumann
  // data dp/dz at the lids. The x-mean mode carries the compatibility
  // condition (checked against compat_rel_tol) and the zero-mean gauge.
  ScalarField poisson_neumann(const ScalarField& rhs,
                              const std::vector<double>& dpdz_bottom,
                              const std::vector<double>& dpdz_top,
                              double compat_rel_tol);

  // Replaces u by the solenoidal field that matches its vorticity at
  // interior nodes: per wavenumber k != 0, solve
  // (k^2 - Dz^2) psi = ddx(u.z) - ddz(u.x) with psi = 0 at the lids and set
  // u = (ddz psi, -ddx psi). The x-mean keeps its shear and loses its
  // vertical flow. Output divergence and lid flux vanish identically for
  // the collocated stencils.
  void solenoidal_project(VectorField2& u);

  // 2/3-rule spectral truncation in x.
  void dealias_23(ScalarField& f);

  // Per-thread engine cache.
  static SpectralEngine& shared(const Grid2D& g);

 private:
  struct Impl;
  Grid2D g_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace slicekit
