#pragma once

#include <utility>
#include <vector>

#include "slicekit/grid.hpp"
#include "slicekit/spectral.hpp"

namespace slicekit::grid_ops {

// Spectral x-derivative (Nyquist mode dropped).
ScalarField ddx(const ScalarField& f);
// Centered z-derivative, one-sided second-order rows at the lids.
ScalarField ddz(const ScalarField& f);

VectorField2 grad(const ScalarField& f);
ScalarField divergence(const VectorField2& v);
// Directional derivative u·∇f.
ScalarField advect(const VectorField2& u, const ScalarField& f);
// d(v.z)/dx - d(v.x)/dz, the scalar curl of an in-plane field.
ScalarField perp_div(const VectorField2& v);

// Spectral d2/dx2 plus compact 3-point d2/dz2, one-sided second-order
// second-derivative rows at the lids.
ScalarField laplacian(const ScalarField& f);

// The exact discrete operator inverted by poisson_solve: compact interior
// rows, ghost-centered lid rows built from the prescribed df/dz data.
ScalarField neumann_laplacian(const ScalarField& f,
                              const std::vector<double>& dfdz_bottom,
                              const std::vector<double>& dfdz_top);

// Solves the compact Laplacian for p with df/dz prescribed at the lids,
// periodic in x, zero domain mean. Throws NumericsError reporting the
// defect integral when rhs and flux data violate the divergence-theorem
// compatibility beyond compat_rel_tol.
ScalarField poisson_solve(const ScalarField& rhs,
                          const std::vector<double>& neumann_top,
                          const std::vector<double>& neumann_bottom,
                          double compat_rel_tol = 1e-10);

// Bicubic Lagrange sample at (x, z): periodic in x, stencils clamped
// one-sided at the lids, exact at nodes. z may overshoot [0, H] by at
// most 1e-12*H; beyond that a domain error is thrown.
double interpolate(const ScalarField& f, double x, double z);
std::vector<double> interpolate(const ScalarField& f,
                                const std::vector<std::pair<double, double>>& points);

// Trapezoid in z, full-period rectangle rule in x.
double integrate(const ScalarField& f);

// 2/3-rule spectral truncation in x.
void dealias_23(ScalarField& f);

}  // namespace slicekit::grid_ops
