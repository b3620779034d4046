#include "slicekit/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "slicekit/errors.hpp"
#include "slicekit/kernels.hpp"

namespace slicekit::grid_ops {

namespace {

void ddz_into(ScalarField& dst, const ScalarField& src) {
  const Grid2D& g = src.grid();
  kernels::ops().ddz(dst.data(), src.data(), static_cast<std::size_t>(g.nx),
                     static_cast<std::size_t>(g.nz), 1.0 / (2.0 * g.dz));
}

void d2dz2_compact(double* dst, const double* src, int nx, int nz, double inv_dz2) {
  for (int ix = 0; ix < nx; ++ix) {
    const double* c = src + static_cast<std::size_t>(ix) * nz;
    double* d = dst + static_cast<std::size_t>(ix) * nz;
    d[0] = (2.0 * c[0] - 5.0 * c[1] + 4.0 * c[2] - c[3]) * inv_dz2;
    for (int j = 1; j + 1 < nz; ++j)
      d[j] = (c[j - 1] - 2.0 * c[j] + c[j + 1]) * inv_dz2;
    d[nz - 1] =
        (2.0 * c[nz - 1] - 5.0 * c[nz - 2] + 4.0 * c[nz - 3] - c[nz - 4]) * inv_dz2;
  }
}

// Lagrange cubic weights at t relative to nodes {-1, 0, 1, 2}; the factored
// products hit 0/1 exactly when t is an integer node.
inline void cubic_weights_m1(double t, double w[4]) {
  w[0] = t * (t - 1.0) * (t - 2.0) * (-1.0 / 6.0);
  w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) * 0.5;
  w[2] = (t + 1.0) * t * (t - 2.0) * (-0.5);
  w[3] = (t + 1.0) * t * (t - 1.0) * (1.0 / 6.0);
}

// Lagrange cubic weights at t relative to nodes {0, 1, 2, 3}.
inline void cubic_weights_0(double t, double w[4]) {
  w[0] = (t - 1.0) * (t - 2.0) * (t - 3.0) * (-1.0 / 6.0);
  w[1] = t * (t - 2.0) * (t - 3.0) * 0.5;
  w[2] = t * (t - 1.0) * (t - 3.0) * (-0.5);
  w[3] = t * (t - 1.0) * (t - 2.0) * (1.0 / 6.0);
}

}  // namespace

ScalarField ddx(const ScalarField& f) {
  ScalarField r(f.grid());
  SpectralEngine::shared(f.grid()).ddx(r, f);
  return r;
}

ScalarField ddz(const ScalarField& f) {
  ScalarField r(f.grid());
  ddz_into(r, f);
  return r;
}

VectorField2 grad(const ScalarField& f) {
  VectorField2 v(f.grid());
  SpectralEngine::shared(f.grid()).ddx(v.x, f);
  ddz_into(v.z, f);
  return v;
}

ScalarField advect(const VectorField2& u, const ScalarField& f) {
  require_same_grid(u.grid(), f.grid());
  VectorField2 gf = grad(f);
  ScalarField r(f.grid());
  kernels::ops().dot2(r.data(), u.x.data(), gf.x.data(), u.z.data(), gf.z.data(),
                      r.size());
  return r;
}

ScalarField divergence(const VectorField2& v) {
  require_same_grid(v.x.grid(), v.z.grid());
  ScalarField dvx = ddx(v.x);
  ScalarField dvz = ddz(v.z);
  ScalarField r(v.grid());
  kernels::ops().axpby(r.data(), 1.0, dvx.data(), 1.0, dvz.data(), r.size());
  return r;
}

ScalarField perp_div(const VectorField2& v) {
  require_same_grid(v.x.grid(), v.z.grid());
  ScalarField dvz = ddx(v.z);
  ScalarField dvx = ddz(v.x);
  ScalarField r(v.grid());
  kernels::ops().axpby(r.data(), 1.0, dvz.data(), -1.0, dvx.data(), r.size());
  return r;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid2D& g = f.grid();
  ScalarField xx(g);
  SpectralEngine::shared(g).d2dx2(xx, f);
  ScalarField zz(g);
  d2dz2_compact(zz.data(), f.data(), g.nx, g.nz, 1.0 / (g.dz * g.dz));
  ScalarField r(g);
  kernels::ops().axpby(r.data(), 1.0, xx.data(), 1.0, zz.data(), r.size());
  return r;
}

ScalarField neumann_laplacian(const ScalarField& f,
                              const std::vector<double>& dfdz_bottom,
                              const std::vector<double>& dfdz_top) {
  const Grid2D& g = f.grid();
  if (static_cast<int>(dfdz_bottom.size()) != g.nx ||
      static_cast<int>(dfdz_top.size()) != g.nx)
    throw GridMismatchError("Neumann data length does not match nx");
  ScalarField r(g);
  SpectralEngine::shared(g).d2dx2(r, f);
  const double inv_dz2 = 1.0 / (g.dz * g.dz);
  const double inv_dz = 1.0 / g.dz;
  for (int ix = 0; ix < g.nx; ++ix) {
    const double* c = f.data() + static_cast<std::size_t>(ix) * g.nz;
    double* d = r.data() + static_cast<std::size_t>(ix) * g.nz;
    d[0] += (2.0 * c[1] - 2.0 * c[0]) * inv_dz2 - 2.0 * dfdz_bottom[ix] * inv_dz;
    for (int j = 1; j + 1 < g.nz; ++j)
      d[j] += (c[j - 1] - 2.0 * c[j] + c[j + 1]) * inv_dz2;
    d[g.nz - 1] += (2.0 * c[g.nz - 2] - 2.0 * c[g.nz - 1]) * inv_dz2 +
                   2.0 * dfdz_top[ix] * inv_dz;
  }
  return r;
}

ScalarField poisson_solve(const ScalarField& rhs,
                          const std::vector<double>& neumann_top,
                          const std::vector<double>& neumann_bottom,
                          double compat_rel_tol) {
  return SpectralEngine::shared(rhs.grid())
      .poisson_neumann(rhs, neumann_bottom, neumann_top, compat_rel_tol);
}

double interpolate(const ScalarField& f, double x, double z) {
  const Grid2D& g = f.grid();
  const double ztol = 1e-12 * g.H;
  if (!(z >= -ztol && z <= g.H + ztol)) {
    std::ostringstream os;
    os << "interpolation point z=" << z << " outside [0," << g.H << "] by more than "
       << ztol;
    throw NumericsError(os.str());
  }
  const double zc = std::min(std::max(z, 0.0), g.H);

  double xw = std::fmod(x, g.Lx);
  if (xw < 0.0) xw += g.Lx;
  const double s = xw / g.dx;
  const int i0 = static_cast<int>(std::floor(s));
  double wx[4];
  cubic_weights_m1(s - static_cast<double>(i0), wx);

  const double rz = zc / g.dz;
  int jc = static_cast<int>(std::floor(rz));
  jc = std::min(std::max(jc, 0), g.nz - 2);
  const int js = std::min(std::max(jc - 1, 0), g.nz - 4);
  double wz[4];
  cubic_weights_0(rz - static_cast<double>(js), wz);

  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    int ix = (i0 - 1 + a) % g.nx;
    if (ix < 0) ix += g.nx;
    const double* col = f.data() + static_cast<std::size_t>(ix) * g.nz + js;
    const double colv = wz[0] * col[0] + wz[1] * col[1] + wz[2] * col[2] + wz[3] * col[3];
    acc += wx[a] * colv;
  }
  return acc;
}

std::vector<double> interpolate(const ScalarField& f,
                                const std::vector<std::pair<double, double>>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(interpolate(f, p.first, p.second));
  return out;
}

double integrate(const ScalarField& f) {
  const Grid2D& g = f.grid();
  const auto& k = kernels::ops();
  const double full = k.sum(f.data(), f.size());
  std::vector<double> row(g.nx);
  for (int ix = 0; ix < g.nx; ++ix) row[ix] = f.at(ix, 0);
  const double bot = k.sum(row.data(), row.size());
  for (int ix = 0; ix < g.nx; ++ix) row[ix] = f.at(ix, g.nz - 1);
  const double top = k.sum(row.data(), row.size());
  return g.dx * g.dz * (full - 0.5 * (bot + top));
}

void dealias_23(ScalarField& f) { SpectralEngine::shared(f.grid()).dealias_23(f); }

}  // namespace slicekit::grid_ops
