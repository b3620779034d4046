// Uniform collocated grid on the periodic-in-x channel [0,Lx) x [0,H],
// and the scalar/vector fields living on it. Storage is x-major: element
// (ix, iz) sits at ix*nz + iz, so each vertical column is contiguous.
#pragma once

#include <cstddef>
#include <vector>

#include "slicekit/errors.hpp"
#include "slicekit/kernels.hpp"

namespace slicekit {

struct Grid2D {
  int nx = 0;
  int nz = 0;
  double Lx = 0.0;
  double H = 0.0;
  double dx = 0.0;  // Lx/nx, no duplicated periodic node
  double dz = 0.0;  // H/(nz-1), lids are nodes

  Grid2D() = default;
  Grid2D(int nx_, int nz_, double Lx_, double H_) : nx(nx_), nz(nz_), Lx(Lx_), H(H_) {
    if (nx < 8 || nx % 2 != 0)
      throw ConfigError("grid: nx must be even and at least 8, got " + std::to_string(nx));
    if (nz < 5)
      throw ConfigError("grid: nz must be at least 5, got " + std::to_string(nz));
    if (!(Lx > 0.0) || !(H > 0.0))
      throw ConfigError("grid: Lx and H must be positive");
    dx = Lx / nx;
    dz = H / (nz - 1);
  }

  std::size_t size() const { return static_cast<std::size_t>(nx) * nz; }
  std::size_t idx(int ix, int iz) const {
    return static_cast<std::size_t>(ix) * nz + iz;
  }
  double x(int ix) const { return ix * dx; }
  double z(int iz) const { return iz * dz; }

  bool operator==(const Grid2D& o) const {
    return nx == o.nx && nz == o.nz && Lx == o.Lx && H == o.H;
  }
  bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

inline void require_same_grid(const Grid2D& a, const Grid2D& b) {
  if (a != b) throw GridMismatchError("fields live on different grids");
}

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid2D& g, double fill = 0.0)
      : grid_(g), v_(g.size(), fill) {}

  const Grid2D& grid() const { return grid_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::size_t size() const { return v_.size(); }

  double& at(int ix, int iz) { return v_[grid_.idx(ix, iz)]; }
  double at(int ix, int iz) const { return v_[grid_.idx(ix, iz)]; }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  double max_abs() const { return kernels::ops().max_abs(v_.data(), v_.size()); }

 private:
  Grid2D grid_;
  std::vector<double> v_;
};

struct VectorField2 {
  ScalarField x;
  ScalarField z;

  VectorField2() = default;
  explicit VectorField2(const Grid2D& g) : x(g), z(g) {}
  const Grid2D& grid() const { return x.grid(); }
};

// Kernel-backed field arithmetic. All binary ops require matching grids.

inline ScalarField add_scaled(const ScalarField& a, double c, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField r(a.grid());
  kernels::ops().add_scaled(r.data(), a.data(), c, b.data(), a.size());
  return r;
}

inline void add_scaled_into(ScalarField& dst, const ScalarField& a, double c,
                            const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  kernels::ops().add_scaled(dst.data(), a.data(), c, b.data(), a.size());
}

inline ScalarField axpby(double a, const ScalarField& x, double b, const ScalarField& y) {
  require_same_grid(x.grid(), y.grid());
  ScalarField r(x.grid());
  kernels::ops().axpby(r.data(), a, x.data(), b, y.data(), x.size());
  return r;
}

inline ScalarField scaled(double a, const ScalarField& x) {
  ScalarField r(x.grid());
  kernels::ops().scale(r.data(), a, x.data(), x.size());
  return r;
}

inline ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField r(a.grid());
  kernels::ops().hadamard(r.data(), a.data(), b.data(), a.size());
  return r;
}

// base + c1 k1 + c2 k2 + c3 k3 + c4 k4 (RK4 combination)
inline ScalarField comb4(const ScalarField& base, double c1, const ScalarField& k1,
                         double c2, const ScalarField& k2, double c3,
                         const ScalarField& k3, double c4, const ScalarField& k4) {
  ScalarField r(base.grid());
  kernels::ops().comb4(r.data(), base.data(), c1, k1.data(), c2, k2.data(), c3,
                       k3.data(), c4, k4.data(), base.size());
  return r;
}

inline bool all_finite(const ScalarField& f) {
  // A blocked sum propagates NaN and saturates to Inf on overflow.
  const double s = kernels::ops().sum(f.data(), f.size());
  return s == s && s < 1e300 && s > -1e300;
}

}  // namespace slicekit
