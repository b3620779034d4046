#include "slicekit/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "slicekit/errors.hpp"

namespace slicekit {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Dense LU with partial pivoting; used for the small per-wavenumber
// interior systems of the solenoidal projection.
struct DenseLU {
  int n = 0;
  std::vector<double> a;  // column-major LU factors
  std::vector<int> piv;

  void factor(std::vector<double> m, int dim) {
    n = dim;
    a = std::move(m);
    piv.resize(n);
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::fabs(a[k + k * n]);
      for (int i = k + 1; i < n; ++i) {
        const double v = std::fabs(a[i + k * n]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best == 0.0)
        throw NumericsError("projection: singular interior system");
      piv[k] = p;
      if (p != k)
        for (int j = 0; j < n; ++j) std::swap(a[k + j * n], a[p + j * n]);
      const double inv = 1.0 / a[k + k * n];
      for (int i = k + 1; i < n; ++i) {
        const double l = a[i + k * n] * inv;
        a[i + k * n] = l;
        for (int j = k + 1; j < n; ++j) a[i + j * n] -= l * a[k + j * n];
      }
    }
  }

  void solve(double* b) const {
    for (int k = 0; k < n; ++k) {
      if (piv[k] != k) std::swap(b[k], b[piv[k]]);
      for (int i = k + 1; i < n; ++i) b[i] -= a[i + k * n] * b[k];
    }
    for (int k = n - 1; k >= 0; --k) {
      b[k] /= a[k + k * n];
      for (int i = 0; i < k; ++i) b[i] -= a[i + k * n] * b[k];
    }
  }
};

}  // namespace

struct SpectralEngine::Impl {
  int nx, nz, nk;
  double Lx, H, dz;
  double* rbuf = nullptr;        // nx*nz real scratch
  fftw_complex* cbuf = nullptr;  // nk*nz spectral scratch
  fftw_complex* cbuf2 = nullptr; // second spectral scratch (vector fields)
  double* r1 = nullptr;          // nx real scratch (lid rows)
  fftw_complex* c1 = nullptr;    // nk spectral scratch
  fftw_plan fwd = nullptr, bwd = nullptr, bwd2 = nullptr;
  fftw_plan fwd1 = nullptr;
  std::vector<DenseLU> interior_lu;  // per wavenumber m = 1..nx/2

  ~Impl() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (bwd2) fftw_destroy_plan(bwd2);
    if (fwd1) fftw_destroy_plan(fwd1);
    fftw_free(rbuf);
    fftw_free(cbuf);
    fftw_free(cbuf2);
    fftw_free(r1);
    fftw_free(c1);
  }
};

SpectralEngine::SpectralEngine(const Grid2D& g) : g_(g), impl_(new Impl) {
  Impl& im = *impl_;
  im.nx = g.nx;
  im.nz = g.nz;
  im.nk = g.nx / 2 + 1;
  im.Lx = g.Lx;
  im.H = g.H;
  im.dz = g.dz;
  im.rbuf = fftw_alloc_real(g.size());
  im.cbuf = fftw_alloc_complex(static_cast<std::size_t>(im.nk) * im.nz);
  im.cbuf2 = fftw_alloc_complex(static_cast<std::size_t>(im.nk) * im.nz);
  im.r1 = fftw_alloc_real(im.nx);
  im.c1 = fftw_alloc_complex(im.nk);

  std::lock_guard<std::mutex> lock(plan_mutex());
  const int n[1] = {im.nx};
  im.fwd = fftw_plan_many_dft_r2c(1, n, im.nz, im.rbuf, nullptr, im.nz, 1,
                                  im.cbuf, nullptr, im.nz, 1, FFTW_ESTIMATE);
  im.bwd = fftw_plan_many_dft_c2r(1, n, im.nz, im.cbuf, nullptr, im.nz, 1,
                                  im.rbuf, nullptr, im.nz, 1, FFTW_ESTIMATE);
  im.bwd2 = fftw_plan_many_dft_c2r(1, n, im.nz, im.cbuf2, nullptr, im.nz, 1,
                                   im.rbuf, nullptr, im.nz, 1, FFTW_ESTIMATE);
  im.fwd1 = fftw_plan_dft_r2c_1d(im.nx, im.r1, im.c1, FFTW_ESTIMATE);
  if (!im.fwd || !im.bwd || !im.bwd2 || !im.fwd1)
    throw NumericsError("spectral: FFT plan creation failed");
}

SpectralEngine::~SpectralEngine() = default;

namespace {

// Vertical first-derivative stencil applied to one complex spectral column
// (contiguous nz entries): centered interior, one-sided second-order ends.
void ddz_column(const fftw_complex* c, fftw_complex* d, int nz, double inv2dz) {
  d[0][0] = (-3.0 * c[0][0] + 4.0 * c[1][0] - c[2][0]) * inv2dz;
  d[0][1] = (-3.0 * c[0][1] + 4.0 * c[1][1] - c[2][1]) * inv2dz;
  for (int j = 1; j + 1 < nz; ++j) {
    d[j][0] = (c[j + 1][0] - c[j - 1][0]) * inv2dz;
    d[j][1] = (c[j + 1][1] - c[j - 1][1]) * inv2dz;
  }
  d[nz - 1][0] =
      (3.0 * c[nz - 1][0] - 4.0 * c[nz - 2][0] + c[nz - 3][0]) * inv2dz;
  d[nz - 1][1] =
      (3.0 * c[nz - 1][1] - 4.0 * c[nz - 2][1] + c[nz - 3][1]) * inv2dz;
}

}  // namespace

void SpectralEngine::ddx(ScalarField& dst, const ScalarField& src) {
  require_same_grid(g_, src.grid());
  Impl& im = *impl_;
  std::memcpy(im.rbuf, src.data(), sizeof(double) * g_.size());
  fftw_execute(im.fwd);
  const double twopi = 2.0 * std::numbers::pi;
  for (int m = 0; m < im.nk; ++m) {
    // Nyquist mode of an odd-order derivative is dropped.
    const double k = (m == im.nx / 2) ? 0.0 : twopi * m / im.Lx;
    const double fac = k / im.nx;
    fftw_complex* col = im.cbuf + static_cast<std::size_t>(m) * im.nz;
    for (int j = 0; j < im.nz; ++j) {
      const double re = col[j][0], imag = col[j][1];
      col[j][0] = -fac * imag;
      col[j][1] = fac * re;
    }
  }
  fftw_execute(im.bwd);
  std::memcpy(dst.data(), im.rbuf, sizeof(double) * g_.size());
}

void SpectralEngine::d2dx2(ScalarField& dst, const ScalarField& src) {
  require_same_grid(g_, src.grid());
  Impl& im = *impl_;
  std::memcpy(im.rbuf, src.data(), sizeof(double) * g_.size());
  fftw_execute(im.fwd);
  const double twopi = 2.0 * std::numbers::pi;
  for (int m = 0; m < im.nk; ++m) {
    const double k = twopi * m / im.Lx;
    const double fac = -k * k / im.nx;
    fftw_complex* col = im.cbuf + static_cast<std::size_t>(m) * im.nz;
    for (int j = 0; j < im.nz; ++j) {
      col[j][0] *= fac;
      col[j][1] *= fac;
    }
  }
  fftw_execute(im.bwd);
  std::memcpy(dst.data(), im.rbuf, sizeof(double) * g_.size());
}

ScalarField SpectralEngine::poisson_neumann(const ScalarField& rhs,
                                            const std::vector<double>& nb,
                                            const std::vector<double>& nt,
                                            double compat_rel_tol) {
  require_same_grid(g_, rhs.grid());
  if (static_cast<int>(nb.size()) != g_.nx || static_cast<int>(nt.size()) != g_.nx)
    throw GridMismatchError("poisson: Neumann data length must equal nx");
  Impl& im = *impl_;
  const int nz = im.nz;
  const double dz = im.dz;
  const double inv_dz2 = 1.0 / (dz * dz);

  std::memcpy(im.rbuf, rhs.data(), sizeof(double) * g_.size());
  fftw_execute(im.fwd);

  // Lid data spectra.
  std::vector<double> nbr(im.nk), nbi(im.nk), ntr(im.nk), nti(im.nk);
  std::memcpy(im.r1, nb.data(), sizeof(double) * im.nx);
  fftw_execute(im.fwd1);
  for (int m = 0; m < im.nk; ++m) {
    nbr[m] = im.c1[m][0];
    nbi[m] = im.c1[m][1];
  }
  std::memcpy(im.r1, nt.data(), sizeof(double) * im.nx);
  fftw_execute(im.fwd1);
  for (int m = 0; m < im.nk; ++m) {
    ntr[m] = im.c1[m][0];
    nti[m] = im.c1[m][1];
  }

  // Compatibility of the x-mean mode: trapz(rhs) must equal nt - nb.
  {
    const fftw_complex* col = im.cbuf;
    double trapz = 0.5 * col[0][0] + 0.5 * col[nz - 1][0];
    for (int j = 1; j + 1 < nz; ++j) trapz += col[j][0];
    trapz *= dz / im.nx;
    const double flux = (ntr[0] - nbr[0]) / im.nx;
    const double defect = trapz - flux;
    const double scale =
        std::max({im.H * rhs.max_abs(), std::fabs(flux), 1e-300});
    if (std::fabs(defect) > compat_rel_tol * scale)
      throw NumericsError(
          "poisson: incompatible Neumann data, relative defect " +
          std::to_string(defect / scale));
  }

  const double twopi = 2.0 * std::numbers::pi;
  std::vector<double> dl(nz), dd(nz), du(nz);
  std::vector<double> wr(nz), wi(nz);

  for (int m = 0; m < im.nk; ++m) {
    fftw_complex* col = im.cbuf + static_cast<std::size_t>(m) * im.nz;
    const double k = twopi * m / im.Lx;
    const double k2 = k * k;
    if (m == 0) {
      // Singular mean mode: pin p[0] = 0, solve rows 1..nz-1.
      // Interior row j: (p[j-1] - 2 p[j] + p[j+1])/dz^2 = R[j]
      // Top row: (2 p[nz-2] - 2 p[nz-1])/dz^2 = R[nz-1] - 2 nt/dz
      const int n = nz - 1;
      for (int j = 0; j < n; ++j) {
        dl[j] = inv_dz2;
        dd[j] = -2.0 * inv_dz2;
        du[j] = inv_dz2;
        const int row = j + 1;
        wr[j] = col[row][0];
        wi[j] = col[row][1];
      }
      dl[n - 1] = 2.0 * inv_dz2;
      wr[n - 1] -= 2.0 * ntr[0] / dz;
      wi[n - 1] -= 2.0 * nti[0] / dz;
      // Thomas elimination.
      for (int j = 1; j < n; ++j) {
        const double w = dl[j] / dd[j - 1];
        dd[j] -= w * du[j - 1];
        wr[j] -= w * wr[j - 1];
        wi[j] -= w * wi[j - 1];
      }
      wr[n - 1] /= dd[n - 1];
      wi[n - 1] /= dd[n - 1];
      for (int j = n - 2; j >= 0; --j) {
        wr[j] = (wr[j] - du[j] * wr[j + 1]) / dd[j];
        wi[j] = (wi[j] - du[j] * wi[j + 1]) / dd[j];
      }
      col[0][0] = 0.0;
      col[0][1] = 0.0;
      for (int j = 1; j < nz; ++j) {
        col[j][0] = wr[j - 1];
        col[j][1] = wi[j - 1];
      }
    } else {
      // Ghost-node Neumann closure at both lids.
      for (int j = 0; j < nz; ++j) {
        dl[j] = inv_dz2;
        dd[j] = -2.0 * inv_dz2 - k2;
        du[j] = inv_dz2;
        wr[j] = col[j][0];
        wi[j] = col[j][1];
      }
      du[0] = 2.0 * inv_dz2;
      dl[nz - 1] = 2.0 * inv_dz2;
      wr[0] += 2.0 * nbr[m] / dz;
      wi[0] += 2.0 * nbi[m] / dz;
      wr[nz - 1] -= 2.0 * ntr[m] / dz;
      wi[nz - 1] -= 2.0 * nti[m] / dz;
      for (int j = 1; j < nz; ++j) {
        const double w = dl[j] / dd[j - 1];
        dd[j] -= w * du[j - 1];
        wr[j] -= w * wr[j - 1];
        wi[j] -= w * wi[j - 1];
      }
      wr[nz - 1] /= dd[nz - 1];
      wi[nz - 1] /= dd[nz - 1];
      for (int j = nz - 2; j >= 0; --j) {
        wr[j] = (wr[j] - du[j] * wr[j + 1]) / dd[j];
        wi[j] = (wi[j] - du[j] * wi[j + 1]) / dd[j];
      }
      for (int j = 0; j < nz; ++j) {
        col[j][0] = wr[j];
        col[j][1] = wi[j];
      }
    }
    // Fold in the inverse-transform normalization.
    for (int j = 0; j < nz; ++j) {
      col[j][0] /= im.nx;
      col[j][1] /= im.nx;
    }
  }

  fftw_execute(im.bwd);
  ScalarField p(g_);
  std::memcpy(p.data(), im.rbuf, sizeof(double) * g_.size());

  // Zero-mean gauge over the trapezoid-z / rectangle-x quadrature.
  double mean = 0.0;
  for (int ix = 0; ix < g_.nx; ++ix) {
    const double* c = p.data() + g_.idx(ix, 0);
    double colsum = 0.5 * c[0] + 0.5 * c[nz - 1];
    for (int j = 1; j + 1 < nz; ++j) colsum += c[j];
    mean += colsum;
  }
  mean *= g_.dx * g_.dz / (g_.Lx * g_.H);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= mean;
  return p;
}

void SpectralEngine::solenoidal_project(VectorField2& u) {
  require_same_grid(g_, u.grid());
  Impl& im = *impl_;
  const int nz = im.nz;
  const double inv2dz = 1.0 / (2.0 * im.dz);
  const double twopi = 2.0 * std::numbers::pi;

  if (im.interior_lu.empty()) {
    // Build Dz^2 once (dense), factor k^2 I - Dz^2 interior blocks.
    const int n = nz;
    std::vector<double> D(n * n, 0.0);  // column-major
    auto at = [n](std::vector<double>& mat, int r, int c) -> double& {
      return mat[r + c * n];
    };
    for (int j = 1; j + 1 < n; ++j) {
      at(D, j, j - 1) = -inv2dz;
      at(D, j, j + 1) = inv2dz;
    }
    at(D, 0, 0) = -3.0 * inv2dz;
    at(D, 0, 1) = 4.0 * inv2dz;
    at(D, 0, 2) = -inv2dz;
    at(D, n - 1, n - 1) = 3.0 * inv2dz;
    at(D, n - 1, n - 2) = -4.0 * inv2dz;
    at(D, n - 1, n - 3) = inv2dz;
    std::vector<double> D2(n * n, 0.0);
    for (int c = 0; c < n; ++c)
      for (int k = 0; k < n; ++k) {
        const double v = D[k + c * n];
        if (v == 0.0) continue;
        for (int r = 0; r < n; ++r) D2[r + c * n] += D[r + k * n] * v;
      }
    im.interior_lu.resize(im.nk);
    const int ni = nz - 2;
    for (int m = 1; m < im.nk; ++m) {
      const double k = twopi * m / im.Lx;
      std::vector<double> A(ni * ni);
      for (int c = 0; c < ni; ++c)
        for (int r = 0; r < ni; ++r)
          A[r + c * ni] =
              (r == c ? k * k : 0.0) - D2[(r + 1) + (c + 1) * n];
      im.interior_lu[m].factor(std::move(A), ni);
    }
  }

  // Forward transforms of both components.
  std::memcpy(im.rbuf, u.x.data(), sizeof(double) * g_.size());
  fftw_execute(im.fwd);
  std::memcpy(im.cbuf2, im.cbuf,
              sizeof(fftw_complex) * static_cast<std::size_t>(im.nk) * nz);
  std::memcpy(im.rbuf, u.z.data(), sizeof(double) * g_.size());
  fftw_execute(im.fwd);
  // cbuf = spectrum of u.z, cbuf2 = spectrum of u.x.

  std::vector<double> psir(nz), psii(nz);
  std::vector<fftw_complex> dcol(nz), psi(nz);

  for (int m = 0; m < im.nk; ++m) {
    fftw_complex* cw = im.cbuf + static_cast<std::size_t>(m) * nz;
    fftw_complex* cu = im.cbuf2 + static_cast<std::size_t>(m) * nz;
    if (m == 0 || m == im.nx / 2) {
      // Mean mode keeps its shear; Nyquist x-derivatives vanish, so only a
      // zero vertical column is divergence-free there. Both drop u.z.
      for (int j = 0; j < nz; ++j) {
        cw[j][0] = 0.0;
        cw[j][1] = 0.0;
      }
      continue;
    }
    const double k = twopi * m / im.Lx;
    // Vorticity: i k w - ddz(u).
    ddz_column(cu, dcol.data(), nz, inv2dz);
    for (int j = 1; j + 1 < nz; ++j) {
      psir[j - 1] = -k * cw[j][1] - dcol[j][0];
      psii[j - 1] = k * cw[j][0] - dcol[j][1];
    }
    const DenseLU& lu = im.interior_lu[m];
    lu.solve(psir.data());
    lu.solve(psii.data());
    // psi with pinned lids.
    psi[0][0] = psi[0][1] = 0.0;
    psi[nz - 1][0] = psi[nz - 1][1] = 0.0;
    for (int j = 1; j + 1 < nz; ++j) {
      psi[j][0] = psir[j - 1];
      psi[j][1] = psii[j - 1];
    }
    // u = ddz(psi), w = -i k psi.
    for (int j = 0; j < nz; ++j) {
      cw[j][0] = k * psi[j][1];
      cw[j][1] = -k * psi[j][0];
    }
    ddz_column(psi.data(), dcol.data(), nz, inv2dz);
    for (int j = 0; j < nz; ++j) {
      cu[j][0] = dcol[j][0];
      cu[j][1] = dcol[j][1];
    }
  }

  const double norm = 1.0 / im.nx;
  for (std::size_t i = 0; i < static_cast<std::size_t>(im.nk) * nz; ++i) {
    im.cbuf[i][0] *= norm;
    im.cbuf[i][1] *= norm;
    im.cbuf2[i][0] *= norm;
    im.cbuf2[i][1] *= norm;
  }
  fftw_execute(im.bwd);
  std::memcpy(u.z.data(), im.rbuf, sizeof(double) * g_.size());
  fftw_execute(im.bwd2);
  std::memcpy(u.x.data(), im.rbuf, sizeof(double) * g_.size());
}

void SpectralEngine::dealias_23(ScalarField& f) {
  Impl& im = *impl_;
  std::memcpy(im.rbuf, f.data(), sizeof(double) * g_.size());
  fftw_execute(im.fwd);
  const int cutoff = im.nx / 3;
  const double norm = 1.0 / im.nx;
  for (int m = 0; m < im.nk; ++m) {
    fftw_complex* col = im.cbuf + static_cast<std::size_t>(m) * im.nz;
    const double fac = (m > cutoff) ? 0.0 : norm;
    for (int j = 0; j < im.nz; ++j) {
      col[j][0] *= fac;
      col[j][1] *= fac;
    }
  }
  fftw_execute(im.bwd);
  std::memcpy(f.data(), im.rbuf, sizeof(double) * g_.size());
}

SpectralEngine& SpectralEngine::shared(const Grid2D& g) {
  using Key = std::tuple<int, int, double, double>;
  thread_local std::map<Key, std::unique_ptr<SpectralEngine>> cache;
  const Key key{g.nx, g.nz, g.Lx, g.H};
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<SpectralEngine>(g)).first;
  return *it->second;
}

}  // namespace slicekit
