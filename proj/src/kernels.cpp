#include "slicekit/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace slicekit::kernels {

namespace {

void s_add_scaled(double* dst, const double* x, double a, const double* y,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::fma(a, y[i], x[i]);
}

void s_axpby(double* dst, double a, const double* x, double b, const double* y,
             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::fma(a, x[i], b * y[i]);
}

void s_scale(double* dst, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a * x[i];
}

void s_hadamard(double* dst, const double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = x[i] * y[i];
}

void s_dot2(double* dst, const double* ax, const double* bx, const double* az,
            const double* bz, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = std::fma(ax[i], bx[i], az[i] * bz[i]);
}

void s_comb4(double* dst, const double* base, double c1, const double* k1,
             double c2, const double* k2, double c3, const double* k3,
             double c4, const double* k4, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double r = std::fma(c1, k1[i], base[i]);
    r = std::fma(c2, k2[i], r);
    r = std::fma(c3, k3[i], r);
    dst[i] = std::fma(c4, k4[i], r);
  }
}

double s_sum(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc[0] += x[i];
    acc[1] += x[i + 1];
    acc[2] += x[i + 2];
    acc[3] += x[i + 3];
  }
  for (std::size_t i = n4; i < n; ++i) acc[i - n4] += x[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double s_max_abs(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double v = std::fabs(x[i + l]);
      if (v > acc[l]) acc[l] = v;
    }
  }
  for (std::size_t i = n4; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (v > acc[i - n4]) acc[i - n4] = v;
  }
  double m02 = acc[0] > acc[2] ? acc[0] : acc[2];
  double m13 = acc[1] > acc[3] ? acc[1] : acc[3];
  return m02 > m13 ? m02 : m13;
}

void s_ddz(double* dst, const double* src, std::size_t nx, std::size_t nz,
           double inv_2dz) {
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double* c = src + ix * nz;
    double* d = dst + ix * nz;
    d[0] = (-3.0 * c[0] + 4.0 * c[1] - c[2]) * inv_2dz;
    for (std::size_t j = 1; j + 1 < nz; ++j)
      d[j] = (c[j + 1] - c[j - 1]) * inv_2dz;
    d[nz - 1] =
        (3.0 * c[nz - 1] - 4.0 * c[nz - 2] + c[nz - 3]) * inv_2dz;
  }
}

constexpr Ops kScalar = {s_add_scaled, s_axpby, s_scale, s_hadamard, s_dot2,
                         s_comb4,      s_sum,   s_max_abs, s_ddz};

const Ops& select() {
  const char* env = std::getenv("SLICEKIT_SIMD");
  const bool force_scalar = env && std::strcmp(env, "scalar") == 0;
  const bool force_avx2 = env && std::strcmp(env, "avx2") == 0;
  if (!force_scalar) {
    if (const Ops* v = avx2_ops()) return *v;
    if (force_avx2) return kScalar;  // requested but unavailable: fall back
  }
  return kScalar;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }

const Ops& ops() {
  static const Ops& chosen = select();
  return chosen;
}

Isa active_isa() { return &ops() == &kScalar ? Isa::scalar : Isa::avx2; }

const char* isa_name(Isa isa) {
  return isa == Isa::scalar ? "scalar" : "avx2";
}

#if !defined(SLICEKIT_HAVE_AVX2_BUILD)
bool avx2_available() { return false; }
const Ops* avx2_ops() { return nullptr; }
#endif

}  // namespace slicekit::kernels
