// AVX2+FMA kernel variants. Element-wise operation order matches the scalar
// reference exactly (vector fma <-> std::fma), so outputs are bit-identical.
#include "slicekit/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace slicekit::kernels {

namespace {

void v_add_scaled(double* dst, const double* x, double a, const double* y,
                  std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(va, vy, vx));
  }
  for (; i < n; ++i) dst[i] = std::fma(a, y[i], x[i]);
}

void v_axpby(double* dst, double a, const double* x, double b, const double* y,
             std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(va, vx, by));
  }
  for (; i < n; ++i) dst[i] = std::fma(a, x[i], b * y[i]);
}

void v_scale(double* dst, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) dst[i] = a * x[i];
}

void v_hadamard(double* dst, const double* x, const double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        dst + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) dst[i] = x[i] * y[i];
}

void v_dot2(double* dst, const double* ax, const double* bx, const double* az,
            const double* bz, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d zz =
        _mm256_mul_pd(_mm256_loadu_pd(az + i), _mm256_loadu_pd(bz + i));
    _mm256_storeu_pd(dst + i,
                     _mm256_fmadd_pd(_mm256_loadu_pd(ax + i),
                                     _mm256_loadu_pd(bx + i), zz));
  }
  for (; i < n; ++i) dst[i] = std::fma(ax[i], bx[i], az[i] * bz[i]);
}

void v_comb4(double* dst, const double* base, double c1, const double* k1,
             double c2, const double* k2, double c3, const double* k3,
             double c4, const double* k4, std::size_t n) {
  const __m256d v1 = _mm256_set1_pd(c1), v2 = _mm256_set1_pd(c2);
  const __m256d v3 = _mm256_set1_pd(c3), v4 = _mm256_set1_pd(c4);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(v1, _mm256_loadu_pd(k1 + i),
                                _mm256_loadu_pd(base + i));
    r = _mm256_fmadd_pd(v2, _mm256_loadu_pd(k2 + i), r);
    r = _mm256_fmadd_pd(v3, _mm256_loadu_pd(k3 + i), r);
    r = _mm256_fmadd_pd(v4, _mm256_loadu_pd(k4 + i), r);
    _mm256_storeu_pd(dst + i, r);
  }
  for (; i < n; ++i) {
    double r = std::fma(c1, k1[i], base[i]);
    r = std::fma(c2, k2[i], r);
    r = std::fma(c3, k3[i], r);
    dst[i] = std::fma(c4, k4[i], r);
  }
}

double v_sum(const double* x, std::size_t n) {
  __m256d vacc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4)
    vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(x + i));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (std::size_t i = n4; i < n; ++i) acc[i - n4] += x[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double v_max_abs(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d vacc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4)
    vacc = _mm256_max_pd(vacc, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (std::size_t i = n4; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (v > acc[i - n4]) acc[i - n4] = v;
  }
  double m02 = acc[0] > acc[2] ? acc[0] : acc[2];
  double m13 = acc[1] > acc[3] ? acc[1] : acc[3];
  return m02 > m13 ? m02 : m13;
}

void v_ddz(double* dst, const double* src, std::size_t nx, std::size_t nz,
           double inv_2dz) {
  const __m256d vh = _mm256_set1_pd(inv_2dz);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double* c = src + ix * nz;
    double* d = dst + ix * nz;
    d[0] = (-3.0 * c[0] + 4.0 * c[1] - c[2]) * inv_2dz;
    std::size_t j = 1;
    for (; j + 4 + 1 <= nz; j += 4) {
      const __m256d hi = _mm256_loadu_pd(c + j + 1);
      const __m256d lo = _mm256_loadu_pd(c + j - 1);
      _mm256_storeu_pd(d + j, _mm256_mul_pd(_mm256_sub_pd(hi, lo), vh));
    }
    for (; j + 1 < nz; ++j) d[j] = (c[j + 1] - c[j - 1]) * inv_2dz;
    d[nz - 1] =
        (3.0 * c[nz - 1] - 4.0 * c[nz - 2] + c[nz - 3]) * inv_2dz;
  }
}

constexpr Ops kAvx2 = {v_add_scaled, v_axpby, v_scale, v_hadamard, v_dot2,
                       v_comb4,      v_sum,   v_max_abs, v_ddz};

}  // namespace

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Ops* avx2_ops() { return avx2_available() ? &kAvx2 : nullptr; }

}  // namespace slicekit::kernels

#else

namespace slicekit::kernels {
bool avx2_available() { return false; }
const Ops* avx2_ops() { return nullptr; }
}  // namespace slicekit::kernels

#endif
