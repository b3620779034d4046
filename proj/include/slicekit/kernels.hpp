// Hot-loop kernels: pointwise field arithmetic, fixed-order reductions, and
// the vertical finite-difference stencil. Two implementations share one
// contract: a scalar reference and an AVX2 variant selected at runtime.
// Both evaluate element-wise in the same operation order (explicit fma in
// the scalar path mirrors the vector fma), so their results are bit-identical
// and runs are reproducible regardless of the dispatch outcome.
#pragma once

#include <cstddef>

namespace slicekit::kernels {

enum class Isa { scalar, avx2 };

struct Ops {
  // dst = x + a*y
  void (*add_scaled)(double* dst, const double* x, double a, const double* y,
                     std::size_t n);
  // dst = a*x + b*y
  void (*axpby)(double* dst, double a, const double* x, double b,
                const double* y, std::size_t n);
  // dst = a*x
  void (*scale)(double* dst, double a, const double* x, std::size_t n);
  // dst = x*y
  void (*hadamard)(double* dst, const double* x, const double* y,
                   std::size_t n);
  // dst = ax*bx + az*bz
  void (*dot2)(double* dst, const double* ax, const double* bx,
               const double* az, const double* bz, std::size_t n);
  // dst = base + c1*k1 + c2*k2 + c3*k3 + c4*k4
  void (*comb4)(double* dst, const double* base, double c1, const double* k1,
                double c2, const double* k2, double c3, const double* k3,
                double c4, const double* k4, std::size_t n);
  // Reductions, 4-lane blocked accumulation, lanes combined (0+2)+(1+3).
  double (*sum)(const double* x, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // Vertical derivative on x-major storage (column iz-contiguous):
  // centered interior, one-sided second-order rows at iz = 0 and nz-1.
  void (*ddz)(double* dst, const double* src, std::size_t nx, std::size_t nz,
              double inv_2dz);
};

// Runtime-selected table. Honors SLICEKIT_SIMD=scalar|avx2|auto (default auto).
const Ops& ops();
Isa active_isa();
const char* isa_name(Isa isa);

// Explicit tables for equivalence tests.
const Ops& scalar_ops();
bool avx2_available();
const Ops* avx2_ops();  // nullptr when unavailable

}  // namespace slicekit::kernels
