#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <random>
#include <vector>

#include "slicekit/kernels.hpp"

using namespace slicekit;

namespace {

std::vector<double> randv(unsigned seed, std::size_t n, double lo = -3.0,
                          double hi = 3.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

// Sizes straddling the 4-lane vector width, including the unaligned tail.
const std::size_t kSizes[] = {1, 3, 4, 5, 8, 15, 16, 17, 64, 67, 1024, 1031};

}  // namespace

TEST_CASE("isa names are stable strings") {
  CHECK(std::string(kernels::isa_name(kernels::Isa::scalar)) == "scalar");
  CHECK(std::string(kernels::isa_name(kernels::Isa::avx2)) == "avx2");
}

TEST_CASE("runtime table is one of the two implementations") {
  const kernels::Ops& active = kernels::ops();
  const kernels::Ops& sc = kernels::scalar_ops();
  const kernels::Ops* vec = kernels::avx2_ops();
  const bool is_scalar = active.add_scaled == sc.add_scaled;
  const bool is_avx2 = vec && active.add_scaled == vec->add_scaled;
  CHECK((is_scalar || is_avx2));
  if (kernels::active_isa() == kernels::Isa::avx2) CHECK(is_avx2);
  if (kernels::active_isa() == kernels::Isa::scalar) CHECK(is_scalar);
}

TEST_CASE("scalar and avx2 kernels agree bit for bit") {
  const kernels::Ops* vec = kernels::avx2_ops();
  if (!vec) return;  // host without AVX2: dispatch already covered above
  const kernels::Ops& sc = kernels::scalar_ops();

  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto x = randv(17 + unsigned(n), n);
    const auto y = randv(31 + unsigned(n), n);
    const auto z = randv(47 + unsigned(n), n);
    const auto w = randv(59 + unsigned(n), n);
    const auto u = randv(71 + unsigned(n), n);
    std::vector<double> a(n), b(n);

    sc.add_scaled(a.data(), x.data(), 1.7, y.data(), n);
    vec->add_scaled(b.data(), x.data(), 1.7, y.data(), n);
    CHECK(a == b);

    sc.axpby(a.data(), 0.3, x.data(), -2.1, y.data(), n);
    vec->axpby(b.data(), 0.3, x.data(), -2.1, y.data(), n);
    CHECK(a == b);

    sc.scale(a.data(), -0.77, x.data(), n);
    vec->scale(b.data(), -0.77, x.data(), n);
    CHECK(a == b);

    sc.hadamard(a.data(), x.data(), y.data(), n);
    vec->hadamard(b.data(), x.data(), y.data(), n);
    CHECK(a == b);

    sc.dot2(a.data(), x.data(), y.data(), z.data(), w.data(), n);
    vec->dot2(b.data(), x.data(), y.data(), z.data(), w.data(), n);
    CHECK(a == b);

    sc.comb4(a.data(), x.data(), 0.5, y.data(), 0.25, z.data(), -0.125,
             w.data(), 2.0, u.data(), n);
    vec->comb4(b.data(), x.data(), 0.5, y.data(), 0.25, z.data(), -0.125,
               w.data(), 2.0, u.data(), n);
    CHECK(a == b);

    CHECK(sc.sum(x.data(), n) == vec->sum(x.data(), n));
    CHECK(sc.max_abs(x.data(), n) == vec->max_abs(x.data(), n));
  }
}

TEST_CASE("ddz stencil matches a direct loop on both tables") {
  const std::size_t nx = 11, nz = 9;
  const double dz = 0.37;
  const auto src = randv(101, nx * nz);

  // centered interior, one-sided second-order rows at the walls
  std::vector<double> want(nx * nz);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double* c = src.data() + ix * nz;
    double* o = want.data() + ix * nz;
    o[0] = (-3.0 * c[0] + 4.0 * c[1] - c[2]) / (2.0 * dz);
    for (std::size_t iz = 1; iz + 1 < nz; ++iz)
      o[iz] = (c[iz + 1] - c[iz - 1]) / (2.0 * dz);
    o[nz - 1] = (3.0 * c[nz - 1] - 4.0 * c[nz - 2] + c[nz - 3]) / (2.0 * dz);
  }

  std::vector<double> got(nx * nz);
  kernels::scalar_ops().ddz(got.data(), src.data(), nx, nz, 1.0 / (2.0 * dz));
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));

  if (const kernels::Ops* vec = kernels::avx2_ops()) {
    std::vector<double> got2(nx * nz);
    vec->ddz(got2.data(), src.data(), nx, nz, 1.0 / (2.0 * dz));
    CHECK(got == got2);
  }
}

TEST_CASE("reductions use the documented lane order") {
  // 4-lane blocked accumulation, lanes combined (0+2)+(1+3): check against
  // an explicit reimplementation rather than a sequential sum.
  const std::size_t n = 23;
  const auto x = randv(7, n, 0.1, 1.0);
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) lane[l] += x[i + l];
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  const double want = (lane[0] + lane[2]) + (lane[1] + lane[3]) + tail;
  CHECK(kernels::scalar_ops().sum(x.data(), n) == want);
}

TEST_CASE("sum propagates NaN and max_abs ignores sign") {
  std::vector<double> v = {1.0, -5.0, 2.0};
  CHECK(kernels::ops().max_abs(v.data(), v.size()) == 5.0);
  v[1] = std::numeric_limits<double>::quiet_NaN();
  const double s = kernels::ops().sum(v.data(), v.size());
  CHECK(s != s);
}
