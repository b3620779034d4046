#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "slicekit/diagnostics.hpp"
#include "slicekit/errors.hpp"
#include "slicekit/grid_ops.hpp"
#include "slicekit/studies.hpp"

using namespace slicekit;
namespace st = slicekit::studies;

namespace {

const Grid2D g128(128, 33, 1.0e6, 1.0e4);

StageVelocities uniform_stages(const Grid2D& g, double ux, double uz) {
  SliceVelocity v(g);
  for (std::size_t i = 0; i < v.S.x.size(); ++i) {
    v.S.x[i] = ux;
    v.S.z[i] = uz;
  }
  StageVelocities s;
  s.v1 = v;
  s.v2 = v;
  s.v3 = v;
  s.v4 = v;
  return s;
}

}  // namespace

TEST_CASE("energy matches a raw-loop quadrature of the integrand") {
  SliceState s = st::random_state(g128, ModelParams{}, 21);
  const ModelParams& p = s.params;
  ScalarField integrand(g128);
  for (int ix = 0; ix < g128.nx; ++ix)
    for (int iz = 0; iz < g128.nz; ++iz) {
      const double ux = s.velocity.S.x.at(ix, iz);
      const double uz = s.velocity.S.z.at(ix, iz);
      const double ut = s.velocity.T.at(ix, iz);
      const double b = p.gravity / p.theta0 * (g128.z(iz) - 0.5 * g128.H);
      integrand.at(ix, iz) =
          s.density.D.at(ix, iz) *
          (0.5 * (ux * ux + uz * uz + ut * ut) -
           b * s.tracer.theta.at(ix, iz));
    }
  const double want = oracles::integral(g128, integrand);
  CHECK(diagnostics::energy(s) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("basic-state PV is the closed-form constant") {
  InitSpec init;
  init.kind = "eady_basic";
  ModelParams p;
  SliceState s = init_state(init, g128, p);
  ScalarField q = diagnostics::pv_field(s);
  // theta = c z and U = shear (z - H/2) give
  // q = -s dU/dz - f c with D = 1
  const double c = init.N2 * p.theta0 / p.gravity;
  const double shear = -p.gravity * p.s / (p.f * p.theta0);
  const double want = -p.s * shear - p.f * c;
  for (int ix : {0, 31, 64})
    for (int iz : {0, 8, 16, 32})
      CHECK(q.at(ix, iz) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("loops are built inside the domain and reject winding") {
  MaterialLoop lp = diagnostics::make_loop(g128, 0.5e6, 0.5e4, 0.2e6, 0.2e4, 64);
  CHECK(lp.x.size() == 64);
  CHECK(lp.z.size() == 64);
  for (double z : lp.z) {
    CHECK(z > 0.0);
    CHECK(z < g128.H);
  }
  CHECK_THROWS_AS(diagnostics::make_loop(g128, 0.5e6, 0.5e4, 0.8e6, 0.2e4, 64),
                  ConfigError);
  CHECK_THROWS_AS(diagnostics::make_loop(g128, 0.5e6, 0.2e3, 0.2e6, 0.3e4, 64),
                  ConfigError);
}

TEST_CASE("circulation of a gradient integrand vanishes") {
  // with u_T + f x = 0 and u_S = grad chi the closed-loop integral of
  // s grad chi · dl telescopes away up to interpolation error
  ModelParams p;
  SliceState s(g128, p);
  ScalarField chi = st::sample(st::make_harmonics(411, 1.0e6, false), g128);
  VectorField2 gr = grid_ops::grad(chi);
  s.velocity.S = gr;
  s.velocity.T = ScalarField(g128);
  for (int ix = 0; ix < g128.nx; ++ix)
    for (int iz = 0; iz < g128.nz; ++iz)
      s.velocity.T.at(ix, iz) = -p.f * g128.x(ix);
  s.tracer.theta = st::sample(st::make_harmonics(423, 1.0, false), g128);

  MaterialLoop lp = diagnostics::make_loop(g128, 0.4e6, 0.5e4, 0.15e6, 0.2e4, 512);
  const double circ = diagnostics::circulation(s, lp);
  const double scale =
      s.tracer.s * std::max(gr.x.max_abs(), gr.z.max_abs()) * 0.3e6;
  CHECK(std::fabs(circ) <= 1e-4 * std::fabs(scale));
}

TEST_CASE("circulation approaches the analytic line integral") {
  // analytic velocity and temperature sampled on the grid; the oracle
  // integrates the analytic integrand densely along the same ellipse
  ModelParams p;
  const double su = 2.0, kx = 2.0 * M_PI * 2.0 / g128.Lx, mz = M_PI / g128.H;
  auto ux = [&](double x, double z) { return su * std::sin(kx * x) * std::cos(mz * z); };
  auto uz = [&](double x, double z) { return 0.4 * std::cos(kx * x) * std::sin(mz * z); };
  auto ut = [&](double x, double z) { return 1.5 * std::cos(kx * x + 0.4) * std::sin(mz * z) - p.f * x; };
  auto th = [&](double x, double z) {
    return 7.0 * z / g128.H + 0.8 * std::sin(kx * x + 0.1) * std::sin(mz * z);
  };
  auto thdx = [&](double x, double z) { return 0.8 * kx * std::cos(kx * x + 0.1) * std::sin(mz * z); };
  auto thdz = [&](double x, double z) {
    return 7.0 / g128.H + 0.8 * mz * std::sin(kx * x + 0.1) * std::cos(mz * z);
  };

  SliceState s(g128, p);
  s.velocity.S.x = oracles::sample(g128, ux);
  s.velocity.S.z = oracles::sample(g128, uz);
  s.velocity.T = oracles::sample(g128, ut);
  s.tracer.theta = oracles::sample(g128, th);

  const double cx = 0.45e6, cz = 0.52e4, rx = 0.12e6, rz = 0.18e4;
  const double want = oracles::ellipse_integral(
      [&](double x, double z, double tx, double tz) {
        const double gx = (ut(x, z) + p.f * x) * thdx(x, z);
        const double gz = (ut(x, z) + p.f * x) * thdz(x, z);
        return (p.s * ux(x, z) - gx) * tx + (p.s * uz(x, z) - gz) * tz;
      },
      cx, cz, rx, rz);

  double err[2];
  int idx = 0;
  for (int n : {128, 256}) {
    MaterialLoop lp = diagnostics::make_loop(g128, cx, cz, rx, rz, n);
    err[idx++] = std::fabs(diagnostics::circulation(s, lp) - want);
  }
  CHECK(err[1] < err[0]);
  CHECK(oracles::order(err[0], err[1]) >= 1.7);
  CHECK(std::fabs(err[1]) <= 1e-3 * std::fabs(want));
}

TEST_CASE("markers translate exactly under uniform flow") {
  MaterialLoop lp = diagnostics::make_loop(g128, 0.5e6, 0.5e4, 0.1e6, 0.1e4, 32);
  MaterialLoop orig = lp;
  StageVelocities stages = uniform_stages(g128, 3.25, 0.0125);
  diagnostics::advect_loop(lp, stages, 40.0);
  for (std::size_t i = 0; i < lp.x.size(); ++i) {
    CHECK(lp.x[i] == doctest::Approx(orig.x[i] + 3.25 * 40.0).epsilon(1e-13));
    CHECK(lp.z[i] == doctest::Approx(orig.z[i] + 0.0125 * 40.0).epsilon(1e-13));
  }
}

TEST_CASE("marker integration matches an independent particle integrator") {
  // smooth cellular velocity sampled on a fine grid; reference trajectory
  // integrated from the analytic components with the same step count
  const Grid2D g(256, 129, 1.0e6, 1.0e4);
  const double kx = 2.0 * M_PI / g.Lx, mz = M_PI / g.H, A = 80.0;
  auto vx = [&](double x, double z) { return A * mz * 1.0e2 * std::sin(kx * x) * std::cos(mz * z); };
  auto vz = [&](double x, double z) { return -A * kx * 1.0e2 * std::cos(kx * x) * std::sin(mz * z); };
  SliceVelocity v(g);
  v.S.x = oracles::sample(g, vx);
  v.S.z = oracles::sample(g, vz);
  StageVelocities stages;
  stages.v1 = v;
  stages.v2 = v;
  stages.v3 = v;
  stages.v4 = v;

  std::vector<double> x{0.31e6}, z{0.47e4};
  const int steps = 25;
  const double dt = 40.0;
  for (int i = 0; i < steps; ++i) diagnostics::advect_markers(x, z, stages, dt);
  auto [rx, rz] = oracles::rk4_particle(vx, vz, 0.31e6, 0.47e4, dt, steps);
  CHECK(std::fabs(x[0] - rx) <= 2e-5 * g.Lx);
  CHECK(std::fabs(z[0] - rz) <= 2e-5 * g.H);
}

TEST_CASE("marker escaping through a lid raises a numerics error") {
  std::vector<double> x{0.5e6}, z{0.95e4};
  StageVelocities stages = uniform_stages(g128, 0.0, 10.0);
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 100; ++i)
          diagnostics::advect_markers(x, z, stages, 20.0);
      }(),
      NumericsError);
}

TEST_CASE("tracer release is deterministic and carries the local PV") {
  SimConfig cfg = st::conservation_config(128, 33, 20.0, 0.0);
  SliceState s = init_state(cfg.init, cfg.grid, cfg.params);
  TracerSet a = diagnostics::release_tracers(s, 100, 42);
  TracerSet b = diagnostics::release_tracers(s, 100, 42);
  CHECK(a.x == b.x);
  CHECK(a.z == b.z);
  CHECK(a.carried_pv == b.carried_pv);
  TracerSet c = diagnostics::release_tracers(s, 100, 43);
  CHECK(a.x != c.x);
  CHECK(a.x.size() == 100);
  for (double zz : a.z) {
    CHECK(zz >= 0.0);
    CHECK(zz <= g128.H);
  }
  // zero drift at release time
  DriftReport r = diagnostics::pv_tracers(s, a);
  CHECK(r.max_drift == 0.0);
  CHECK(r.rms_drift == 0.0);
}

TEST_CASE("EP residual shrinks under joint dt and grid refinement") {
  auto ep_at = [](int nx, int nz, double dt) {
    SimConfig cfg = st::conservation_config(nx, nz, dt, 0.0);
    SliceState y0 = init_state(cfg.init, cfg.grid, cfg.params);
    SliceState y1 = rk4_step(y0, dt);
    SliceState y2 = rk4_step(y1, dt);
    return diagnostics::ep_residual(y0, y1, y2);
  };
  EpResidual coarse = ep_at(64, 17, 40.0);
  EpResidual fine = ep_at(128, 33, 20.0);
  CHECK(oracles::order(coarse.s_norm, fine.s_norm) >= 1.8);
  CHECK(oracles::order(coarse.t_norm, fine.t_norm) >= 1.8);
}
