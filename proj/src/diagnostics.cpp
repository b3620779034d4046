#include "slicekit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>

#include "slicekit/errors.hpp"
#include "slicekit/grid_ops.hpp"
#include "slicekit/kernels.hpp"

namespace slicekit::diagnostics {

namespace {

double wrap_half(double d, double Lx) { return d - Lx * std::round(d / Lx); }

}  // namespace

double energy(const SliceState& state) {
  const Grid2D& g = state.grid();
  const auto& k = kernels::ops();
  ScalarField e(g);
  k.dot2(e.data(), state.velocity.S.x.data(), state.velocity.S.x.data(),
         state.velocity.S.z.data(), state.velocity.S.z.data(), g.size());
  ScalarField b = buoyancy_factor(g, state.params);
  const double* ut = state.velocity.T.data();
  const double* th = state.tracer.theta.data();
  for (std::size_t i = 0; i < g.size(); ++i)
    e[i] = 0.5 * (e[i] + ut[i] * ut[i]) - b[i] * th[i];
  k.hadamard(e.data(), e.data(), state.density.D.data(), g.size());
  return grid_ops::integrate(e);
}

ScalarField pv_field(const SliceState& state) {
  const Grid2D& g = state.grid();
  const auto& k = kernels::ops();
  const double s = state.tracer.s;
  const double f = state.params.f;

  ScalarField pdu = grid_ops::perp_div(state.velocity.S);
  VectorField2 gth = grid_ops::grad(state.tracer.theta);
  VectorField2 flux(g);
  k.hadamard(flux.x.data(), state.velocity.T.data(), gth.x.data(), g.size());
  k.hadamard(flux.z.data(), state.velocity.T.data(), gth.z.data(), g.size());
  ScalarField pdf = grid_ops::perp_div(flux);
  ScalarField dzth = grid_ops::ddz(state.tracer.theta);

  ScalarField q(g);
  const double* D = state.density.D.data();
  for (std::size_t i = 0; i < g.size(); ++i)
    q[i] = (s * pdu[i] - pdf[i] - f * dzth[i]) / D[i];
  return q;
}

MaterialLoop make_loop(const Grid2D& g, double cx, double cz, double rx,
                       double rz, int n) {
  if (n < 3) throw ConfigError("loop: need at least 3 markers");
  if (!(rx > 0.0) || !(rz > 0.0)) throw ConfigError("loop: radii must be > 0");
  if (!(cz - rz > 0.0) || !(cz + rz < g.H))
    throw ConfigError("loop: must sit strictly between the lids");
  if (!(rx < 0.45 * g.Lx))
    throw ConfigError("loop: x-radius too large for a zero-winding loop");
  MaterialLoop loop;
  loop.x.resize(n);
  loop.z.resize(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    loop.x[i] = cx + rx * std::cos(a);
    loop.z[i] = cz + rz * std::sin(a);
  }
  return loop;
}

double circulation(const SliceState& state, const MaterialLoop& loop) {
  const Grid2D& g = state.grid();
  const std::size_t n = loop.x.size();
  if (n < 3 || loop.z.size() != n)
    throw ConfigError("circulation: malformed loop");

  // Interior segments use the stored unwrapped x; the closing segment takes
  // the nearest periodic image. Any net transit around the channel makes
  // the f x term multivalued.
  double total = wrap_half(loop.x[0] - loop.x[n - 1], g.Lx);
  for (std::size_t i = 0; i + 1 < n; ++i) total += loop.x[i + 1] - loop.x[i];
  const long winding = std::lround(total / g.Lx);
  if (winding != 0)
    throw NumericsError("circulation: loop winds around the channel");

  const double s = state.tracer.s;
  const double f = state.params.f;
  VectorField2 gth = grid_ops::grad(state.tracer.theta);

  std::vector<double> Gx(n), Gz(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = loop.x[i];
    const double z = loop.z[i];
    const double ux = grid_ops::interpolate(state.velocity.S.x, x, z);
    const double uz = grid_ops::interpolate(state.velocity.S.z, x, z);
    const double mt = grid_ops::interpolate(state.velocity.T, x, z) + f * x;
    const double tx = grid_ops::interpolate(gth.x, x, z);
    const double tz = grid_ops::interpolate(gth.z, x, z);
    Gx[i] = s * ux - mt * tx;
    Gz[i] = s * uz - mt * tz;
  }

  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1 == n) ? 0 : i + 1;
    const double dx = (i + 1 == n) ? wrap_half(loop.x[0] - loop.x[n - 1], g.Lx)
                                   : loop.x[j] - loop.x[i];
    const double dz = loop.z[j] - loop.z[i];
    c += 0.5 * ((Gx[i] + Gx[j]) * dx + (Gz[i] + Gz[j]) * dz);
  }
  return c;
}

void advect_markers(std::vector<double>& x, std::vector<double>& z,
                    const StageVelocities& stages, double dt) {
  if (x.size() != z.size()) throw ConfigError("markers: length mismatch");
  const SliceVelocity* v[4] = {&stages.v1, &stages.v2, &stages.v3, &stages.v4};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double kx[4], kz[4];
    double px = x[i], pz = z[i];
    for (int st = 0; st < 4; ++st) {
      kx[st] = grid_ops::interpolate(v[st]->S.x, px, pz);
      kz[st] = grid_ops::interpolate(v[st]->S.z, px, pz);
      const double h = (st < 2) ? 0.5 * dt : dt;
      if (st < 3) {
        px = x[i] + h * kx[st];
        pz = z[i] + h * kz[st];
      }
    }
    x[i] += dt / 6.0 * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3]);
    z[i] += dt / 6.0 * (kz[0] + 2.0 * kz[1] + 2.0 * kz[2] + kz[3]);
  }
}

void advect_loop(MaterialLoop& loop, const StageVelocities& stages, double dt) {
  advect_markers(loop.x, loop.z, stages, dt);
}

TracerSet release_tracers(const SliceState& state, int count, unsigned seed) {
  if (count < 1) throw ConfigError("tracers: count must be >= 1");
  const Grid2D& g = state.grid();
  TracerSet ts;
  ts.x.resize(count);
  ts.z.resize(count);
  std::mt19937 gen(seed);
  auto u01 = [&gen]() { return gen() * (1.0 / 4294967296.0); };
  for (int i = 0; i < count; ++i) {
    ts.x[i] = g.Lx * u01();
    ts.z[i] = g.H * (0.1 + 0.8 * u01());  // off the lids by construction
  }
  ScalarField q = pv_field(state);
  ts.carried_pv.resize(count);
  for (int i = 0; i < count; ++i)
    ts.carried_pv[i] = grid_ops::interpolate(q, ts.x[i], ts.z[i]);
  double qmin = q[0], qmax = q[0];
  for (std::size_t i = 1; i < q.size(); ++i) {
    qmin = std::min(qmin, q[i]);
    qmax = std::max(qmax, q[i]);
  }
  ts.pv_range0 = qmax - qmin;
  return ts;
}

DriftReport pv_tracers(const SliceState& state, const TracerSet& tracers) {
  ScalarField q = pv_field(state);
  DriftReport r;
  double sq = 0.0;
  const std::size_t n = tracers.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d =
        std::fabs(grid_ops::interpolate(q, tracers.x[i], tracers.z[i]) -
                  tracers.carried_pv[i]);
    r.max_drift = std::max(r.max_drift, d);
    sq += d * d;
  }
  r.rms_drift = (n > 0) ? std::sqrt(sq / static_cast<double>(n)) : 0.0;
  return r;
}

EpResidual ep_residual(const SliceState& before, const SliceState& mid,
                       const SliceState& after) {
  const Grid2D& g = mid.grid();
  require_same_grid(g, before.grid());
  require_same_grid(g, after.grid());
  const double dt1 = mid.time - before.time;
  const double dt2 = after.time - mid.time;
  if (!(dt1 > 0.0) || !(dt2 > 0.0) ||
      std::fabs(dt1 - dt2) > 1e-9 * std::max(dt1, dt2))
    throw ConfigError("ep_residual: snapshots must be equally spaced in time");
  const double inv2dt = 1.0 / (after.time - before.time);
  const auto& k = kernels::ops();

  VarDerivs vd = eb_var_derivs(mid);
  const VectorField2& u = mid.velocity.S;
  const ScalarField& ut = mid.velocity.T;
  const double f = mid.params.f;
  const double s = mid.tracer.s;

  // The f x part of dl/dD is non-periodic; its gradient combines with
  // m_T grad(u_T) analytically into u_T grad(u_T) - f u_T in x.
  ScalarField dldD_safe = vd.dldD;
  for (int ix = 0; ix < g.nx; ++ix) {
    const double fx = f * g.x(ix);
    for (int iz = 0; iz < g.nz; ++iz) dldD_safe.at(ix, iz) -= fx * ut.at(ix, iz);
  }

  VectorField2 gux = grid_ops::grad(vd.m_S.x);
  VectorField2 guz = grid_ops::grad(vd.m_S.z);
  ScalarField trans_x = grid_ops::advect(u, vd.m_S.x);
  ScalarField trans_z = grid_ops::advect(u, vd.m_S.z);
  VectorField2 gT = grid_ops::grad(ut);
  VectorField2 gth = grid_ops::grad(mid.tracer.theta);
  VectorField2 gd = grid_ops::grad(dldD_safe);
  ScalarField advT = grid_ops::advect(u, ut);

  ScalarField dt_ux(g), dt_uz(g), dt_ut(g);
  k.axpby(dt_ux.data(), inv2dt, after.velocity.S.x.data(), -inv2dt,
          before.velocity.S.x.data(), g.size());
  k.axpby(dt_uz.data(), inv2dt, after.velocity.S.z.data(), -inv2dt,
          before.velocity.S.z.data(), g.size());
  k.axpby(dt_ut.data(), inv2dt, after.velocity.T.data(), -inv2dt,
          before.velocity.T.data(), g.size());

  EpResidual r;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rsx = dt_ux[i] + trans_x[i] +
                       (gux.x[i] * u.x[i] + guz.x[i] * u.z[i]) +
                       ut[i] * gT.x[i] - f * ut[i] + vd.b[i] * gth.x[i] -
                       gd.x[i];
    const double rsz = dt_uz[i] + trans_z[i] +
                       (gux.z[i] * u.x[i] + guz.z[i] * u.z[i]) +
                       ut[i] * gT.z[i] + vd.b[i] * gth.z[i] - gd.z[i];
    const double rt = dt_ut[i] + advT[i] + f * u.x[i] + vd.b[i] * s;
    r.s_norm = std::max(r.s_norm, std::max(std::fabs(rsx), std::fabs(rsz)));
    r.t_norm = std::max(r.t_norm, std::fabs(rt));
  }
  return r;
}

}  // namespace slicekit::diagnostics
