#include "slicekit/studies.hpp"

#include <cmath>
#include <cstdlib>
#include <future>
#include <random>

#include "slicekit/diagnostics.hpp"
#include "slicekit/grid_ops.hpp"
#include "slicekit/noether.hpp"

namespace slicekit::studies {

namespace {

// Advances to time T, invoking cb(state, stages, h) after every step.
template <class Cb>
SliceState run_to(SliceState state, double dt, double T, Cb&& cb) {
  const double tiny = 1e-9 * dt;
  while (state.time < T - tiny) {
    const double h = std::min(dt, T - state.time);
    StageVelocities stages;
    state = rk4_step(state, h, &stages);
    cb(state, stages, h);
  }
  return state;
}

}  // namespace

int env_threads() {
  const char* v = std::getenv("SLICEKIT_THREADS");
  if (!v) return 1;
  const int n = std::atoi(v);
  return n < 1 ? 1 : n;
}

void run_jobs(std::vector<std::function<void()>> jobs) {
  const int threads = env_threads();
  if (threads <= 1) {
    for (auto& j : jobs) j();
    return;
  }
  std::size_t next = 0;
  while (next < jobs.size()) {
    std::vector<std::future<void>> wave;
    for (int i = 0; i < threads && next < jobs.size(); ++i, ++next)
      wave.push_back(std::async(std::launch::async, jobs[next]));
    for (auto& f : wave) f.get();
  }
}

double order_of(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return 99.0;
  return std::log2(coarse / fine);
}

double rel_diff(const ScalarField& a, const ScalarField& b, double floor) {
  ScalarField d = add_scaled(a, -1.0, b);
  const double den = std::max({a.max_abs(), b.max_abs(), floor});
  return d.max_abs() / den;
}

double Harmonics::val(double x, double z, double Lx, double H) const {
  double v = 0.0;
  for (const Term& t : terms) {
    const double zf = t.cosz ? std::cos(M_PI * t.m * z / H)
                             : std::sin(M_PI * t.m * z / H);
    v += t.c * std::cos(2.0 * M_PI * t.kx * x / Lx + t.ph) * zf;
  }
  return v;
}

double Harmonics::ddx(double x, double z, double Lx, double H) const {
  double v = 0.0;
  for (const Term& t : terms) {
    const double zf = t.cosz ? std::cos(M_PI * t.m * z / H)
                             : std::sin(M_PI * t.m * z / H);
    const double k = 2.0 * M_PI * t.kx / Lx;
    v += -t.c * k * std::sin(k * x + t.ph) * zf;
  }
  return v;
}

double Harmonics::ddz(double x, double z, double Lx, double H) const {
  double v = 0.0;
  for (const Term& t : terms) {
    const double mz = M_PI * t.m / H;
    const double zf = t.cosz ? -mz * std::sin(M_PI * t.m * z / H)
                             : mz * std::cos(M_PI * t.m * z / H);
    v += t.c * std::cos(2.0 * M_PI * t.kx * x / Lx + t.ph) * zf;
  }
  return v;
}

Harmonics make_harmonics(unsigned seed, double amp, bool interior, int kmax,
                         int mmax) {
  std::mt19937 gen(seed);
  auto u01 = [&] { return gen() * (1.0 / 4294967296.0); };
  Harmonics h;
  for (int k = 1; k <= kmax; ++k)
    for (int m = 1; m <= mmax; ++m) {
      const double c = (amp / double(kmax * mmax)) * (2.0 * u01() - 1.0);
      const double ph = 2.0 * M_PI * u01();
      const bool cosz = interior ? false : (gen() & 1u);
      h.terms.push_back({c, double(k), double(m), ph, cosz});
    }
  return h;
}

ScalarField sample(const Harmonics& h, const Grid2D& g) {
  ScalarField f(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz)
      f.at(ix, iz) = h.val(g.x(ix), g.z(iz), g.Lx, g.H);
  return f;
}

SliceVelocity sample_velocity(unsigned seed, double amp_phi, double amp_T,
                              const Grid2D& g, int kmax, int mmax) {
  Harmonics phi = make_harmonics(seed, amp_phi, true, kmax, mmax);
  Harmonics hT = make_harmonics(seed + 101, amp_T, false, kmax, mmax);
  SliceVelocity v(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz) {
      const double x = g.x(ix), z = g.z(iz);
      v.S.x.at(ix, iz) = phi.ddz(x, z, g.Lx, g.H);
      v.S.z.at(ix, iz) = -phi.ddx(x, z, g.Lx, g.H);
      v.T.at(ix, iz) = hT.val(x, z, g.Lx, g.H);
    }
  return v;
}

SliceMapSample sample_map(unsigned seed, const Grid2D& g) {
  Harmonics hx = make_harmonics(seed, 0.015 * g.Lx, false);
  Harmonics hz = make_harmonics(seed + 7, 0.04 * g.H, true);
  Harmonics hf = make_harmonics(seed + 13, 1.0, false);
  SliceMapSample m(g);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz) {
      const double x = g.x(ix), z = g.z(iz);
      m.phi_x.at(ix, iz) = x + hx.val(x, z, g.Lx, g.H);
      m.phi_z.at(ix, iz) = z + hz.val(x, z, g.Lx, g.H);
      m.f.at(ix, iz) = hf.val(x, z, g.Lx, g.H);
    }
  return m;
}

SliceState random_state(const Grid2D& g, const ModelParams& p, unsigned seed) {
  SliceState st(g, p);
  st.velocity = sample_velocity(seed, 3.0e3, 1.0, g);
  Harmonics hth = make_harmonics(seed + 211, 1.0, false);
  const double c = 2.5e-5 * p.theta0 / p.gravity;
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz)
      st.tracer.theta.at(ix, iz) =
          c * g.z(iz) + hth.val(g.x(ix), g.z(iz), g.Lx, g.H);
  return st;
}

double antisymmetry_residual(const Grid2D& g) {
  SliceVelocity a = sample_velocity(71, 2.0e3, 1.0, g);
  SliceVelocity b = sample_velocity(83, 2.0e3, 1.0, g);
  SliceVelocity ab = slice_algebra::lie_bracket(a, b);
  SliceVelocity ba = slice_algebra::lie_bracket(b, a);
  const double den =
      std::max({ab.S.x.max_abs(), ab.S.z.max_abs(), ab.T.max_abs(), 1e-30});
  SliceVelocity s(g);
  const auto& k = kernels::ops();
  k.add_scaled(s.S.x.data(), ab.S.x.data(), 1.0, ba.S.x.data(), s.S.x.size());
  k.add_scaled(s.S.z.data(), ab.S.z.data(), 1.0, ba.S.z.data(), s.S.z.size());
  k.add_scaled(s.T.data(), ab.T.data(), 1.0, ba.T.data(), s.T.size());
  return std::max({s.S.x.max_abs(), s.S.z.max_abs(), s.T.max_abs()}) / den;
}

double bilinearity_residual(const Grid2D& g) {
  SliceVelocity a = sample_velocity(91, 2.0e3, 1.0, g);
  SliceVelocity b = sample_velocity(97, 2.0e3, 1.0, g);
  SliceVelocity c = sample_velocity(103, 2.0e3, 1.0, g);
  const double al = 0.7, be = -1.3;
  SliceVelocity lin(g);
  const auto& k = kernels::ops();
  k.axpby(lin.S.x.data(), al, a.S.x.data(), be, b.S.x.data(), lin.S.x.size());
  k.axpby(lin.S.z.data(), al, a.S.z.data(), be, b.S.z.data(), lin.S.z.size());
  k.axpby(lin.T.data(), al, a.T.data(), be, b.T.data(), lin.T.size());
  SliceVelocity lhs = slice_algebra::lie_bracket(lin, c);
  SliceVelocity ac = slice_algebra::lie_bracket(a, c);
  SliceVelocity bc = slice_algebra::lie_bracket(b, c);
  SliceVelocity rhs(g);
  k.axpby(rhs.S.x.data(), al, ac.S.x.data(), be, bc.S.x.data(), rhs.S.x.size());
  k.axpby(rhs.S.z.data(), al, ac.S.z.data(), be, bc.S.z.data(), rhs.S.z.size());
  k.axpby(rhs.T.data(), al, ac.T.data(), be, bc.T.data(), rhs.T.size());
  const double den =
      std::max({lhs.S.x.max_abs(), lhs.S.z.max_abs(), lhs.T.max_abs(), 1e-30});
  return std::max({add_scaled(lhs.S.x, -1.0, rhs.S.x).max_abs(),
                   add_scaled(lhs.S.z, -1.0, rhs.S.z).max_abs(),
                   add_scaled(lhs.T, -1.0, rhs.T).max_abs()}) /
         den;
}

double associativity_residual(const Grid2D& g) {
  SliceMapSample a = sample_map(11, g);
  SliceMapSample b = sample_map(23, g);
  SliceMapSample c = sample_map(37, g);
  SliceMapSample l =
      slice_algebra::sd_compose(slice_algebra::sd_compose(a, b), c);
  SliceMapSample r =
      slice_algebra::sd_compose(a, slice_algebra::sd_compose(b, c));
  const double ex = add_scaled(l.phi_x, -1.0, r.phi_x).max_abs() / g.Lx;
  const double ez = add_scaled(l.phi_z, -1.0, r.phi_z).max_abs() / g.H;
  const double ef =
      add_scaled(l.f, -1.0, r.f).max_abs() / std::max(l.f.max_abs(), 1e-30);
  return std::max({ex, ez, ef});
}

double jacobi_residual(const Grid2D& g) {
  SliceVelocity a = sample_velocity(41, 2.0e3, 1.0, g, 2, 2);
  SliceVelocity b = sample_velocity(53, 2.0e3, 1.0, g, 2, 2);
  SliceVelocity c = sample_velocity(67, 2.0e3, 1.0, g, 2, 2);
  using slice_algebra::lie_bracket;
  SliceVelocity j1 = lie_bracket(lie_bracket(a, b), c);
  SliceVelocity j2 = lie_bracket(lie_bracket(b, c), a);
  SliceVelocity j3 = lie_bracket(lie_bracket(c, a), b);
  const auto& k = kernels::ops();
  SliceVelocity sum(g);
  auto acc = [&](ScalarField& dst, const ScalarField& p, const ScalarField& q,
                 const ScalarField& r) {
    k.add_scaled(dst.data(), p.data(), 1.0, q.data(), dst.size());
    k.add_scaled(dst.data(), dst.data(), 1.0, r.data(), dst.size());
  };
  acc(sum.S.x, j1.S.x, j2.S.x, j3.S.x);
  acc(sum.S.z, j1.S.z, j2.S.z, j3.S.z);
  acc(sum.T, j1.T, j2.T, j3.T);
  const double den =
      std::max({j1.S.x.max_abs(), j1.S.z.max_abs(), j1.T.max_abs(), 1e-30});
  return std::max({sum.S.x.max_abs(), sum.S.z.max_abs(), sum.T.max_abs()}) /
         den;
}

SimConfig conservation_config(int nx, int nz, double dt, double t_end) {
  SimConfig cfg;
  cfg.grid = Grid2D(nx, nz, 1.0e6, 1.0e4);
  cfg.params.Lx = cfg.grid.Lx;
  cfg.params.H = cfg.grid.H;
  cfg.params.s = -3e-7;
  cfg.init.amplitude = 0.1;
  cfg.init.amplitude_inplane = 0.01;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.tracer_count = 256;
  const int n = nx / 2;  // markers refine with the grid
  cfg.loops = {{0.30e6, 0.50e4, 0.10e6, 0.22e4, n},
               {0.62e6, 0.42e4, 0.16e6, 0.12e4, n},
               {0.50e6, 0.55e4, 0.06e6, 0.28e4, n}};
  return cfg;
}

RunSummary conservation_run(const SimConfig& cfg, double theta_mod_amp) {
  SliceState state = init_state(cfg.init, cfg.grid, cfg.params);
  if (theta_mod_amp != 0.0) {
    const Grid2D& g = cfg.grid;
    for (int ix = 0; ix < g.nx; ++ix)
      for (int iz = 0; iz < g.nz; ++iz)
        state.tracer.theta.at(ix, iz) +=
            theta_mod_amp * std::sin(M_PI * g.z(iz) / g.H);
  }
  std::vector<MaterialLoop> loops;
  std::vector<double> circ0;
  for (const LoopSpec& lp : cfg.loops) {
    loops.push_back(
        diagnostics::make_loop(cfg.grid, lp.cx, lp.cz, lp.rx, lp.rz, lp.n));
    circ0.push_back(diagnostics::circulation(state, loops.back()));
  }
  TracerSet tracers;
  if (cfg.tracer_count > 0)
    tracers =
        diagnostics::release_tracers(state, cfg.tracer_count, cfg.tracer_seed);

  RunSummary out;
  out.circ_drift.assign(loops.size(), 0.0);
  out.pv_range = tracers.pv_range0;
  const double E0 = diagnostics::energy(state);
  const double dE = std::fabs(E0) > 0.0 ? std::fabs(E0) : 1.0;
  double cden = 0.0;
  for (double c : circ0) cden = std::max(cden, std::fabs(c));
  if (cden == 0.0) cden = 1.0;

  state = run_to(
      std::move(state), cfg.dt, cfg.t_end,
      [&](const SliceState& st, const StageVelocities& stages, double h) {
        for (MaterialLoop& lp : loops) diagnostics::advect_loop(lp, stages, h);
        out.energy_drift =
            std::max(out.energy_drift,
                     std::fabs(diagnostics::energy(st) - E0) / dE);
        for (std::size_t i = 0; i < loops.size(); ++i)
          out.circ_drift[i] = std::max(
              out.circ_drift[i],
              std::fabs(diagnostics::circulation(st, loops[i]) - circ0[i]) /
                  cden);
        if (cfg.tracer_count > 0) {
          diagnostics::advect_markers(tracers.x, tracers.z, stages, h);
          out.pv_drift = std::max(
              out.pv_drift, diagnostics::pv_tracers(st, tracers).max_drift);
        }
      });
  return out;
}

double energy_dt_share(SimConfig cfg, double T) {
  auto trace = [&](double dt) {
    SliceState st = init_state(cfg.init, cfg.grid, cfg.params);
    std::vector<double> e{diagnostics::energy(st)};
    const int per = (int)std::lround(cfg.dt / dt);
    int k = 0;
    while (st.time < T - 1e-9 * dt) {
      st = rk4_step(st, dt);
      if (++k % per == 0) e.push_back(diagnostics::energy(st));
    }
    return e;
  };
  const std::vector<double> e1 = trace(cfg.dt);
  const std::vector<double> e8 = trace(cfg.dt / 8.0);
  const double den = std::fabs(e8[0]);
  double d = 0.0;
  for (std::size_t i = 0; i < std::min(e1.size(), e8.size()); ++i)
    d = std::max(d, std::fabs(e1[i] - e8[i]) / den);
  return d;
}

SimConfig noether_config(int nx, int nz, double dt, double t_end) {
  SimConfig cfg;
  cfg.grid = Grid2D(nx, nz, 1.0e6, 1.0e4);
  cfg.params.Lx = cfg.grid.Lx;
  cfg.params.H = cfg.grid.H;
  cfg.params.s = -1e-9;
  cfg.init.amplitude = 2.5e-3;
  cfg.init.amplitude_inplane = 2.5e-4;
  cfg.dt = dt;
  cfg.t_end = t_end;
  PsiSpec b;
  b.kind = "cosine_bump";
  b.amplitude = 1.0;
  b.cx = 0.5e6;
  b.cz = 0.5e4;
  b.sx = 0.20e6;
  b.sz = 0.30e4;
  cfg.psi_bumps = {b};
  return cfg;
}

NoetherRun noether_run(const SimConfig& cfg) {
  SliceState state = init_state(cfg.init, cfg.grid, cfg.params);
  ScalarField psi = noether::init_psi(cfg.psi_bumps, cfg.grid);
  SymmetryField sp =
      noether::make_symmetry(psi, state, SymmetryMode::psi_generated);
  SymmetryField sf = noether::make_symmetry(psi, state, SymmetryMode::free);
  const double Q0 = noether::noether_charge(sp, state);
  const double dQ = std::fabs(Q0) > 0.0 ? std::fabs(Q0) : 1.0;

  NoetherRun out;
  state = run_to(
      std::move(state), cfg.dt, cfg.t_end,
      [&](const SliceState& st, const StageVelocities& stages, double h) {
        sp = noether::evolve_symmetry(sp, stages, st, h);
        sf = noether::evolve_symmetry(sf, stages, st, h);
        out.charge_drift =
            std::max(out.charge_drift,
                     std::fabs(noether::noether_charge(sp, st) - Q0) / dQ);
      });
  const double denS =
      std::max({sf.w_S.x.max_abs(), sf.w_S.z.max_abs(), 1e-300});
  const double denT = std::max(sf.w_T.max_abs(), 1e-300);
  out.cross_check =
      std::max({add_scaled(sp.w_S.x, -1.0, sf.w_S.x).max_abs() / denS,
                add_scaled(sp.w_S.z, -1.0, sf.w_S.z).max_abs() / denS,
                add_scaled(sp.w_T, -1.0, sf.w_T).max_abs() / denT});
  out.closure_free = noether::proposition_residual(sf, state);
  return out;
}

double charge_triangle(const SliceState& st, const ScalarField& psi) {
  SymmetryField sym =
      noether::make_symmetry(psi, st, SymmetryMode::psi_generated);
  const double Q = noether::noether_charge(sym, st);
  const double dual = noether::noether_charge_dual(psi, st);
  const double pvq = noether::noether_pv_check(sym, st);
  const double s = st.tracer.s;
  const double r1 =
      std::fabs(Q - dual) / std::max({std::fabs(Q), std::fabs(dual), 1e-300});
  const double r2 = std::fabs(pvq - s * dual) /
                    std::max({std::fabs(pvq), std::fabs(s * dual), 1e-300});
  const double r3 = std::fabs(s * Q - pvq) /
                    std::max({std::fabs(s * Q), std::fabs(pvq), 1e-300});
  return std::max({r1, r2, r3});
}

}  // namespace slicekit::studies
