#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "slicekit/cli.hpp"
#include "slicekit/config.hpp"
#include "slicekit/diagnostics.hpp"
#include "slicekit/errors.hpp"
#include "slicekit/grid_ops.hpp"
#include "slicekit/noether.hpp"
#include "slicekit/slice_algebra.hpp"
#include "slicekit/spectral.hpp"
#include "slicekit/studies.hpp"

namespace slicekit::cli {

namespace {

namespace st = slicekit::studies;

struct Table {
  std::string suite;
  bool all_pass = true;
  explicit Table(std::string s) : suite(std::move(s)) {
    std::printf("verify %s\n", suite.c_str());
  }
  void add(const std::string& name, bool pass, const std::string& detail) {
    all_pass = all_pass && pass;
    std::printf("  [%s] %-42s %s\n", pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
  }
  int finish() const {
    std::printf("verify %s: %s\n", suite.c_str(),
                all_pass ? "all checks passed" : "FAILED");
    return all_pass ? 0 : 3;
  }
};

std::string detail1(const char* label, double v, const char* rel, double tol) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %.3g (%s %.3g)", label, v, rel, tol);
  return buf;
}

// ---------------------------------------------------------------- algebra

int verify_algebra(bool full) {
  Table t("algebra (" + std::string(full ? "full" : "quick") + ")");
  const Grid2D g(128, 33, 1.0e6, 1.0e4);

  {
    SliceMapSample id = slice_algebra::sd_identity(g);
    SliceMapSample m = st::sample_map(5, g);
    SliceMapSample mi = slice_algebra::sd_compose(m, id);
    SliceMapSample im = slice_algebra::sd_compose(id, m);
    double r = 0.0;
    r = std::max(r, add_scaled(mi.phi_x, -1.0, m.phi_x).max_abs() / g.Lx);
    r = std::max(r, add_scaled(mi.phi_z, -1.0, m.phi_z).max_abs() / g.H);
    r = std::max(r, add_scaled(im.phi_x, -1.0, m.phi_x).max_abs() / g.Lx);
    r = std::max(r, add_scaled(im.phi_z, -1.0, m.phi_z).max_abs() / g.H);
    r = std::max(r, st::rel_diff(mi.f, m.f, 1e-30));
    r = std::max(r, st::rel_diff(im.f, m.f, 1e-30));
    t.add("identity is a two-sided unit", r <= 1e-13,
          detail1("max", r, "tol", 1e-13));
  }
  {
    const double r = st::antisymmetry_residual(g);
    t.add("bracket antisymmetry", r <= 1e-13, detail1("max", r, "tol", 1e-13));
  }
  {
    const double r = st::bilinearity_residual(g);
    t.add("bracket bilinearity", r <= 1e-13, detail1("max", r, "tol", 1e-13));
  }
  {
    // density relabelling: uniform D is unchanged by solenoidal fields
    SliceVelocity v = st::sample_velocity(113, 2.0e3, 1.0, g);
    SpectralEngine::shared(g).solenoidal_project(v.S);
    DensityField D(g, 1.0);
    DensityField ld = slice_algebra::lie_derivative_density(v.S, D);
    const double scale =
        std::max(v.S.x.max_abs(), v.S.z.max_abs()) / std::min(g.dx, g.dz);
    const double r = ld.D.max_abs() / scale;
    t.add("uniform density invariant under solenoidal flow", r <= 1e-12,
          detail1("max", r, "tol", 1e-12));
  }
  {
    // tracer derivative reduces to s u_T on constant theta
    SliceVelocity v = st::sample_velocity(127, 2.0e3, 1.0, g);
    TracerPair th(g, -3e-6);
    for (std::size_t i = 0; i < th.theta.size(); ++i) th.theta[i] = 7.5;
    TracerPair ld = slice_algebra::lie_derivative_tracer(v, th);
    ScalarField want = scaled(th.s, v.T);
    const double r = st::rel_diff(ld.theta, want, 1e-30);
    t.add("tracer derivative on constant theta", r <= 1e-13,
          detail1("max", r, "tol", 1e-13));
  }
  {
    std::vector<Grid2D> grids = {Grid2D(64, 17, 1.0e6, 1.0e4),
                                 Grid2D(128, 33, 1.0e6, 1.0e4)};
    if (full) grids.push_back(Grid2D(256, 65, 1.0e6, 1.0e4));
    std::vector<double> ra(grids.size()), rj(grids.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < grids.size(); ++i)
      jobs.push_back([&, i] {
        ra[i] = st::associativity_residual(grids[i]);
        rj[i] = st::jacobi_residual(grids[i]);
      });
    st::run_jobs(std::move(jobs));
    double oa = 99.0, oj = 99.0;
    for (std::size_t i = 0; i + 1 < grids.size(); ++i) {
      oa = std::min(oa, st::order_of(ra[i], ra[i + 1]));
      oj = std::min(oj, st::order_of(rj[i], rj[i + 1]));
    }
    t.add("composition associativity order", oa >= 1.9,
          detail1("order", oa, "min", 1.9));
    t.add("Jacobi identity order", oj >= 1.9, detail1("order", oj, "min", 1.9));
  }
  return t.finish();
}

// ----------------------------------------------------------- conservation

int verify_conservation(bool full) {
  Table t("conservation (" + std::string(full ? "full" : "quick") + ")");
  const double f = 1e-4;

  {
    // steady basic state
    SimConfig cfg;
    InitSpec init;
    init.kind = "eady_basic";
    SliceState st0 = init_state(init, cfg.grid, cfg.params);
    SliceState st = st0;
    for (int i = 0; i < 100; ++i) st = rk4_step(st, cfg.dt);
    const double du = std::max(
        add_scaled(st.velocity.S.x, -1.0, st0.velocity.S.x).max_abs(),
        add_scaled(st.velocity.S.z, -1.0, st0.velocity.S.z).max_abs());
    const double uscale = st0.velocity.S.x.max_abs();
    const double r = std::max(
        {du / uscale,
         add_scaled(st.velocity.T, -1.0, st0.velocity.T).max_abs() / uscale,
         add_scaled(st.tracer.theta, -1.0, st0.tracer.theta).max_abs() /
             st0.tracer.theta.max_abs()});
    t.add("basic state steady over 100 steps", r <= 1e-8,
          detail1("max", r, "tol", 1e-8));
  }
  {
    // energy drift; full mode also pins the stepper's own share
    const double T = (full ? 20.0 : 2.0) / f;
    SimConfig c1 = st::conservation_config(128, 33, 20.0, T);
    c1.loops.clear();
    c1.tracer_count = 0;
    st::RunSummary r1;
    double dt_share = 0.0;
    std::vector<std::function<void()>> jobs;
    jobs.push_back([&] { r1 = st::conservation_run(c1); });
    if (full)
      jobs.push_back([&] { dt_share = st::energy_dt_share(c1, 2.0 / f); });
    st::run_jobs(std::move(jobs));
    t.add("energy drift at default dt", r1.energy_drift <= 1e-6,
          detail1("drift", r1.energy_drift, "tol", 1e-6));
    if (full)
      t.add("stepper share of energy drift", dt_share <= 1e-12,
            detail1("drift", dt_share, "tol", 1e-12));
  }
  {
    // circulation and tracer PV on one run; refinement in full mode
    const double T = (full ? 10.0 : 1.0) / f;
    SimConfig c1 = st::conservation_config(128, 33, 20.0, T);
    SimConfig c2 = st::conservation_config(256, 65, 10.0, T);
    st::RunSummary r1, r2;
    std::vector<std::function<void()>> jobs;
    jobs.push_back([&] { r1 = st::conservation_run(c1, 1.0); });
    if (full) jobs.push_back([&] { r2 = st::conservation_run(c2, 1.0); });
    st::run_jobs(std::move(jobs));
    double worst = 0.0;
    for (double d : r1.circ_drift) worst = std::max(worst, d);
    t.add("circulation drift on 3 loops", worst <= 1e-4,
          detail1("max", worst, "tol", 1e-4));
    const double pv_rel = r1.pv_drift / std::max(r1.pv_range, 1e-300);
    t.add("tracer PV drift", pv_rel <= 1e-3,
          detail1("max/range", pv_rel, "tol", 1e-3));
    if (full) {
      double worst2 = 0.0;
      for (double d : r2.circ_drift) worst2 = std::max(worst2, d);
      const double oc = st::order_of(worst, worst2);
      t.add("circulation refinement order", oc >= 1.9,
            detail1("order", oc, "min", 1.9));
      const double pv2 = r2.pv_drift / std::max(r2.pv_range, 1e-300);
      t.add("tracer PV refinement", pv2 < pv_rel,
            detail1("fine/coarse", pv2 / std::max(pv_rel, 1e-300), "max", 1.0));
    }
  }
  {
    // EP residual of the advanced trajectory under joint dt/dz refinement
    auto ep_at = [](int nx, int nz, double dt) {
      SimConfig cfg = st::conservation_config(nx, nz, dt, 2.0 * dt);
      SliceState y0 = init_state(cfg.init, cfg.grid, cfg.params);
      SliceState y1 = rk4_step(y0, dt);
      SliceState y2 = rk4_step(y1, dt);
      return diagnostics::ep_residual(y0, y1, y2);
    };
    std::vector<EpResidual> rs(full ? 3 : 2);
    std::vector<std::function<void()>> jobs;
    jobs.push_back([&] { rs[0] = ep_at(128, 33, 20.0); });
    jobs.push_back([&] { rs[1] = ep_at(256, 65, 10.0); });
    if (full) jobs.push_back([&] { rs[2] = ep_at(512, 129, 5.0); });
    st::run_jobs(std::move(jobs));
    double os = 99.0, ot = 99.0;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
      os = std::min(os, st::order_of(rs[i].s_norm, rs[i + 1].s_norm));
      ot = std::min(ot, st::order_of(rs[i].t_norm, rs[i + 1].t_norm));
    }
    t.add("EP in-slice residual order", os >= 1.9,
          detail1("order", os, "min", 1.9));
    t.add("EP transverse residual order", ot >= 1.9,
          detail1("order", ot, "min", 1.9));
  }
  return t.finish();
}

// ---------------------------------------------------------------- noether

int verify_noether(bool full) {
  Table t("noether (" + std::string(full ? "full" : "quick") + ")");
  const Grid2D g(128, 33, 1.0e6, 1.0e4);
  const ModelParams params;

  PsiSpec bump;
  bump.kind = "cosine_bump";
  bump.amplitude = 2.5;
  bump.cx = 0.5e6;
  bump.cz = 0.5e4;
  bump.sx = 0.18e6;
  bump.sz = 0.28e4;
  ScalarField psi = noether::init_psi({bump}, g);

  {
    SliceState s = st::random_state(g, params, 19);
    for (std::size_t i = 0; i < s.density.D.size(); ++i)
      s.density.D[i] = 1.0 + 0.2 * std::sin(double(i % 17)) * 0.1;
    VectorField2 w = noether::w_from_psi(psi, s.density);
    VectorField2 gp = grid_ops::grad(psi);
    double r = 0.0;
    const double den = std::max(gp.x.max_abs(), gp.z.max_abs());
    for (std::size_t i = 0; i < w.x.size(); ++i) {
      r = std::max(r, std::fabs(s.density.D[i] * w.x[i] - gp.z[i]));
      r = std::max(r, std::fabs(s.density.D[i] * w.z[i] + gp.x[i]));
    }
    t.add("contraction identity D w = perp grad psi", r / den <= 1e-13,
          detail1("max", r / den, "tol", 1e-13));

    ScalarField flux_x = hadamard(s.density.D, w.x);
    ScalarField flux_z = hadamard(s.density.D, w.z);
    VectorField2 flux(g);
    flux.x = flux_x;
    flux.z = flux_z;
    ScalarField div = grid_ops::divergence(flux);
    const double scale = den / std::min(g.dx, g.dz);
    t.add("density symmetry div(D w) = 0", div.max_abs() / scale <= 1e-12,
          detail1("max", div.max_abs() / scale, "tol", 1e-12));

    ScalarField wT = noether::w_T_closure(w, s.tracer);
    ScalarField adv = grid_ops::advect(w, s.tracer.theta);
    ScalarField res = add_scaled(adv, s.tracer.s, wT);
    const double cden = std::max(adv.max_abs(), 1e-300);
    t.add("closure identity at construction", res.max_abs() / cden <= 1e-13,
          detail1("max", res.max_abs() / cden, "tol", 1e-13));
  }
  {
    // frozen under zero flow, both modes
    SliceState s(g, params);
    s.tracer.theta = st::sample(st::make_harmonics(301, 1.0, false), g);
    StageVelocities stages;
    stages.v1 = SliceVelocity(g);
    stages.v2 = stages.v1;
    stages.v3 = stages.v1;
    stages.v4 = stages.v1;
    bool ok = true;
    for (SymmetryMode mode : {SymmetryMode::psi_generated, SymmetryMode::free}) {
      SymmetryField s0 = noether::make_symmetry(psi, s, mode);
      SymmetryField s1 = noether::evolve_symmetry(s0, stages, s, 20.0);
      ok = ok && add_scaled(s1.psi, -1.0, s0.psi).max_abs() == 0.0 &&
           add_scaled(s1.w_S.x, -1.0, s0.w_S.x).max_abs() == 0.0 &&
           add_scaled(s1.w_S.z, -1.0, s0.w_S.z).max_abs() == 0.0 &&
           add_scaled(s1.w_T, -1.0, s0.w_T).max_abs() == 0.0;
    }
    t.add("generators frozen under zero flow", ok,
          ok ? "bit-identical" : "changed");
  }
  {
    // uniform flow translates psi; the drift distance is a whole number of
    // columns so the reference is an exact circular shift
    SliceState s(g, params);
    s.tracer.theta = st::sample(st::make_harmonics(311, 1.0, false), g);
    const int steps = 50, cols = 5;
    const double dt = 20.0;
    const double c = cols * g.dx / (steps * dt);
    for (std::size_t i = 0; i < s.velocity.S.x.size(); ++i)
      s.velocity.S.x[i] = c;
    StageVelocities stages;
    stages.v1 = s.velocity;
    stages.v2 = s.velocity;
    stages.v3 = s.velocity;
    stages.v4 = s.velocity;
    SymmetryField sym =
        noether::make_symmetry(psi, s, SymmetryMode::psi_generated);
    for (int i = 0; i < steps; ++i)
      sym = noether::evolve_symmetry(sym, stages, s, dt);
    double r = 0.0;
    const double den = psi.max_abs();
    for (int ix = 0; ix < g.nx; ++ix)
      for (int iz = 0; iz < g.nz; ++iz) {
        const int src = (ix - cols + g.nx) % g.nx;
        r = std::max(r, std::fabs(sym.psi.at(ix, iz) - psi.at(src, iz)));
      }
    t.add("uniform flow translates psi", r / den <= 1e-6,
          detail1("max", r / den, "tol", 1e-6));
  }
  {
    // s = 0 leaves no closure; the error is the contract
    InitSpec init;
    init.kind = "stratified_rest";
    SliceState s = init_state(init, g, params);
    VectorField2 w = noether::w_from_psi(psi, s.density);
    bool raised = false;
    try {
      noether::w_T_closure(w, s.tracer);
    } catch (const NumericsError&) {
      raised = true;
    }
    t.add("degenerate closure rejected at s = 0", raised,
          raised ? "error raised as required" : "no error raised");
  }
  {
    // consistency triangle on random states
    const int n_states = full ? 10 : 3;
    double worst = 0.0;
    for (int i = 0; i < n_states; ++i) {
      SliceState s = st::random_state(g, params, 1000 + 17 * i);
      worst = std::max(worst, st::charge_triangle(s, psi));
    }
    t.add("charge/dual/PV consistency triangle", worst <= 1e-4,
          detail1("max", worst, "tol", 1e-4));
    // determinism of the recomputation
    SliceState s = st::random_state(g, params, 77);
    SymmetryField sym =
        noether::make_symmetry(psi, s, SymmetryMode::psi_generated);
    const double p1 = noether::noether_pv_check(sym, s);
    const double p2 = noether::noether_pv_check(sym, s);
    t.add("charge recomputation is bit-stable", p1 == p2,
          p1 == p2 ? "bit-identical" : "differs");
  }
  {
    const double f = params.f;
    const double T = (full ? 10.0 : 1.0) / f;
    SimConfig c1 = st::noether_config(128, 33, 20.0, T);
    SimConfig c2 = st::noether_config(256, 65, 10.0, T);
    st::NoetherRun r1, r2;
    std::vector<std::function<void()>> jobs;
    jobs.push_back([&] { r1 = st::noether_run(c1); });
    if (full) jobs.push_back([&] { r2 = st::noether_run(c2); });
    st::run_jobs(std::move(jobs));
    t.add("charge constancy along trajectory", r1.charge_drift <= 1e-5,
          detail1("drift", r1.charge_drift, "tol", 1e-5));
    t.add("dual-evolution cross-check", r1.cross_check <= 1e-4,
          detail1("max", r1.cross_check, "tol", 1e-4));
    t.add("closure persistence (free mode)", r1.closure_free <= 1e-5,
          detail1("max", r1.closure_free, "tol", 1e-5));
    if (full) {
      t.add("charge drift refinement", r2.charge_drift < r1.charge_drift,
            detail1("fine/coarse",
                    r2.charge_drift / std::max(r1.charge_drift, 1e-300), "max",
                    1.0));
      const double oc = st::order_of(r1.cross_check, r2.cross_check);
      t.add("cross-check refinement order", oc >= 1.9,
            detail1("order", oc, "min", 1.9));
      const double op = st::order_of(r1.closure_free, r2.closure_free);
      t.add("closure persistence refinement order", op >= 1.9,
            detail1("order", op, "min", 1.9));
    }
  }
  return t.finish();
}

}  // namespace

int cmd_verify(const std::string& suite, const std::string& level,
               const std::string& out_dir) {
  (void)out_dir;  // suites run in memory
  if (level != "quick" && level != "full") {
    std::fprintf(stderr, "error: unknown level '%s' (quick|full)\n",
                 level.c_str());
    return 1;
  }
  const bool full = level == "full";
  if (suite == "algebra") return verify_algebra(full);
  if (suite == "conservation") return verify_conservation(full);
  if (suite == "noether") return verify_noether(full);
  std::fprintf(stderr,
               "error: unknown suite '%s' (algebra|conservation|noether)\n",
               suite.c_str());
  return 1;
}

}  // namespace slicekit::cli
