// Acceptance gate: ten numbered criteria, one printed line each, with the
// measured values and the pinned thresholds. The exit code is the number of
// failed criteria, so 0 means full acceptance.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slicekit/config.hpp"
#include "slicekit/diagnostics.hpp"
#include "slicekit/dynamics.hpp"
#include "slicekit/noether.hpp"
#include "slicekit/studies.hpp"

using namespace slicekit;
namespace fs = std::filesystem;
namespace st = slicekit::studies;

namespace {

constexpr double kTolBracket = 1e-13;
constexpr double kMinOrder = 1.9;
constexpr double kAlgebraSeconds = 60.0;
constexpr double kTolSteady = 1e-8;
constexpr double kSteadySeconds = 30.0;
constexpr double kTolEnergy = 1e-6;
constexpr double kHalveLo = 12.0, kHalveHi = 20.0;
constexpr double kTolCirc = 1e-4;
constexpr double kTolPvRel = 1e-3;
constexpr double kTolClosure = 1e-5;
constexpr double kTolCharge = 1e-5;
constexpr double kTolCross = 1e-4;
constexpr double kTolTriangle = 1e-4;

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

struct Gate {
  int failed = 0;
  void line(int idx, const char* title, bool pass, const std::string& detail) {
    if (!pass) ++failed;
    std::printf("[C%d %s] %-40s %s\n", idx, pass ? "PASS" : "FAIL", title,
                detail.c_str());
    std::fflush(stdout);
  }
  void guard(int idx, const char* title,
             const std::function<std::pair<bool, std::string>()>& fn) {
    try {
      auto [pass, detail] = fn();
      line(idx, title, pass, detail);
    } catch (const std::exception& e) {
      line(idx, title, false, strf("exception: %s", e.what()));
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// --- C1: algebra identities with bracket orders over three grids ---------

std::pair<bool, std::string> c1_algebra() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid2D g128(128, 33, 1.0e6, 1.0e4);
  const double ra = st::antisymmetry_residual(g128);
  const double rb = st::bilinearity_residual(g128);

  const std::vector<Grid2D> grids = {Grid2D(64, 17, 1.0e6, 1.0e4),
                                     Grid2D(128, 33, 1.0e6, 1.0e4),
                                     Grid2D(256, 65, 1.0e6, 1.0e4)};
  std::vector<double> assoc(grids.size()), jac(grids.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < grids.size(); ++i)
    jobs.push_back([&, i] {
      assoc[i] = st::associativity_residual(grids[i]);
      jac[i] = st::jacobi_residual(grids[i]);
    });
  st::run_jobs(std::move(jobs));
  double oa = 99.0, oj = 99.0;
  for (std::size_t i = 0; i + 1 < grids.size(); ++i) {
    oa = std::min(oa, st::order_of(assoc[i], assoc[i + 1]));
    oj = std::min(oj, st::order_of(jac[i], jac[i + 1]));
  }
  const double wall = seconds_since(t0);
  const bool pass = ra <= kTolBracket && rb <= kTolBracket &&
                    oa >= kMinOrder && oj >= kMinOrder &&
                    wall < kAlgebraSeconds;
  return {pass, strf("antisym %.2e bilin %.2e (tol %.0e); order assoc %.2f "
                     "jacobi %.2f (min %.1f); %.1f s (limit %.0f)",
                     ra, rb, kTolBracket, oa, oj, kMinOrder, wall,
                     kAlgebraSeconds)};
}

// --- C2: the shear-balanced basic state is a steady solution -------------

std::pair<bool, std::string> c2_steady() {
  const auto t0 = std::chrono::steady_clock::now();
  InitSpec init;
  init.kind = "eady_basic";
  const Grid2D g(128, 33, 1.0e6, 1.0e4);
  const ModelParams params;
  SliceState s0 = init_state(init, g, params);
  SliceState s = s0;
  for (int i = 0; i < 100; ++i) s = rk4_step(s, 20.0);
  const double uscale = s0.velocity.S.x.max_abs();
  const double r = std::max(
      {add_scaled(s.velocity.S.x, -1.0, s0.velocity.S.x).max_abs() / uscale,
       add_scaled(s.velocity.S.z, -1.0, s0.velocity.S.z).max_abs() / uscale,
       add_scaled(s.velocity.T, -1.0, s0.velocity.T).max_abs() / uscale,
       add_scaled(s.tracer.theta, -1.0, s0.tracer.theta).max_abs() /
           s0.tracer.theta.max_abs()});
  const double wall = seconds_since(t0);
  const bool pass = r <= kTolSteady && wall < kSteadySeconds;
  return {pass, strf("max relative change %.2e over 100 steps (tol %.0e); "
                     "%.1f s (limit %.0f)",
                     r, kTolSteady, wall, kSteadySeconds)};
}

// --- C3: energy drift level and its response to halving dt ---------------
//
// The drift tolerance is met with two orders of margin. The dt-halving
// ratio is reported as measured: the total drift at these resolutions is
// dominated by the dt-independent spatial-truncation share, and the
// stepper's own share (isolated against a dt/8 reference, and shown by the
// wave-resolved probe to scale as dt^5) sits near rounding, so the
// measured ratio stays near 1 rather than inside the pinned [12, 20] band.

std::pair<bool, std::string> c3_energy() {
  const double f = 1e-4;
  const double T = 20.0 / f;
  SimConfig c20 = st::conservation_config(128, 33, 20.0, T);
  c20.loops.clear();
  c20.tracer_count = 0;
  SimConfig c10 = c20;
  c10.dt = 10.0;
  st::RunSummary r20, r10;
  std::vector<std::function<void()>> jobs;
  jobs.push_back([&] { r20 = st::conservation_run(c20); });
  jobs.push_back([&] { r10 = st::conservation_run(c10); });
  st::run_jobs(std::move(jobs));
  const double ratio = r20.energy_drift / std::max(r10.energy_drift, 1e-300);

  // stepper-only share at the default dt, against a dt/8 trajectory
  const double share = st::energy_dt_share(c20, 2.0 / f);

  // internal-wave probe where the stepper share is far above rounding:
  // its dt-halving exponent is the stepper's true dissipation order
  SimConfig wave = st::conservation_config(128, 33, 75.0, 0.0);
  wave.loops.clear();
  wave.tracer_count = 0;
  wave.init.mode = 48;
  wave.init.amplitude = 0.0;
  wave.init.amplitude_inplane = 0.25;
  const double s75 = st::energy_dt_share(wave, 2.0e4);
  wave.dt = 37.5;
  const double s37 = st::energy_dt_share(wave, 2.0e4);
  const double stepper_order = st::order_of(s75, s37);

  const bool pass = r20.energy_drift <= kTolEnergy && ratio >= kHalveLo &&
                    ratio <= kHalveHi;
  return {pass,
          strf("drift %.2e at dt=20 (tol %.0e), %.2e at dt=10; halving ratio "
               "%.2f (need %.0f..%.0f); stepper-only share %.1e, stepper "
               "order %.2f on wave probe",
               r20.energy_drift, kTolEnergy, r10.energy_drift, ratio, kHalveLo,
               kHalveHi, share, stepper_order)};
}

// --- C4-C5 share two instrumented runs ------------------------------------

struct ConsPair {
  st::RunSummary coarse, fine;
  bool ran = false;
};

ConsPair run_conservation_pair() {
  const double T = 10.0 / 1e-4;
  SimConfig c1 = st::conservation_config(128, 33, 20.0, T);
  SimConfig c2 = st::conservation_config(256, 65, 10.0, T);
  ConsPair p;
  std::vector<std::function<void()>> jobs;
  jobs.push_back([&] { p.coarse = st::conservation_run(c1, 1.0); });
  jobs.push_back([&] { p.fine = st::conservation_run(c2, 1.0); });
  st::run_jobs(std::move(jobs));
  p.ran = true;
  return p;
}

std::pair<bool, std::string> c4_circulation(const ConsPair& p) {
  double worst = 0.0, worst_fine = 0.0;
  for (double d : p.coarse.circ_drift) worst = std::max(worst, d);
  for (double d : p.fine.circ_drift) worst_fine = std::max(worst_fine, d);
  const double order = st::order_of(worst, worst_fine);
  const bool pass = worst <= kTolCirc && order >= kMinOrder;
  return {pass, strf("max drift %.2e on 3 loops (tol %.0e); refinement order "
                     "%.2f (min %.1f)",
                     worst, kTolCirc, order, kMinOrder)};
}

std::pair<bool, std::string> c5_pv(const ConsPair& p) {
  const double rel = p.coarse.pv_drift / std::max(p.coarse.pv_range, 1e-300);
  const double rel_fine = p.fine.pv_drift / std::max(p.fine.pv_range, 1e-300);
  const bool pass = rel <= kTolPvRel && rel_fine < rel;
  return {pass, strf("max tracer drift %.2e of range (tol %.0e); fine/coarse "
                     "%.2f (need < 1)",
                     rel, kTolPvRel, rel_fine / std::max(rel, 1e-300))};
}

// --- C6-C7 share two symmetry co-evolution runs ---------------------------

struct NoetherPair {
  st::NoetherRun coarse, fine;
};

NoetherPair run_noether_pair() {
  const double T = 10.0 / 1e-4;
  SimConfig c1 = st::noether_config(128, 33, 20.0, T);
  SimConfig c2 = st::noether_config(256, 65, 10.0, T);
  NoetherPair p;
  std::vector<std::function<void()>> jobs;
  jobs.push_back([&] { p.coarse = st::noether_run(c1); });
  jobs.push_back([&] { p.fine = st::noether_run(c2); });
  st::run_jobs(std::move(jobs));
  return p;
}

std::pair<bool, std::string> c6_closure(const NoetherPair& p) {
  const double order = st::order_of(p.coarse.closure_free, p.fine.closure_free);
  const bool pass = p.coarse.closure_free <= kTolClosure && order >= kMinOrder;
  return {pass, strf("free-mode closure residual %.2e (tol %.0e); refinement "
                     "order %.2f (min %.1f)",
                     p.coarse.closure_free, kTolClosure, order, kMinOrder)};
}

std::pair<bool, std::string> c7_charge(const NoetherPair& p) {
  const double cross_order =
      st::order_of(p.coarse.cross_check, p.fine.cross_check);
  const bool pass = p.coarse.charge_drift <= kTolCharge &&
                    p.coarse.cross_check <= kTolCross &&
                    p.fine.charge_drift < p.coarse.charge_drift &&
                    cross_order >= kMinOrder;
  return {pass,
          strf("charge drift %.2e (tol %.0e), fine %.2e; cross-check %.2e "
               "(tol %.0e), order %.2f (min %.1f)",
               p.coarse.charge_drift, kTolCharge, p.fine.charge_drift,
               p.coarse.cross_check, kTolCross, cross_order, kMinOrder)};
}

// --- C8: charge / dual / PV-pairing triangle on random states -------------

std::pair<bool, std::string> c8_triangle() {
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
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    SliceState s = st::random_state(g, params, 1000 + 17 * i);
    worst = std::max(worst, st::charge_triangle(s, psi));
  }
  return {worst <= kTolTriangle,
          strf("max pairwise discrepancy %.2e over 10 states (tol %.0e)",
               worst, kTolTriangle)};
}

// --- C9: centered-time momentum residuals under joint refinement ----------

std::pair<bool, std::string> c9_ep() {
  auto ep_at = [](int nx, int nz, double dt) {
    SimConfig cfg = st::conservation_config(nx, nz, dt, 0.0);
    SliceState y0 = init_state(cfg.init, cfg.grid, cfg.params);
    SliceState y1 = rk4_step(y0, dt);
    SliceState y2 = rk4_step(y1, dt);
    return diagnostics::ep_residual(y0, y1, y2);
  };
  std::vector<EpResidual> rs(3);
  std::vector<std::function<void()>> jobs;
  jobs.push_back([&] { rs[0] = ep_at(128, 33, 20.0); });
  jobs.push_back([&] { rs[1] = ep_at(256, 65, 10.0); });
  jobs.push_back([&] { rs[2] = ep_at(512, 129, 5.0); });
  st::run_jobs(std::move(jobs));
  double os = 99.0, ot = 99.0;
  for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
    os = std::min(os, st::order_of(rs[i].s_norm, rs[i + 1].s_norm));
    ot = std::min(ot, st::order_of(rs[i].t_norm, rs[i + 1].t_norm));
  }
  const bool pass = os >= kMinOrder && ot >= kMinOrder;
  return {pass, strf("order in-slice %.2f transverse %.2f over two joint "
                     "dt/dz doublings (min %.1f)",
                     os, ot, kMinOrder)};
}

// --- C10: byte-identical diagnostics across two identical CLI runs --------

std::pair<bool, std::string> c10_determinism() {
  const char* bin = std::getenv("SLICEKIT_BIN");
  if (!bin || !*bin) return {false, "SLICEKIT_BIN not set"};

  const fs::path dir = fs::temp_directory_path() / "slicekit_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "run.ini";
  {
    std::ofstream out(cfg, std::ios::binary);
    out << "[grid]\nnx = 64\nnz = 17\nLx = 1.0e6\nH = 1.0e4\n"
           "[params]\ns = -3.0e-7\ndt = 30\nt_end = 300\n"
           "[init]\nkind = eady_perturbed\namplitude = 0.1\n"
           "amplitude_inplane = 0.01\nmode = 1\n"
           "[loops.0]\ncx = 5.0e5\ncz = 5.0e3\nrx = 1.5e5\nrz = 2.0e3\nn = 48\n"
           "[psi]\nkind = cosine_bump\namplitude = 1.0\ncx = 5.0e5\n"
           "cz = 5.0e3\nsx = 2.0e5\nsz = 2.2e3\n"
           "[output]\nevery = 1\ntracers = 16\ntracer_seed = 3\n";
  }
  auto run = [&](const char* leaf) {
    const std::string cmd = std::string("\"") + bin + "\" run --config \"" +
                            cfg.string() + "\" --out \"" +
                            (dir / leaf).string() + "\" > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return raw == -1 ? -1 : WEXITSTATUS(raw);
  };
  const int rc1 = run("a");
  const int rc2 = run("b");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string csv1 = slurp(dir / "a" / "diagnostics.csv");
  const std::string csv2 = slurp(dir / "b" / "diagnostics.csv");
  const bool pass =
      rc1 == 0 && rc2 == 0 && !csv1.empty() && csv1 == csv2;
  return {pass, strf("exit codes %d/%d, %zu-byte diagnostics.csv %s", rc1, rc2,
                     csv1.size(),
                     csv1 == csv2 ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  std::printf("acceptance: grids up to 256x65 (512x129 for residual orders), "
              "single process\n");
  Gate gate;
  gate.guard(1, "algebra identities and orders", c1_algebra);
  gate.guard(2, "basic-state steadiness", c2_steady);
  gate.guard(3, "energy drift and dt response", c3_energy);

  ConsPair cons;
  try {
    cons = run_conservation_pair();
  } catch (const std::exception& e) {
    gate.line(4, "circulation drift on material loops", false,
              strf("exception: %s", e.what()));
    gate.line(5, "material PV on tracers", false,
              strf("exception: %s", e.what()));
  }
  if (cons.ran) {
    gate.guard(4, "circulation drift on material loops",
               [&] { return c4_circulation(cons); });
    gate.guard(5, "material PV on tracers", [&] { return c5_pv(cons); });
  }

  try {
    NoetherPair noe = run_noether_pair();
    gate.guard(6, "closure persistence (free mode)",
               [&] { return c6_closure(noe); });
    gate.guard(7, "charge constancy and cross-check",
               [&] { return c7_charge(noe); });
  } catch (const std::exception& e) {
    gate.line(6, "closure persistence (free mode)", false,
              strf("exception: %s", e.what()));
    gate.line(7, "charge constancy and cross-check", false,
              strf("exception: %s", e.what()));
  }

  gate.guard(8, "charge consistency triangle", c8_triangle);
  gate.guard(9, "momentum residual order", c9_ep);
  gate.guard(10, "run-to-run determinism", c10_determinism);

  std::printf("acceptance: %d/10 criteria passed\n", 10 - gate.failed);
  return gate.failed;
}
