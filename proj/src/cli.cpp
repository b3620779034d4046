#include "slicekit/cli.hpp"

#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "slicekit/config.hpp"
#include "slicekit/diagnostics.hpp"
#include "slicekit/errors.hpp"
#include "slicekit/grid_ops.hpp"
#include "slicekit/noether.hpp"
#include "slicekit/snapshot.hpp"

namespace slicekit::cli {

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw ConfigError("cannot write '" + path + "'");
}

std::string now_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header(std::size_t n_loops) {
  std::string h = "t,energy,energy_rel_drift";
  for (std::size_t i = 0; i < n_loops; ++i)
    h += ",circ_" + std::to_string(i);
  h += ",pv_tracer_max_drift,noether_charge,charge_rel_drift,"
       "closure_residual,div_norm,cfl\n";
  return h;
}

std::string csv_row(const std::vector<double>& vals) {
  std::string r;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) r += ',';
    r += num(vals[i]);
  }
  r += '\n';
  return r;
}

void write_manifest(const std::string& out_dir, const SimConfig& cfg,
                    const std::string& started, const std::string& status,
                    long steps, double t_final) {
  nlohmann::json j;
  j["code_version"] = kVersion;
  j["config_digest"] = config_digest(cfg);
  j["started_utc"] = started;
  j["finished_utc"] = now_utc();
  j["status"] = status;
  j["steps"] = steps;
  j["t_final"] = t_final;
  const fs::path tmp = fs::path(out_dir) / "manifest.json.tmp";
  const fs::path dst = fs::path(out_dir) / "manifest.json";
  spill(tmp.string(), j.dump(2) + "\n");
  fs::rename(tmp, dst);
}

std::string snapshot_name(long step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.slce", step);
  return buf;
}

std::vector<LoopSpec> parse_loops_arg(const std::string& arg) {
  std::vector<LoopSpec> out;
  std::istringstream groups(arg);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::istringstream fields(group);
    std::string field;
    std::vector<double> v;
    while (std::getline(fields, field, ','))
      v.push_back(std::stod(field));
    if (v.size() != 5)
      throw ConfigError("--loops: each group needs cx,cz,rx,rz,n");
    out.push_back({v[0], v[1], v[2], v[3], static_cast<int>(v[4])});
  }
  if (out.empty()) throw ConfigError("--loops: no loop groups given");
  return out;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  std::string config_text;
  SimConfig cfg;
  try {
    config_text = slurp(config_path);
    cfg = parse_config(config_text);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create '" + out_dir + "': " + ec.message());
    spill((fs::path(out_dir) / "config.ini").string(), config_text);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  set_projection_tolerance(cfg.projection_tol);
  const std::string started = now_utc();
  std::string status = "completed";
  int rc = 0;
  long step = 0;
  double t_final = 0.0;

  std::ofstream csv((fs::path(out_dir) / "diagnostics.csv").string(),
                    std::ios::binary | std::ios::trunc);
  csv << csv_header(cfg.loops.size());

  try {
    SliceState state = init_state(cfg.init, cfg.grid, cfg.params);

    std::vector<MaterialLoop> loops;
    for (const LoopSpec& lp : cfg.loops)
      loops.push_back(diagnostics::make_loop(cfg.grid, lp.cx, lp.cz, lp.rx,
                                             lp.rz, lp.n));
    std::optional<TracerSet> tracers;
    if (cfg.tracer_count > 0)
      tracers = diagnostics::release_tracers(state, cfg.tracer_count,
                                             cfg.tracer_seed);
    std::optional<ScalarField> psi;
    std::optional<SymmetryField> sym;
    if (!cfg.psi_bumps.empty()) {
      psi = noether::init_psi(cfg.psi_bumps, cfg.grid);
      sym = noether::make_symmetry(*psi, state, SymmetryMode::psi_generated);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double E0 = diagnostics::energy(state);
    const double dE = std::fabs(E0) > 0.0 ? std::fabs(E0) : 1.0;
    double Q0 = 0.0, dQ = 1.0;
    if (sym) {
      Q0 = noether::noether_charge(*sym, state);
      dQ = std::fabs(Q0) > 0.0 ? std::fabs(Q0) : 1.0;
    }

    {
      const double cfl0 = cfl_number(state, cfg.dt);
      std::printf("run: grid %dx%d, dt = %g s, t_end = %g s, cfl = %.3f\n",
                  cfg.grid.nx, cfg.grid.nz, cfg.dt, cfg.t_end, cfl0);
      if (cfl0 > 0.5)
        std::fprintf(stderr, "warning: cfl %.3f above 0.5\n", cfl0);
    }

    auto emit_row = [&]() {
      std::vector<double> vals;
      const double E = diagnostics::energy(state);
      vals.push_back(state.time);
      vals.push_back(E);
      vals.push_back((E - E0) / dE);
      for (const MaterialLoop& lp : loops)
        vals.push_back(diagnostics::circulation(state, lp));
      vals.push_back(tracers ? diagnostics::pv_tracers(state, *tracers).max_drift
                             : nan);
      if (sym) {
        const double Q = noether::noether_charge(*sym, state);
        vals.push_back(Q);
        vals.push_back((Q - Q0) / dQ);
        vals.push_back(noether::proposition_residual(*sym, state));
      } else {
        vals.push_back(nan);
        vals.push_back(nan);
        vals.push_back(nan);
      }
      vals.push_back(grid_ops::divergence(state.velocity.S).max_abs());
      vals.push_back(cfl_number(state, cfg.dt));
      csv << csv_row(vals);
    };
    auto emit_snapshot = [&]() {
      write_snapshot((fs::path(out_dir) / snapshot_name(step)).string(), state);
    };

    emit_row();
    emit_snapshot();

    const double tiny = 1e-9 * cfg.dt;
    while (state.time < cfg.t_end - tiny) {
      const double h = std::min(cfg.dt, cfg.t_end - state.time);
      StageVelocities stages;
      state = rk4_step(state, h, &stages);
      ++step;
      for (MaterialLoop& lp : loops) diagnostics::advect_loop(lp, stages, h);
      if (tracers) diagnostics::advect_markers(tracers->x, tracers->z, stages, h);
      if (sym) *sym = noether::evolve_symmetry(*sym, stages, state, h);

      const bool last = !(state.time < cfg.t_end - tiny);
      if (step % cfg.output_every == 0 || last) emit_row();
      if ((cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) || last)
        emit_snapshot();
    }
    t_final = state.time;
  } catch (const NumericsError& e) {
    status = std::string("numerical failure: ") + e.what();
    rc = 2;
  } catch (const ConfigError& e) {
    status = std::string("config error: ") + e.what();
    rc = 1;
  }

  csv.flush();
  write_manifest(out_dir, cfg, started, status, step, t_final);
  if (rc)
    std::fprintf(stderr, "error: %s\n", status.c_str());
  else
    std::printf("run: %ld steps to t = %g s\n", step, t_final);
  return rc;
}

int cmd_diagnose(const std::string& snapshot_path, const DiagnoseOptions& opt) {
  try {
    std::string cfg_path = opt.config_path;
    if (cfg_path.empty()) {
      cfg_path = (fs::path(snapshot_path).parent_path() / "config.ini").string();
      if (!fs::exists(cfg_path))
        throw ConfigError("no config.ini next to the snapshot; pass --config");
    }
    const SimConfig cfg = load_config(cfg_path);
    set_projection_tolerance(cfg.projection_tol);

    SliceState state = read_snapshot(snapshot_path, cfg.params);
    if (cfg.init.kind == "stratified_rest") state.tracer.s = 0.0;

    const std::vector<LoopSpec> lspecs =
        opt.loops.empty() ? cfg.loops : parse_loops_arg(opt.loops);

    const double E = diagnostics::energy(state);
    const ScalarField q = diagnostics::pv_field(state);
    double qmin = q[0], qmax = q[0];
    for (std::size_t i = 1; i < q.size(); ++i) {
      qmin = std::min(qmin, q[i]);
      qmax = std::max(qmax, q[i]);
    }
    const double qmean =
        grid_ops::integrate(q) / (cfg.grid.Lx * cfg.grid.H);
    const double divn = grid_ops::divergence(state.velocity.S).max_abs();
    const double cfl = cfl_number(state, cfg.dt);

    std::printf("t = %s\n", num(state.time).c_str());
    std::printf("energy = %s\n", num(E).c_str());
    std::printf("pv_min = %s\n", num(qmin).c_str());
    std::printf("pv_max = %s\n", num(qmax).c_str());
    std::printf("pv_mean = %s\n", num(qmean).c_str());
    std::vector<double> circs;
    for (std::size_t i = 0; i < lspecs.size(); ++i) {
      const LoopSpec& lp = lspecs[i];
      MaterialLoop loop =
          diagnostics::make_loop(cfg.grid, lp.cx, lp.cz, lp.rx, lp.rz, lp.n);
      circs.push_back(diagnostics::circulation(state, loop));
      std::printf("circ_%zu = %s\n", i, num(circs.back()).c_str());
    }
    std::printf("div_norm = %s\n", num(divn).c_str());
    std::printf("cfl = %s\n", num(cfl).c_str());

    if (!opt.csv_path.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const bool fresh = !fs::exists(opt.csv_path);
      std::ofstream out(opt.csv_path, std::ios::binary | std::ios::app);
      if (fresh) out << csv_header(circs.size());
      std::vector<double> vals{state.time, E, nan};
      for (double c : circs) vals.push_back(c);
      vals.insert(vals.end(), {nan, nan, nan, nan, divn, cfl});
      out << csv_row(vals);
      if (!out) throw ConfigError("cannot append to '" + opt.csv_path + "'");
    }
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericsError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace slicekit::cli
