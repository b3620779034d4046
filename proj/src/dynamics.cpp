#include "slicekit/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "slicekit/errors.hpp"
#include "slicekit/grid_ops.hpp"
#include "slicekit/kernels.hpp"
#include "slicekit/spectral.hpp"

namespace slicekit {

void ModelParams::validate() const {
  if (!(gravity > 0.0)) throw ConfigError("params: gravity must be > 0");
  if (!(theta0 > 0.0)) throw ConfigError("params: theta0 must be > 0");
  if (!(Lx > 0.0)) throw ConfigError("params: Lx must be > 0");
  if (!(H > 0.0)) throw ConfigError("params: H must be > 0");
  if (!std::isfinite(f) || !std::isfinite(s))
    throw ConfigError("params: f and s must be finite");
}

SliceState::SliceState(const Grid2D& g, const ModelParams& p)
    : velocity(g), tracer(g, p.s), density(g, 1.0), params(p) {
  params.validate();
  if (p.Lx != g.Lx || p.H != g.H)
    throw ConfigError("params Lx/H disagree with the grid");
}

namespace {
std::atomic<double> g_projection_tol{1e-10};
}

void set_projection_tolerance(double tol) {
  if (!(tol > 0.0)) throw ConfigError("projection tolerance must be > 0");
  g_projection_tol.store(tol, std::memory_order_relaxed);
}

double projection_tolerance() {
  return g_projection_tol.load(std::memory_order_relaxed);
}

ScalarField buoyancy_factor(const Grid2D& g, const ModelParams& p) {
  ScalarField b(g);
  const double c = p.gravity / p.theta0;
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iz = 0; iz < g.nz; ++iz) b.at(ix, iz) = c * (g.z(iz) - 0.5 * p.H);
  return b;
}

namespace {

// Unprojected momentum tendency (-u·∇u_x + f u_T, -u·∇u_z + (g/θ0)θ_S).
VectorField2 momentum_forcing(const SliceState& st) {
  const Grid2D& g = st.grid();
  const auto& k = kernels::ops();
  VectorField2 F(g);
  ScalarField adv = grid_ops::advect(st.velocity.S, st.velocity.S.x);
  k.axpby(F.x.data(), -1.0, adv.data(), st.params.f, st.velocity.T.data(), g.size());
  adv = grid_ops::advect(st.velocity.S, st.velocity.S.z);
  k.axpby(F.z.data(), -1.0, adv.data(), st.params.gravity / st.params.theta0,
          st.tracer.theta.data(), g.size());
  return F;
}

// Neumann pressure for v: solves the compact Laplacian against div(v) with
// dp/dz at the lids read from bc_z's lid rows. The x-mean compatibility
// defect (an O(dz^2) quadrature mismatch between the divergence stencil and
// the trapezoid rule, not a data error) is removed as a uniform constant
// before the solve.
ScalarField neumann_pressure(const VectorField2& v, const ScalarField& bc_z) {
  const Grid2D& g = v.grid();
  require_same_grid(g, bc_z.grid());
  ScalarField rhs = grid_ops::divergence(v);
  std::vector<double> nb(g.nx), nt(g.nx);
  for (int ix = 0; ix < g.nx; ++ix) {
    nb[ix] = bc_z.at(ix, 0);
    nt[ix] = bc_z.at(ix, g.nz - 1);
  }
  double flux = 0.0;
  for (int ix = 0; ix < g.nx; ++ix) flux += nt[ix] - nb[ix];
  flux *= g.dx;
  const double defect = (flux - grid_ops::integrate(rhs)) / (g.Lx * g.H);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += defect;
  return SpectralEngine::shared(g).poisson_neumann(rhs, nb, nt,
                                                   projection_tolerance());
}

SliceState stage_state(const SliceState& s0, const Tendencies& k, double h) {
  SliceState y = s0;
  const Grid2D& g = s0.grid();
  const auto& ops = kernels::ops();
  ops.add_scaled(y.velocity.S.x.data(), s0.velocity.S.x.data(), h, k.du_S.x.data(),
                 g.size());
  ops.add_scaled(y.velocity.S.z.data(), s0.velocity.S.z.data(), h, k.du_S.z.data(),
                 g.size());
  ops.add_scaled(y.velocity.T.data(), s0.velocity.T.data(), h, k.du_T.data(),
                 g.size());
  ops.add_scaled(y.tracer.theta.data(), s0.tracer.theta.data(), h, k.dtheta.data(),
                 g.size());
  y.time = s0.time + h;
  return y;
}

void check_finite(const ScalarField& f, const char* name, double t) {
  if (!all_finite(f)) {
    std::ostringstream os;
    os << "blow-up detected in " << name << " at t=" << t;
    throw NumericsError(os.str());
  }
}

}  // namespace

ScalarField pressure_field(const SliceState& state) {
  VectorField2 F = momentum_forcing(state);
  return neumann_pressure(F, F.z);
}

std::pair<VectorField2, ScalarField> project(const VectorField2& u_star,
                                             const ScalarField& bc_z) {
  const Grid2D& g = u_star.grid();
  ScalarField p = neumann_pressure(u_star, bc_z);
  VectorField2 gp = grid_ops::grad(p);
  VectorField2 u(g);
  const auto& k = kernels::ops();
  k.add_scaled(u.x.data(), u_star.x.data(), -1.0, gp.x.data(), g.size());
  k.add_scaled(u.z.data(), u_star.z.data(), -1.0, gp.z.data(), g.size());
  SpectralEngine::shared(g).solenoidal_project(u);
  return {std::move(u), std::move(p)};
}

VarDerivs eb_var_derivs(const SliceState& state) {
  const Grid2D& g = state.grid();
  const ModelParams& p = state.params;
  VarDerivs vd{VectorField2(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  vd.m_S = state.velocity.S;
  vd.b = buoyancy_factor(g, p);
  ScalarField press = pressure_field(state);
  for (int ix = 0; ix < g.nx; ++ix) {
    const double fx = p.f * g.x(ix);
    for (int iz = 0; iz < g.nz; ++iz) {
      const double ux = state.velocity.S.x.at(ix, iz);
      const double uz = state.velocity.S.z.at(ix, iz);
      const double ut = state.velocity.T.at(ix, iz);
      vd.m_T.at(ix, iz) = ut + fx;
      vd.dldD.at(ix, iz) = 0.5 * (ux * ux + uz * uz + ut * ut) + fx * ut -
                           press.at(ix, iz) +
                           vd.b.at(ix, iz) * state.tracer.theta.at(ix, iz);
    }
  }
  return vd;
}

Tendencies eb_rhs(const SliceState& state) { return eb_rhs(state, nullptr); }

Tendencies eb_rhs(const SliceState& state, ScalarField* pressure_out) {
  const Grid2D& g = state.grid();
  const double s = state.tracer.s;
  const auto& k = kernels::ops();

  VectorField2 F = momentum_forcing(state);
  auto [du_S, p] = project(F, F.z);
  if (pressure_out) *pressure_out = p;

  Tendencies t{std::move(du_S), ScalarField(g), ScalarField(g)};

  ScalarField adv = grid_ops::advect(state.velocity.S, state.velocity.T);
  ScalarField tmp(g);
  k.axpby(tmp.data(), -1.0, adv.data(), -state.params.f,
          state.velocity.S.x.data(), g.size());
  ScalarField bfac = buoyancy_factor(g, state.params);
  k.add_scaled(t.du_T.data(), tmp.data(), -s, bfac.data(), g.size());

  adv = grid_ops::advect(state.velocity.S, state.tracer.theta);
  k.axpby(t.dtheta.data(), -1.0, adv.data(), -s, state.velocity.T.data(), g.size());
  return t;
}

SliceState rk4_step(const SliceState& state, double dt, StageVelocities* stages) {
  if (!(dt >= 0.0)) throw ConfigError("rk4_step: dt must be >= 0");
  if (dt == 0.0) {
    if (stages) {
      stages->v1 = state.velocity;
      stages->v2 = state.velocity;
      stages->v3 = state.velocity;
      stages->v4 = state.velocity;
    }
    return state;
  }
  const Grid2D& g = state.grid();
  const auto& ops = kernels::ops();

  Tendencies k1 = eb_rhs(state);
  SliceState y2 = stage_state(state, k1, 0.5 * dt);
  Tendencies k2 = eb_rhs(y2);
  SliceState y3 = stage_state(state, k2, 0.5 * dt);
  Tendencies k3 = eb_rhs(y3);
  SliceState y4 = stage_state(state, k3, dt);
  Tendencies k4 = eb_rhs(y4);

  SliceState out = state;
  const double c1 = dt / 6.0, c2 = dt / 3.0;
  ops.comb4(out.velocity.S.x.data(), state.velocity.S.x.data(), c1,
            k1.du_S.x.data(), c2, k2.du_S.x.data(), c2, k3.du_S.x.data(), c1,
            k4.du_S.x.data(), g.size());
  ops.comb4(out.velocity.S.z.data(), state.velocity.S.z.data(), c1,
            k1.du_S.z.data(), c2, k2.du_S.z.data(), c2, k3.du_S.z.data(), c1,
            k4.du_S.z.data(), g.size());
  ops.comb4(out.velocity.T.data(), state.velocity.T.data(), c1, k1.du_T.data(),
            c2, k2.du_T.data(), c2, k3.du_T.data(), c1, k4.du_T.data(), g.size());
  ops.comb4(out.tracer.theta.data(), state.tracer.theta.data(), c1,
            k1.dtheta.data(), c2, k2.dtheta.data(), c2, k3.dtheta.data(), c1,
            k4.dtheta.data(), g.size());
  SpectralEngine::shared(g).solenoidal_project(out.velocity.S);
  out.time = state.time + dt;

  check_finite(out.velocity.S.x, "u_S.x", out.time);
  check_finite(out.velocity.S.z, "u_S.z", out.time);
  check_finite(out.velocity.T, "u_T", out.time);
  check_finite(out.tracer.theta, "theta_S", out.time);

  if (stages) {
    stages->v1 = state.velocity;
    stages->v2 = std::move(y2.velocity);
    stages->v3 = std::move(y3.velocity);
    stages->v4 = std::move(y4.velocity);
  }
  return out;
}

SliceState init_state(const InitSpec& init, const Grid2D& grid,
                      const ModelParams& params) {
  SliceState st(grid, params);
  const ModelParams& p = params;

  if (init.kind == "rest") return st;

  if (init.kind == "stratified_rest") {
    st.tracer.s = 0.0;
    const double c = init.N2 * p.theta0 / p.gravity;
    for (int ix = 0; ix < grid.nx; ++ix)
      for (int iz = 0; iz < grid.nz; ++iz)
        st.tracer.theta.at(ix, iz) = c * grid.z(iz);
    return st;
  }

  if (init.kind == "eady_basic" || init.kind == "eady_perturbed") {
    if (p.f == 0.0)
      throw ConfigError("init: Eady states require a nonzero Coriolis parameter");
    const double shear = -(p.gravity * p.s) / (p.f * p.theta0);
    const double c = init.N2 * p.theta0 / p.gravity;
    for (int ix = 0; ix < grid.nx; ++ix) {
      for (int iz = 0; iz < grid.nz; ++iz) {
        const double z = grid.z(iz);
        st.velocity.S.x.at(ix, iz) = shear * (z - 0.5 * p.H);
        st.tracer.theta.at(ix, iz) = c * z;
      }
    }
    if (init.kind == "eady_basic" ||
        (init.amplitude == 0.0 && init.amplitude_inplane == 0.0))
      return st;

    if (init.mode < 1 || init.mode >= grid.nx / 2)
      throw ConfigError("init: perturbation mode must resolve on the grid");
    const double k = 2.0 * M_PI * init.mode / p.Lx;
    const double a = init.amplitude;
    const double ai = init.amplitude_inplane;
    // Transverse jet with its thermal-wind temperature companion keeps the
    // perturbation close to balance; the in-plane streamfunction kick
    // vanishes at the lids.
    const double ct = p.theta0 * p.f * a * M_PI / (p.gravity * k * p.H);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x(ix);
      for (int iz = 0; iz < grid.nz; ++iz) {
        const double z = grid.z(iz);
        const double sz = std::sin(M_PI * z / p.H);
        st.velocity.T.at(ix, iz) += a * std::sin(k * x) * std::cos(M_PI * z / p.H);
        st.tracer.theta.at(ix, iz) += -ct * std::cos(k * x) * sz;
        st.velocity.S.x.at(ix, iz) +=
            ai * std::sin(k * x) * std::sin(2.0 * M_PI * z / p.H);
        st.velocity.S.z.at(ix, iz) +=
            -ai * (k * p.H / M_PI) * std::cos(k * x) * sz * sz;
      }
    }
    SpectralEngine::shared(grid).solenoidal_project(st.velocity.S);
    return st;
  }

  throw ConfigError("init: unknown kind '" + init.kind + "'");
}

double cfl_number(const SliceState& state, double dt) {
  const Grid2D& g = state.grid();
  const double umax =
      std::max(state.velocity.S.x.max_abs(), state.velocity.S.z.max_abs());
  return dt * umax / std::min(g.dx, g.dz);
}

}  // namespace slicekit
