#include "slicekit/noether.hpp"

#include <cmath>
#include <cstddef>

#include "slicekit/diagnostics.hpp"
#include "slicekit/errors.hpp"
#include "slicekit/grid_ops.hpp"
#include "slicekit/kernels.hpp"
#include "slicekit/slice_algebra.hpp"

namespace slicekit::noether {

namespace {

void require_s(double s, const char* where) {
  if (s == 0.0)
    throw NumericsError(std::string(where) +
                        ": s = 0 leaves no transverse closure (w_S would be "
                        "restricted to theta_S contours)");
}

double wrap_half(double d, double Lx) { return d - Lx * std::round(d / Lx); }

}  // namespace

ScalarField init_psi(const std::vector<PsiSpec>& bumps, const Grid2D& g) {
  ScalarField psi(g);
  for (const PsiSpec& b : bumps) {
    if (!(b.sx > 0.0) || !(b.sz > 0.0))
      throw ConfigError("psi: bump widths must be > 0");
    if (b.kind == "gaussian_bump") {
      for (int ix = 0; ix < g.nx; ++ix) {
        const double dx = wrap_half(g.x(ix) - b.cx, g.Lx) / b.sx;
        for (int iz = 0; iz < g.nz; ++iz) {
          const double dz = (g.z(iz) - b.cz) / b.sz;
          psi.at(ix, iz) += b.amplitude * std::exp(-0.5 * (dx * dx + dz * dz));
        }
      }
    } else if (b.kind == "cosine_bump") {
      for (int ix = 0; ix < g.nx; ++ix) {
        const double dx = wrap_half(g.x(ix) - b.cx, g.Lx) / b.sx;
        for (int iz = 0; iz < g.nz; ++iz) {
          const double dz = (g.z(iz) - b.cz) / b.sz;
          const double r = std::sqrt(dx * dx + dz * dz);
          if (r < 1.0) {
            const double c = std::cos(0.5 * M_PI * r);
            psi.at(ix, iz) += b.amplitude * (c * c) * (c * c);
          }
        }
      }
    } else {
      throw ConfigError("psi: unknown bump kind '" + b.kind + "'");
    }
  }
  double lid = 0.0;
  for (int ix = 0; ix < g.nx; ++ix)
    lid = std::max(lid, std::max(std::fabs(psi.at(ix, 0)),
                                 std::fabs(psi.at(ix, g.nz - 1))));
  if (lid > 1e-14 * psi.max_abs())
    throw ConfigError("psi: bump support reaches a lid; shrink or recenter it");
  return psi;
}

VectorField2 w_from_psi(const ScalarField& psi, const DensityField& D) {
  const Grid2D& g = psi.grid();
  require_same_grid(g, D.grid());
  VectorField2 gp = grid_ops::grad(psi);
  VectorField2 w(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    w.x[i] = gp.z[i] / D.D[i];
    w.z[i] = -gp.x[i] / D.D[i];
  }
  return w;
}

ScalarField w_T_closure(const VectorField2& w_S, const TracerPair& tracer) {
  require_s(tracer.s, "w_T_closure");
  ScalarField adv = grid_ops::advect(w_S, tracer.theta);
  ScalarField w(w_S.grid());
  kernels::ops().scale(w.data(), -1.0 / tracer.s, adv.data(), w.size());
  return w;
}

SymmetryField make_symmetry(const ScalarField& psi, const SliceState& state,
                            SymmetryMode mode) {
  SymmetryField sym;
  sym.psi = psi;
  sym.w_S = w_from_psi(psi, state.density);
  sym.w_T = w_T_closure(sym.w_S, state.tracer);
  sym.mode = mode;
  return sym;
}

SymmetryField evolve_symmetry(const SymmetryField& sym,
                              const StageVelocities& stages,
                              const SliceState& state_after, double dt) {
  if (dt == 0.0) return sym;
  const Grid2D& g = sym.psi.grid();
  require_same_grid(g, state_after.grid());
  const auto& k = kernels::ops();
  const SliceVelocity* v[4] = {&stages.v1, &stages.v2, &stages.v3, &stages.v4};

  SymmetryField out = sym;

  // psi transports passively in either mode.
  {
    ScalarField a1 = grid_ops::advect(v[0]->S, sym.psi);
    ScalarField y = add_scaled(sym.psi, -0.5 * dt, a1);
    ScalarField a2 = grid_ops::advect(v[1]->S, y);
    y = add_scaled(sym.psi, -0.5 * dt, a2);
    ScalarField a3 = grid_ops::advect(v[2]->S, y);
    y = add_scaled(sym.psi, -dt, a3);
    ScalarField a4 = grid_ops::advect(v[3]->S, y);
    k.comb4(out.psi.data(), sym.psi.data(), -dt / 6.0, a1.data(), -dt / 3.0,
            a2.data(), -dt / 3.0, a3.data(), -dt / 6.0, a4.data(), g.size());
  }

  if (sym.mode == SymmetryMode::psi_generated) {
    out.w_S = w_from_psi(out.psi, state_after.density);
    out.w_T = w_T_closure(out.w_S, state_after.tracer);
  } else {
    // dw/dt = -[u, w] on the full algebra element (w_S, w_T).
    SliceVelocity w0(g);
    w0.S = sym.w_S;
    w0.T = sym.w_T;
    auto stage = [&](const SliceVelocity& base, const SliceVelocity& kk,
                     double h) {
      SliceVelocity y(g);
      k.add_scaled(y.S.x.data(), base.S.x.data(), -h, kk.S.x.data(), g.size());
      k.add_scaled(y.S.z.data(), base.S.z.data(), -h, kk.S.z.data(), g.size());
      k.add_scaled(y.T.data(), base.T.data(), -h, kk.T.data(), g.size());
      return y;
    };
    SliceVelocity b1 = slice_algebra::lie_bracket(*v[0], w0);
    SliceVelocity y = stage(w0, b1, 0.5 * dt);
    SliceVelocity b2 = slice_algebra::lie_bracket(*v[1], y);
    y = stage(w0, b2, 0.5 * dt);
    SliceVelocity b3 = slice_algebra::lie_bracket(*v[2], y);
    y = stage(w0, b3, dt);
    SliceVelocity b4 = slice_algebra::lie_bracket(*v[3], y);
    k.comb4(out.w_S.x.data(), w0.S.x.data(), -dt / 6.0, b1.S.x.data(),
            -dt / 3.0, b2.S.x.data(), -dt / 3.0, b3.S.x.data(), -dt / 6.0,
            b4.S.x.data(), g.size());
    k.comb4(out.w_S.z.data(), w0.S.z.data(), -dt / 6.0, b1.S.z.data(),
            -dt / 3.0, b2.S.z.data(), -dt / 3.0, b3.S.z.data(), -dt / 6.0,
            b4.S.z.data(), g.size());
    k.comb4(out.w_T.data(), w0.T.data(), -dt / 6.0, b1.T.data(), -dt / 3.0,
            b2.T.data(), -dt / 3.0, b3.T.data(), -dt / 6.0, b4.T.data(),
            g.size());
  }

  if (!all_finite(out.psi) || !all_finite(out.w_S.x) ||
      !all_finite(out.w_S.z) || !all_finite(out.w_T))
    throw NumericsError("symmetry evolution produced non-finite values");
  return out;
}

double proposition_residual(const SymmetryField& sym, const SliceState& state) {
  require_s(state.tracer.s, "proposition_residual");
  const Grid2D& g = state.grid();
  ScalarField adv = grid_ops::advect(sym.w_S, state.tracer.theta);
  ScalarField res(g);
  kernels::ops().add_scaled(res.data(), sym.w_T.data(), 1.0 / state.tracer.s,
                            adv.data(), g.size());
  const double scale =
      sym.w_T.max_abs() + adv.max_abs() / std::fabs(state.tracer.s);
  return (scale > 0.0) ? res.max_abs() / scale : 0.0;
}

double noether_charge(const SymmetryField& sym, const SliceState& state) {
  const Grid2D& g = state.grid();
  require_same_grid(g, sym.w_T.grid());
  ScalarField e(g);
  const double f = state.params.f;
  for (int ix = 0; ix < g.nx; ++ix) {
    const double fx = f * g.x(ix);
    for (int iz = 0; iz < g.nz; ++iz) {
      const std::size_t i = g.idx(ix, iz);
      e[i] = state.density.D[i] *
             (state.velocity.S.x[i] * sym.w_S.x[i] +
              state.velocity.S.z[i] * sym.w_S.z[i] +
              (state.velocity.T[i] + fx) * sym.w_T[i]);
    }
  }
  return grid_ops::integrate(e);
}

double noether_charge_dual(const ScalarField& psi, const SliceState& state) {
  const double s = state.tracer.s;
  require_s(s, "noether_charge_dual");
  const Grid2D& g = state.grid();
  require_same_grid(g, psi.grid());
  const auto& k = kernels::ops();

  VectorField2 gth = grid_ops::grad(state.tracer.theta);
  VectorField2 alpha(g);
  k.hadamard(alpha.x.data(), state.velocity.T.data(), gth.x.data(), g.size());
  k.hadamard(alpha.z.data(), state.velocity.T.data(), gth.z.data(), g.size());
  k.axpby(alpha.x.data(), 1.0, state.velocity.S.x.data(), -1.0 / s,
          alpha.x.data(), g.size());
  k.axpby(alpha.z.data(), 1.0, state.velocity.S.z.data(), -1.0 / s,
          alpha.z.data(), g.size());
  ScalarField pd = grid_ops::perp_div(alpha);
  ScalarField dzth = grid_ops::ddz(state.tracer.theta);
  k.add_scaled(pd.data(), pd.data(), -state.params.f / s, dzth.data(), g.size());
  ScalarField e(g);
  k.hadamard(e.data(), psi.data(), pd.data(), g.size());
  return grid_ops::integrate(e);
}

double noether_pv_check(const SymmetryField& sym, const SliceState& state) {
  if (sym.mode != SymmetryMode::psi_generated)
    throw ConfigError("noether_pv_check: needs a psi_generated symmetry");
  const Grid2D& g = state.grid();
  require_same_grid(g, sym.psi.grid());
  ScalarField q = diagnostics::pv_field(state);
  ScalarField e(g);
  const auto& k = kernels::ops();
  k.hadamard(e.data(), sym.psi.data(), q.data(), e.size());
  k.hadamard(e.data(), e.data(), state.density.D.data(), e.size());
  return grid_ops::integrate(e);
}

}  // namespace slicekit::noether
