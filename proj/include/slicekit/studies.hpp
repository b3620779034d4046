#pragma once

#include <functional>
#include <vector>

#include "slicekit/config.hpp"
#include "slicekit/dynamics.hpp"
#include "slicekit/slice_algebra.hpp"

// Measurement engines shared by the verification suites and the acceptance
// studies: band-limited analytic sample fields, residuals of the algebraic
// identities, and instrumented conservation and symmetry runs.

namespace slicekit::studies {

int env_threads();

// Runs independent jobs, at most SLICEKIT_THREADS at a time. Results are
// deterministic regardless of the thread count; only wall time changes.
void run_jobs(std::vector<std::function<void()>> jobs);

// 99.0 when both residuals sit at rounding.
double order_of(double coarse, double fine);

double rel_diff(const ScalarField& a, const ScalarField& b, double floor);

// Band-limited random fields, sampled from fixed analytic formulas so the
// same continuum object appears on every grid of a refinement study.
struct Harmonics {
  struct Term {
    double c, kx, m, ph;
    bool cosz;
  };
  std::vector<Term> terms;

  double val(double x, double z, double Lx, double H) const;
  double ddx(double x, double z, double Lx, double H) const;
  double ddz(double x, double z, double Lx, double H) const;
};

// amp bounds the field magnitude; interior = true keeps z-profiles at
// sin(m pi z / H) so the field vanishes at the lids. kmax/mmax bound the
// wavenumber content; order studies use low modes so the coarsest grid
// already sits in the asymptotic range.
Harmonics make_harmonics(unsigned seed, double amp, bool interior, int kmax = 3,
                         int mmax = 3);

ScalarField sample(const Harmonics& h, const Grid2D& g);

// In-slice field from an interior streamfunction: (d/dz, -d/dx) phi keeps
// the normal component zero at the lids.
SliceVelocity sample_velocity(unsigned seed, double amp_phi, double amp_T,
                              const Grid2D& g, int kmax = 3, int mmax = 3);

SliceMapSample sample_map(unsigned seed, const Grid2D& g);

SliceState random_state(const Grid2D& g, const ModelParams& p, unsigned seed);

// Residuals of the bracket and composition identities on one grid; all
// shrink at the stencil order under refinement except the first two, which
// hold to rounding at any resolution.
double antisymmetry_residual(const Grid2D& g);
double bilinearity_residual(const Grid2D& g);
double associativity_residual(const Grid2D& g);
double jacobi_residual(const Grid2D& g);

struct RunSummary {
  double energy_drift = 0.0;       // max relative
  std::vector<double> circ_drift;  // per loop, relative
  double pv_drift = 0.0;           // max, absolute
  double pv_range = 0.0;
};

// The invariants are material statements; demonstrating them to tight
// tolerances needs a flow the default grid fully resolves, so the study
// runs use a gentler shear and perturbation than the simulation defaults.
SimConfig conservation_config(int nx, int nz, double dt, double t_end);

// theta_mod_amp adds an x-independent sin(pi z / H) component to theta.
// Its buoyancy force is a pure gradient, removed exactly by the pressure
// projection, so the flow is unchanged; but it gives the PV field a smooth
// order-one dynamic range against which material drift is measured.
RunSummary conservation_run(const SimConfig& cfg, double theta_mod_amp = 0.0);

// The spatial truncation contributes a bounded dt-independent oscillation
// to the energy error, so the stepper's own share is isolated by comparing
// against a dt/8 trajectory of the same semi-discrete system at matched
// sample times.
double energy_dt_share(SimConfig cfg, double T);

// Gentle configuration for symmetry co-evolution: the two evolution routes
// differ by the product-rule defect of the vertical stencil, which
// accumulates in proportion to total strain. Weak shear and a weak
// perturbation keep that defect well under the pinned tolerances at the
// default resolution while staying far above rounding.
SimConfig noether_config(int nx, int nz, double dt, double t_end);

struct NoetherRun {
  double charge_drift = 0.0;  // relative, psi_generated
  double cross_check = 0.0;   // psi_generated vs free, normalized
  double closure_free = 0.0;  // proposition residual of the free generator
};

NoetherRun noether_run(const SimConfig& cfg);

// Max pairwise relative discrepancy between the charge, its dual form, and
// the PV-weighted integral, which agree up to the fixed factor s.
double charge_triangle(const SliceState& st, const ScalarField& psi);

}  // namespace slicekit::studies
