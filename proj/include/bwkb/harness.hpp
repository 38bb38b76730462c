#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bwkb/bloch.hpp"
#include "bwkb/confinement.hpp"
#include "bwkb/nls.hpp"
#include "bwkb/profile.hpp"
#include "bwkb/rays.hpp"
#include "bwkb/wavefield.hpp"

namespace bwkb {

// Records below this are treated as round-off and left out of order fits.
inline constexpr Real kErrorFloor = 1e-10;

struct ErrorRecord {
  Real epsilon = 0;
  Real l2_error = 0;
  Real linf_error = 0;
  std::map<int, Real> xs_errors;  // s -> X^s_eps norm of the difference
  Real runtime_seconds = 0;
  Real worst_time = 0;            // snapshot attaining the L2 sup
  std::string failure;            // non-empty if this epsilon did not complete

  bool ok() const { return failure.empty(); }
  bool floor() const { return ok() && l2_error < kErrorFloor; }
};

// sum over a + b <= s of || x^a (eps d/dx)^b w ||_{L2}
Real xs_norm(const WaveField& w, int s);
ErrorRecord error_norms(const WaveField& psi, const WaveField& v0, int s_max);

struct OrderFit {
  Real order = std::numeric_limits<Real>::quiet_NaN();
  Index used = 0;
  bool floor = false;  // fewer than two records above the floor
};
// least-squares slope of log(error) against log(eps)
OrderFit fit_order(const std::vector<Real>& eps, const std::vector<Real>& errors);

struct Scenario {
  std::string name = "custom";
  PeriodicPotential potential;
  std::string potential_label = "zero";
  int cutoff = 32;
  int n_bands = 4;
  int band = 1;
  BandTableOptions table;
  Confinement confinement;
  InitialProfile initial;
  Complex lambda = 1.0;
  int sigma = 1;

  Real x_min = -16, x_max = 16;
  int points_per_cell = 16;
  Real dt_factor = 0.1;  // dt = min(dt_factor eps, dt_scale eps^2)
  Real dt_scale = 0.1;
  Real edge_tol = 1e-10;

  Real tau = 0.5;
  int snapshots = 8;     // uniformly spaced in [0, tau], both ends included
  Index rays = 601;
  Real ray_half_width = 6;
  int ray_steps = 72;    // ray steps per snapshot interval
  bool corrected = true;
  int s_max = 1;
  std::vector<Real> epsilons{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};

  BlochProblem problem() const { return {potential, cutoff, n_bands}; }
  Real nls_dt(Real eps) const { return std::min(dt_factor * eps, dt_scale * eps * eps); }
  UniformGrid grid(Real eps) const;
  std::vector<Real> snapshot_times() const;
  NlsConfig nls_config(Real eps) const;
};

Scenario full_scenario();
Scenario spm_scenario();
Scenario linear_free_scenario();
// by name; throws ConfigError for unknown names
Scenario builtin_scenario(const std::string& name);
bool is_builtin_scenario(const std::string& name);

BandTable scenario_band(const Scenario& s);
// rays to t_end (default tau) with the scenario's step, adjusted so t_end is a sample
RayBundle scenario_rays(const Scenario& s, const BandTable& band, Real t_end = 0);

struct ConvergenceReport {
  std::string scenario;
  bool corrected = true;
  std::vector<ErrorRecord> records;
  OrderFit l2, linf;

  bool strictly_decreasing() const;
};

// Throws PostCaustic if the ray pre-pass meets a caustic before tau. Per-epsilon
// failures are recorded in the record and do not stop the ladder.
ConvergenceReport convergence_sweep(const Scenario& s, const std::vector<Real>& epsilons);
ConvergenceReport convergence_sweep(const Scenario& s, const BandTable& band,
                                    const std::vector<Real>& epsilons);

struct SpmResult {
  Real epsilon = 0;
  Real t = 0;
  Real phase = 0;      // arg psi at the envelope peak
  Real predicted = 0;  // -lambda |a_I|^{2 sigma} t
  Real deviation = 0;  // wrapped difference
};
SpmResult self_phase_modulation(const Scenario& s, Real eps);

struct MassGrowth {
  Real overflow_time = std::numeric_limits<Real>::quiet_NaN();
  Index steps = 0;
  Real worst_defect = 0;  // max over steps of |dM^2 - trapezoid| / |dM^2|
  Real worst_ratio = 0;   // max over steps of the defect against the local trapezoid error estimate
};
// Steps a complex-coupling run until Overflow and compares every step's change of
// the squared mass with 2 Im(lambda) int |psi|^{2 sigma + 2} by the trapezoid rule.
MassGrowth track_mass_growth(const Scenario& s, Real eps, Real t_max);

}  // namespace bwkb
