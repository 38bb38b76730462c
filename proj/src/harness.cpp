#include "bwkb/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "bwkb/error.hpp"
#include "bwkb/parallel.hpp"
#include "bwkb/rays.hpp"
#include "bwkb/spectral.hpp"
#include "bwkb/wkb.hpp"

namespace bwkb {

Real xs_norm(const WaveField& w, int s) {
  if (s < 0) throw InvalidArgument("s must be nonnegative");
  const Real dx = w.grid.dx();
  const RealVector x = w.grid.points();
  Fft fft;
  Real total = 0;
  ComplexVector deriv = w.values;
  for (int b = 0; b <= s; ++b) {
    if (b > 0) deriv = w.epsilon * spectral_derivative(deriv, w.grid.length(), 1, fft);
    ComplexVector weighted = deriv;
    for (int a = 0; a + b <= s; ++a) {
      if (a > 0) weighted = weighted.cwiseProduct(x.cast<Complex>());
      total += std::sqrt(weighted.squaredNorm() * dx);
    }
  }
  return total;
}

ErrorRecord error_norms(const WaveField& psi, const WaveField& v0, int s_max) {
  require_same_grid(psi, v0);
  if (psi.epsilon != v0.epsilon) throw GridMismatch("fields carry different epsilon");
  WaveField diff = psi;
  diff.values -= v0.values;
  ErrorRecord r;
  r.epsilon = psi.epsilon;
  r.l2_error = mass(diff);
  r.linf_error = diff.values.size() ? diff.values.cwiseAbs().maxCoeff() : 0.0;
  for (int s = 0; s <= s_max; ++s) r.xs_errors[s] = xs_norm(diff, s);
  r.worst_time = psi.t;
  return r;
}

OrderFit fit_order(const std::vector<Real>& eps, const std::vector<Real>& errors) {
  if (eps.size() != errors.size()) throw InvalidArgument("ladder and errors differ in length");
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  OrderFit fit;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(errors[i] >= kErrorFloor) || !std::isfinite(errors[i])) continue;
    const Real lx = std::log(eps[i]), ly = std::log(errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.used;
  }
  if (fit.used < 2) {
    fit.floor = true;
    return fit;
  }
  const Real n = static_cast<Real>(fit.used);
  fit.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

UniformGrid Scenario::grid(Real eps) const {
  return wave_grid(x_min, x_max, eps, potential.lattice().period, points_per_cell);
}

std::vector<Real> Scenario::snapshot_times() const {
  std::vector<Real> t(snapshots);
  for (int i = 0; i < snapshots; ++i) t[i] = snapshots > 1 ? tau * i / (snapshots - 1) : tau;
  return t;
}

NlsConfig Scenario::nls_config(Real eps) const {
  NlsConfig c;
  c.epsilon = eps;
  c.sigma = sigma;
  c.lambda = Coupling::constant(lambda);
  c.potential = potential;
  c.confinement = confinement;
  c.grid = grid(eps);
  c.dt = nls_dt(eps);
  c.dt_factor = dt_factor;
  c.edge_tol = edge_tol;
  c.snapshot_times = snapshot_times();
  return c;
}

Scenario full_scenario() {
  Scenario s;
  s.name = "full_scenario";
  s.potential_label = "mathieu:amplitude=1";
  s.potential = potential_from_preset(s.potential_label);
  s.confinement = Confinement::harmonic(1.0);
  return s;
}

Scenario spm_scenario() {
  Scenario s;
  s.name = "spm_scenario";
  s.potential_label = "zero";
  s.potential = zero_potential();
  s.cutoff = 8;
  s.n_bands = 3;
  s.confinement = Confinement::zero();
  s.tau = 1.0;
  s.epsilons = {1.0 / 16, 1.0 / 32};
  return s;
}

Scenario linear_free_scenario() {
  Scenario s;
  s.name = "linear_free";
  s.potential_label = "zero";
  s.potential = zero_potential();
  s.cutoff = 8;
  s.n_bands = 3;
  s.confinement = Confinement::zero();
  s.lambda = 0.0;
  // flat envelope: the approximation is exact and errors sit at round-off
  s.initial.width = std::numeric_limits<Real>::infinity();
  s.edge_tol = std::numeric_limits<Real>::infinity();
  s.ray_half_width = 16;
  s.rays = 65;
  s.epsilons = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  return s;
}

bool is_builtin_scenario(const std::string& name) {
  return name == "full_scenario" || name == "spm_scenario" || name == "linear_free";
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "full_scenario") return full_scenario();
  if (name == "spm_scenario") return spm_scenario();
  if (name == "linear_free") return linear_free_scenario();
  throw ConfigError("unknown scenario '" + name + "'");
}

BandTable scenario_band(const Scenario& s) { return BandTable::build(s.problem(), s.band, s.table); }

RayBundle scenario_rays(const Scenario& s, const BandTable& band, Real t_end) {
  const Real ray_dt = s.snapshots > 1 ? s.tau / (s.snapshots - 1) / s.ray_steps : s.tau / s.ray_steps;
  if (t_end <= 0) t_end = s.tau;
  return trace_bundle(band, s.confinement, RealVector::LinSpaced(s.rays, -s.ray_half_width, s.ray_half_width),
                      s.initial, s.sigma, Coupling::constant(s.lambda), t_end, ray_dt);
}

bool ConvergenceReport::strictly_decreasing() const {
  for (std::size_t i = 1; i < records.size(); ++i)
    if (!records[i].ok() || !records[i - 1].ok() || !(records[i].l2_error < records[i - 1].l2_error))
      return false;
  return records.size() > 1;
}

ConvergenceReport convergence_sweep(const Scenario& s, const std::vector<Real>& epsilons) {
  return convergence_sweep(s, scenario_band(s), epsilons);
}

ConvergenceReport convergence_sweep(const Scenario& s, const BandTable& band,
                                    const std::vector<Real>& epsilons) {
  const RayBundle bundle = scenario_rays(s, band);
  if (bundle.caustic_time <= s.tau)
    throw PostCaustic("scenario horizon reaches the first caustic", bundle.caustic_time);

  ConvergenceReport report;
  report.scenario = s.name;
  report.corrected = s.corrected;
  report.records.resize(epsilons.size());
  parallel_for(static_cast<Index>(epsilons.size()), [&](Index e) {
    const Real eps = epsilons[e];
    ErrorRecord& rec = report.records[e];
    rec.epsilon = eps;
    const auto start = std::chrono::steady_clock::now();
    try {
      const NlsConfig config = s.nls_config(eps);
      const RealVector x = config.grid.points();
      CorrectorField corrector;
      if (s.corrected)
        corrector = well_prepared_corrector(band, s.initial, s.confinement, s.lambda.real(), s.sigma, x);
      SplitStepSolver solver(config, initial_data(s.initial, band, eps, config.grid, s.corrected ? &corrector : nullptr));
      for (Real t : config.snapshot_times) {
        solver.advance_to(t);
        const WaveField v0 = assemble_v0(eulerianize(bundle, t, x, s.initial, band), band, eps, config.grid);
        const ErrorRecord snap = error_norms(solver.state(), v0, s.s_max);
        if (snap.l2_error >= rec.l2_error) {
          rec.l2_error = snap.l2_error;
          rec.worst_time = t;
        }
        rec.linf_error = std::max(rec.linf_error, snap.linf_error);
        for (const auto& [k, v] : snap.xs_errors) rec.xs_errors[k] = std::max(rec.xs_errors[k], v);
      }
    } catch (const std::exception& ex) {
      rec.failure = ex.what();
    }
    rec.runtime_seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
  });

  std::vector<Real> eps, l2, linf;
  for (const auto& r : report.records) {
    if (!r.ok()) continue;
    eps.push_back(r.epsilon);
    l2.push_back(r.l2_error);
    linf.push_back(r.linf_error);
  }
  report.l2 = fit_order(eps, l2);
  report.linf = fit_order(eps, linf);
  return report;
}

SpmResult self_phase_modulation(const Scenario& s, Real eps) {
  NlsConfig config = s.nls_config(eps);
  config.snapshot_times = {s.tau};
  const BandTable band = scenario_band(s);
  SplitStepSolver solver(config, initial_data(s.initial, band, eps, config.grid));
  solver.advance_to(s.tau);
  const Index peak = std::clamp<Index>(
      static_cast<Index>(std::lround((s.initial.center - config.grid.x_min) / config.grid.dx())), 0, config.grid.n - 1);
  SpmResult r;
  r.epsilon = eps;
  r.t = s.tau;
  r.phase = std::arg(solver.state().values[peak]);
  r.predicted = -s.lambda.real() * std::pow(std::abs(s.initial.envelope(config.grid.x(peak))), 2 * s.sigma) * s.tau;
  r.deviation = std::abs(std::arg(std::polar(1.0, r.phase - r.predicted)));
  return r;
}

MassGrowth track_mass_growth(const Scenario& s, Real eps, Real t_max) {
  NlsConfig config = s.nls_config(eps);
  const BandTable band = scenario_band(s);
  SplitStepSolver solver(config, initial_data(s.initial, band, eps, config.grid));
  const Real dx = config.grid.dx();
  const Real h = config.dt;
  auto m2 = [&] { return solver.state().values.squaredNorm() * dx; };
  auto rate = [&] {
    return 2 * config.lambda(solver.time()).imag() *
           solver.state().values.cwiseAbs2().array().pow(s.sigma + 1).sum() * dx;
  };
  MassGrowth g;
  Real r_prev = std::numeric_limits<Real>::quiet_NaN();
  Real r0 = rate(), before = m2();
  try {
    while (solver.time() < t_max) {
      solver.step(h);
      ++g.steps;
      const Real r1 = rate(), after = m2();
      const Real defect = std::abs((after - before) - 0.5 * h * (r0 + r1));
      if (after != before) g.worst_defect = std::max(g.worst_defect, defect / std::abs(after - before));
      if (std::isfinite(r_prev)) {
        // trapezoid error h^3 |r''| / 12 with r'' from the neighbouring steps
        const Real estimate = h * std::abs(r1 - 2 * r0 + r_prev) / 12;
        if (estimate > 0) g.worst_ratio = std::max(g.worst_ratio, defect / estimate);
      }
      r_prev = r0;
      r0 = r1;
      before = after;
    }
  } catch (const Overflow& e) {
    g.overflow_time = e.last_valid_time();
  }
  return g;
}

}  // namespace bwkb
