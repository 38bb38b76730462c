// One line per acceptance criterion; exit code 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "bwkb/error.hpp"
#include "bwkb/harness.hpp"
#include "bwkb/nls.hpp"
#include "bwkb/wigner.hpp"
#include "bwkb/wkb.hpp"

using namespace bwkb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion(const char* name, const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("raised: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s  %-34s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point s) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count();
}

const Scenario& full() {
  static const Scenario s = full_scenario();
  return s;
}
const BandTable& full_band() {
  static const BandTable b = scenario_band(full());
  return b;
}

}  // namespace

int main() {
  criterion("Hellmann-Feynman velocity", [] {
    const auto start = std::chrono::steady_clock::now();
    const BlochProblem p{potential_from_preset("mathieu:amplitude=1"), 32, 4};
    const Real h = 1e-4;
    Real worst = 0;
    for (int n : {1, 2})
      for (int i = 0; i < 20; ++i) {
        const Real k = -kPi + (i + 0.5) * 2 * kPi / 20;
        const Real v = group_velocity(p, n, k);
        const Real fd = (solve_bloch_at_k(p, k + h)[n - 1].first - solve_bloch_at_k(p, k - h)[n - 1].first) / (2 * h);
        worst = std::max(worst, std::abs(v - fd) / (1 + std::abs(v)));
      }
    const double t = elapsed(start);
    return Outcome{worst < 1e-5 && t < 5, fmt("max |v - FD|/(1+|v|) = %.2e (< 1e-5), runtime %.2f s (< 5)", worst, t)};
  });

  criterion("free-particle band table", [] {
    const auto start = std::chrono::steady_clock::now();
    const BandTable t = BandTable::build({zero_potential(), 16, 3}, 1);
    Real de = 0, dc = 0, dk = 0;
    for (Index j = 0; j < t.k_grid().size(); ++j) {
      const Real k = t.k_grid()[j];
      de = std::max(de, std::abs(t.energies()[j] - 0.5 * k * k));
      dc = std::max(dc, std::abs(t.connection()[j]));
    }
    dk = (t.kappa_samples(1).array() - 1).abs().maxCoeff();
    const double secs = elapsed(start);
    return Outcome{de < 1e-12 && dc < 1e-10 && dk < 1e-10 && secs < 1,
                   fmt("|E-k^2/2| %.1e (< 1e-12), |conn| %.1e, |kappa-1| %.1e (< 1e-10), %.2f s (< 1)", de, dc, dk, secs)};
  });

  criterion("harmonic ray oracle", [] {
    const auto start = std::chrono::steady_clock::now();
    const BandTable band = BandTable::build({zero_potential(), 16, 3}, 1);
    const RayBundle b = trace_bundle(band, Confinement::harmonic(), RealVector::LinSpaced(21, -2, 2), {}, 1,
                                     Coupling::constant(0.0), 2.0, 1e-3);
    Real ex = 0, ej = 0;
    for (const RayPath& r : b.rays)
      for (Index i = 0; i < r.samples() && r.t[i] <= 1.4 + 1e-12; ++i) {
        ex = std::max(ex, std::abs(r.x[i] - r.x0 * std::cos(r.t[i])));
        ej = std::max(ej, std::abs(r.jacobian[i] - std::cos(r.t[i])));
      }
    const Real dtau = std::abs(b.caustic_time - kPi / 2);
    const double secs = elapsed(start);
    return Outcome{ex < 1e-6 && ej < 1e-6 && dtau < 2e-3 && secs < 5,
                   fmt("x err %.1e, J err %.1e (< 1e-6), |tau - pi/2| %.1e (< 2e-3), %.2f s (< 5)", ex, ej, dtau, secs)};
  });

  criterion("modulus law along rays", [] {
    const Scenario& s = full();
    const RayBundle b = trace_bundle(full_band(), s.confinement, RealVector::LinSpaced(100, -5, 5), s.initial,
                                     s.sigma, Coupling::constant(s.lambda), s.tau, 1e-3);
    Real worst = 0;
    for (const RayPath& r : b.rays) {
      const Complex a = s.initial.envelope(r.x0);
      const ComplexVector amp = amplitude_on_ray(r, a);
      worst = std::max(worst, (amp.cwiseAbs().array() - std::abs(a)).abs().maxCoeff());
    }
    return Outcome{worst < 1e-10 && b.rays.size() == 100, fmt("max ||a~0| - |a_I|| = %.1e (< 1e-10) on 100 rays", worst)};
  });

  criterion("mass conservation", [] {
    const Scenario& s = full();
    const Real eps = 1.0 / 32;
    // 10^4 steps spanning the scenario horizon
    NlsConfig c = s.nls_config(eps);
    c.dt = s.tau / 10000;
    const CorrectorField corr = well_prepared_corrector(full_band(), s.initial, s.confinement, s.lambda.real(), s.sigma,
                                                        c.grid.points());
    SplitStepSolver solver(c, initial_data(s.initial, full_band(), eps, c.grid, &corr));
    const Real m0 = mass(solver.state());
    Real drift = 0;
    for (int i = 0; i < 10000; ++i) {
      solver.step(c.dt);
      drift = std::max(drift, std::abs(mass(solver.state()) - m0) / m0);
    }
    return Outcome{drift < 1e-10, fmt("eps=1/32, 10^4 steps to t=%.3f: max relative drift %.1e (< 1e-10)", solver.time(), drift)};
  });

  criterion("plane-wave solver oracle", [] {
    Real worst = 0;
    for (Real eps : {1.0 / 16, 1.0 / 32})
      for (int sigma : {1, 2}) {
        const Real amp = 0.7, k = 1.0, lam = 1.0;
        NlsConfig c;
        c.epsilon = eps;
        c.sigma = sigma;
        c.lambda = Coupling::constant(lam);
        c.potential = zero_potential();
        c.grid = {0, 2 * kPi, 512};
        c.dt = eps / 100;
        c.edge_tol = std::numeric_limits<Real>::infinity();
        WaveField psi = WaveField::zeros(c.grid, eps);
        for (Index i = 0; i < c.grid.n; ++i) psi.values[i] = amp * std::polar(1.0, k * c.grid.x(i) / eps);
        SplitStepSolver solver(c, psi);
        solver.advance_to(1.0);
        const Real mu = 0.5 * k * k + eps * lam * std::pow(amp, 2 * sigma);
        for (Index i = 0; i < c.grid.n; ++i) psi.values[i] = amp * std::polar(1.0, (k * c.grid.x(i) - mu) / eps);
        WaveField diff = solver.state();
        diff.values -= psi.values;
        worst = std::max(worst, mass(diff));
      }
    return Outcome{worst < 1e-8, fmt("max L2 error at t=1, dt=eps/100: %.1e (< 1e-8)", worst)};
  });

  ConvergenceReport corrected;
  criterion("convergence rate (full scenario)", [&] {
    const auto start = std::chrono::steady_clock::now();
    corrected = convergence_sweep(full(), full_band(), full().epsilons);
    const double secs = elapsed(start);
    std::string errs;
    for (const auto& r : corrected.records)
      errs += r.ok() ? fmt(" %.3e/%.3e", r.l2_error, r.linf_error) : " failed(" + r.failure + ")";
    const bool ok = corrected.l2.order >= 0.75 && corrected.l2.order <= 1.25 && corrected.linf.order >= 0.75 &&
                    corrected.strictly_decreasing() && secs < 900;
    return Outcome{ok, fmt("L2 order %.3f in [0.75,1.25], Linf order %.3f >= 0.75, decreasing %s, %.0f s (< 900); L2/Linf:",
                           corrected.l2.order, corrected.linf.order, corrected.strictly_decreasing() ? "yes" : "no", secs) +
                           errs};
  });
  {
    Scenario bare = full();
    bare.corrected = false;
    const ConvergenceReport u = convergence_sweep(bare, full_band(), bare.epsilons);
    std::string errs;
    for (const auto& r : u.records) errs += r.ok() ? fmt(" %.3e", r.l2_error) : " failed";
    std::printf("INFO  uncorrected initial data: L2 order %.4f (corrected %.4f), Linf order %.4f; L2:%s\n", u.l2.order,
                corrected.l2.order, u.linf.order, errs.c_str());
  }

  criterion("self-phase modulation", [] {
    std::string d;
    bool ok = true;
    for (Real eps : {1.0 / 16, 1.0 / 32}) {
      const SpmResult r = self_phase_modulation(spm_scenario(), eps);
      ok = ok && r.deviation < 5 * eps;
      d += fmt("eps=1/%.0f: phase %.4f vs %.4f, dev %.2e (< %.3f); ", 1 / eps, r.phase, r.predicted, r.deviation, 5 * eps);
    }
    return Outcome{ok, d};
  });

  criterion("Wigner measure", [] {
    const Scenario& s = full();
    const Real eps = 1.0 / 32, t = 0.4;
    const UniformGrid g = s.grid(eps);
    const EulerianFields f = eulerianize(scenario_rays(s, full_band(), t), t, g.points(), s.initial, full_band());
    const WignerOptions o = fan_window(f, 0.1);
    const WignerGrid num = wigner_transform(assemble_v0(f, full_band(), eps, g), o);
    const WignerGrid pred = wigner_predicted(f, full_band(), eps, g, o);
    const Real l1 = wigner_l1_discrepancy(num, pred), marginal = num.marginal_defect();
    return Outcome{l1 < 5e-2 && marginal < 1e-2,
                   fmt("eps=1/32, t=0.4: L1 discrepancy %.2e (< 5e-2), marginal defect %.1e (< 1e-2)", l1, marginal)};
  });

  criterion("complex-coupling blow-up", [] {
    const BandTable free = BandTable::build({zero_potential(), 8, 3}, 1);
    const BlowupResult b = blowup_experiment(free, Confinement::zero(), 0.0, {}, 1, Complex(0, 1), 1.0, 2.0, 1e-3);
    Scenario s = spm_scenario();
    s.lambda = Complex(0, 1);
    s.edge_tol = std::numeric_limits<Real>::infinity();
    const MassGrowth g = track_mass_growth(s, 1.0 / 32, 2.0);
    const bool ok = std::abs(b.blowup_time - 1.0) < 1e-3 && std::isfinite(g.overflow_time) && g.worst_ratio < 10;
    return Outcome{ok, fmt("ray blow-up %.6f (1 +- 1e-3); solver overflow at t=%.4f after %ld steps, "
                           "mass-law defect <= %.2f x local trapezoid error (< 10)",
                           b.blowup_time, g.overflow_time, static_cast<long>(g.steps), g.worst_ratio)};
  });

  criterion("gauge invariance end to end", [&] {
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<Real> u(-1, 1);
    std::array<Real, 8> c;
    for (auto& v : c) v = u(rng);
    const BandTable twisted = full_band().with_gauge([c](Real k) {
      return c[0] + c[1] * k + c[2] * std::cos(k) + c[3] * std::sin(k) + c[4] * std::cos(2 * k) +
             c[5] * std::sin(2 * k) + c[6] * std::cos(3 * k) + c[7] * std::sin(3 * k);
    });
    const Scenario& s = full();
    const Real eps = 1.0 / 32;
    const UniformGrid g = s.grid(eps);
    const RayBundle a = scenario_rays(s, full_band()), b = scenario_rays(s, twisted);
    Real dv = 0;
    for (Real t : s.snapshot_times()) {
      const WaveField va = assemble_v0(eulerianize(a, t, g.points(), s.initial, full_band()), full_band(), eps, g);
      const WaveField vb = assemble_v0(eulerianize(b, t, g.points(), s.initial, twisted), twisted, eps, g);
      dv = std::max(dv, (va.values.cwiseAbs() - vb.values.cwiseAbs()).cwiseAbs().maxCoeff());
    }
    const ConvergenceReport r = convergence_sweep(s, twisted, s.epsilons);
    Real de = 0;
    bool complete = r.records.size() == corrected.records.size();
    for (std::size_t i = 0; complete && i < r.records.size(); ++i) {
      complete = r.records[i].ok() && corrected.records[i].ok();
      de = std::max({de, std::abs(r.records[i].l2_error - corrected.records[i].l2_error),
                     std::abs(r.records[i].linf_error - corrected.records[i].linf_error)});
    }
    return Outcome{complete && dv < 1e-8 && de < 1e-9,
                   fmt("max ||v0| change| %.1e (< 1e-8), max report error change %.1e (< 1e-9)", dv, de)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
