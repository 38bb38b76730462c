#include "bwkb/rays.hpp"

#include <cmath>

#include "bwkb/error.hpp"
#include "bwkb/parallel.hpp"

namespace bwkb {

namespace {

using State = Eigen::Matrix<Real, 7, 1>;
enum : int { X, K, DX, DK, PHI, NL, W };

struct Flow {
  const BandTable& band;
  const Confinement& u;
  int sigma;
  const Coupling& lambda;
  Real a_pow;  // |a_I|^{2 sigma}
  bool blowup = false;

  State operator()(Real t, const State& s) const {
    const auto [e, v, e2] = band.energy_derivs(s[K]);
    const Real kappa = band.kappa(s[K], sigma);
    const Real jpow = std::pow(s[DX], sigma);
    const Complex lam = lambda(t);
    State d;
    d[X] = v;
    d[K] = -u.gradient(s[X]);
    d[DX] = e2 * s[DK];
    d[DK] = -u.hessian(s[X]) * s[DX];
    d[PHI] = s[K] * v - e - u.value(s[X]);
    d[NL] = -lam.real() * kappa * a_pow / jpow;
    // w = |a|^{-2 sigma}
    d[W] = blowup ? -sigma * lam.imag() * kappa / jpow : 0.0;
    if (!blowup && lam.imag() != 0.0)
      throw InvalidArgument("ray transport needs a real coupling; use blowup_experiment");
    return d;
  }
};

State rk4(const Flow& f, Real t, const State& s, Real h) {
  const State k1 = f(t, s);
  const State k2 = f(t + 0.5 * h, s + 0.5 * h * k1);
  const State k3 = f(t + 0.5 * h, s + 0.5 * h * k2);
  const State k4 = f(t + h, s + h * k3);
  return s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Index step_count(Real t_end, Real dt) {
  if (!(t_end > 0) || !(dt > 0)) throw InvalidArgument("t_end and dt must be positive");
  return std::max<Index>(1, static_cast<Index>(std::ceil(t_end / dt - 1e-9)));
}

State initial_state(const InitialProfile& initial, Real x0) {
  State s = State::Zero();
  s[X] = x0;
  s[K] = initial.phase_gradient(x0);
  s[DX] = 1.0;
  s[DK] = initial.phase_hessian(x0);
  s[PHI] = initial.phase(x0);
  return s;
}

}  // namespace

RealVector RayBundle::x0() const {
  RealVector out(static_cast<Index>(rays.size()));
  for (std::size_t i = 0; i < rays.size(); ++i) out[static_cast<Index>(i)] = rays[i].x0;
  return out;
}

bool RayBundle::monotone_at(Index i) const {
  for (std::size_t r = 1; r < rays.size(); ++r) {
    if (rays[r].samples() <= i || rays[r - 1].samples() <= i) continue;
    if (!(rays[r].x[i] > rays[r - 1].x[i])) return false;
  }
  return true;
}

RayPath trace_ray(const BandTable& band, const Confinement& confinement, Real x0,
                  const InitialProfile& initial, int sigma, const Coupling& lambda, Real a_abs,
                  Real t_end, Real dt, const RayOptions& opts) {
  if (sigma < 1) throw InvalidArgument("sigma must be a positive integer");
  const Index n = step_count(t_end, dt);
  const Real h = t_end / static_cast<Real>(n);
  const Flow flow{band, confinement, sigma, lambda, std::pow(a_abs, 2 * sigma)};
  const Real g = band.lattice().dual_period();

  RayPath p;
  p.x0 = x0;
  p.k0 = initial.phase_gradient(x0);
  p.amplitude = a_abs;
  std::vector<State> states;
  std::vector<Real> times;
  states.reserve(n + 1);
  State s = initial_state(initial, x0);
  states.push_back(s);
  times.push_back(0.0);
  auto zone = [&](Real k) { return std::floor((k + 0.5 * g) / g); };
  for (Index j = 0; j < n; ++j) {
    const Real t = j * h;
    const State next = rk4(flow, t, s, h);
    if (next[DX] <= opts.caustic_tol || !std::isfinite(next[DX])) {
      p.caustic_time = t + h * s[DX] / (s[DX] - next[DX]);
      break;
    }
    if (zone(next[K]) != zone(s[K])) ++p.zone_exits;
    s = next;
    states.push_back(s);
    times.push_back((j + 1) * h);
  }

  const Index m = static_cast<Index>(states.size());
  p.t = Eigen::Map<const RealVector>(times.data(), m);
  p.x.resize(m);
  p.k.resize(m);
  p.jacobian.resize(m);
  p.jacobian_rate.resize(m);
  p.phase.resize(m);
  p.berry.resize(m);
  p.nlphase.resize(m);
  const Real phi0 = band.berry_potential(p.k0);
  for (Index i = 0; i < m; ++i) {
    const State& q = states[i];
    p.x[i] = q[X];
    p.k[i] = q[K];
    p.jacobian[i] = q[DX];
    p.jacobian_rate[i] = q[DK];
    p.phase[i] = q[PHI];
    p.nlphase[i] = q[NL];
    // line integral of A dk along the ray, k' = -U'
    p.berry[i] = -(band.berry_potential(q[K]) - phi0);
  }
  return p;
}

RayBundle trace_bundle(const BandTable& band, const Confinement& confinement,
                       const RealVector& x0_grid, const InitialProfile& initial, int sigma,
                       const Coupling& lambda, Real t_end, Real dt, const RayOptions& opts) {
  for (Index i = 1; i < x0_grid.size(); ++i)
    if (!(x0_grid[i] > x0_grid[i - 1])) throw InvalidArgument("launch grid must be increasing");
  RayBundle b;
  b.rays.resize(static_cast<std::size_t>(x0_grid.size()));
  b.dt = t_end / static_cast<Real>(step_count(t_end, dt));
  parallel_for(x0_grid.size(), [&](Index i) {
    const Real x0 = x0_grid[i];
    b.rays[static_cast<std::size_t>(i)] = trace_ray(
        band, confinement, x0, initial, sigma, lambda, std::abs(initial.envelope(x0)), t_end, dt, opts);
  });
  for (const auto& r : b.rays) b.caustic_time = std::min(b.caustic_time, r.caustic_time);
  return b;
}

ComplexVector amplitude_on_ray(const RayPath& path, Complex a_initial) {
  ComplexVector out(path.samples());
  for (Index i = 0; i < path.samples(); ++i) out[i] = a_initial * std::polar(1.0, path.omega(i));
  return out;
}

BlowupResult blowup_experiment(const BandTable& band, const Confinement& confinement, Real x0,
                               const InitialProfile& initial, int sigma, Complex lambda,
                               Real a_abs, Real t_end, Real dt, Real threshold) {
  if (!(a_abs > 0)) throw InvalidArgument("blow-up needs a nonzero amplitude");
  const Coupling coupling = Coupling::constant(lambda);
  const Real w_th = std::pow(threshold, -static_cast<Real>(sigma));

  auto run = [&](Real step, BlowupResult* record) {
    const Index n = step_count(t_end, step);
    const Real h = t_end / static_cast<Real>(n);
    Flow flow{band, confinement, sigma, coupling, std::pow(a_abs, 2 * sigma), true};
    State s = initial_state(initial, x0);
    s[W] = std::pow(a_abs, -2.0 * sigma);
    std::vector<Real> ts{0.0}, rho{a_abs * a_abs};
    Real crossing = kNoCaustic;
    for (Index j = 0; j < n; ++j) {
      const State next = rk4(flow, j * h, s, h);
      if (next[DX] <= 1e-6) break;
      if (next[W] <= w_th) {
        crossing = j * h + h * (s[W] - w_th) / (s[W] - next[W]);
        break;
      }
      s = next;
      ts.push_back((j + 1) * h);
      rho.push_back(std::pow(s[W], -1.0 / sigma));
    }
    if (record) {
      record->t = Eigen::Map<RealVector>(ts.data(), static_cast<Index>(ts.size()));
      record->modulus2 = Eigen::Map<RealVector>(rho.data(), static_cast<Index>(rho.size()));
    }
    return crossing;
  };

  BlowupResult r;
  const Real coarse = run(dt, &r);
  const Real fine = run(0.5 * dt, nullptr);
  r.coarse_time = coarse;
  if (std::isfinite(coarse) && std::isfinite(fine))
    r.blowup_time = (4.0 * fine - coarse) / 3.0;
  else
    r.blowup_time = std::isfinite(fine) ? fine : coarse;
  return r;
}

}  // namespace bwkb
