#include "bwkb/nls.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bwkb/error.hpp"

namespace bwkb {

void validate(const NlsConfig& c) {
  if (!(c.epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (c.sigma < 1) throw InvalidArgument("sigma must be a positive integer");
  if (!(c.dt > 0)) throw InvalidArgument("dt must be positive");
  if (c.dt > c.dt_factor * c.epsilon * (1 + 1e-12)) {
    std::ostringstream os;
    os << "dt=" << c.dt << " exceeds dt_factor*epsilon=" << c.dt_factor * c.epsilon;
    throw InvalidArgument(os.str());
  }
  if (!is_power_of_two(c.grid.n)) throw InvalidArgument("grid size must be a power of two");
}

SplitStepSolver::SplitStepSolver(const NlsConfig& config, WaveField psi0)
    : config_(config), psi_(std::move(psi0)) {
  validate(config_);
  if (!(psi_.grid == config_.grid) || psi_.values.size() != config_.grid.n)
    throw GridMismatch("initial field is not on the solver grid");
  const RealVector x = config_.grid.points();
  slow_fast_.resize(x.size());
  for (Index i = 0; i < x.size(); ++i)
    slow_fast_[i] = config_.potential(x[i] / config_.epsilon) + config_.confinement.value(x[i]);
  xi2_ = fft_wavenumbers(x.size(), config_.grid.length()).array().square();
}

Real SplitStepSolver::edge_magnitude() const {
  const Index n = psi_.values.size();
  const Index w = std::min<Index>(4, n);
  return std::max(psi_.values.head(w).cwiseAbs().maxCoeff(), psi_.values.tail(w).cwiseAbs().maxCoeff());
}

void SplitStepSolver::half_rotation(Real h, Real t_mid) {
  const int sigma = config_.sigma;
  const Complex lam = config_.lambda(t_mid);
  ComplexVector& v = psi_.values;
  const Index n = v.size();
  if (lam.imag() == 0.0) {
    // |psi| is invariant: one combined phase rotation
    for (Index i = 0; i < n; ++i) {
      const Real rho = std::norm(v[i]);
      v[i] *= potential_phase_[i] * std::polar(1.0, -h * lam.real() * std::pow(rho, sigma));
    }
    return;
  }
  // d rho/dt = 2 Im(lambda) rho^{sigma+1}, solved in closed form
  const Real li = lam.imag();
  for (Index i = 0; i < n; ++i) {
    const Real rho = std::norm(v[i]);
    const Real rs = std::pow(rho, sigma);
    const Real denom = 1.0 - 2.0 * sigma * h * li * rs;
    if (!(denom > 0))
      throw Overflow("nonlinear sub-flow diverged", psi_.t);
    const Real rho_new = rho * std::pow(denom, -1.0 / sigma);
    if (!(rho_new <= config_.overflow_threshold))
      throw Overflow("field modulus exceeded the overflow threshold", psi_.t);
    const Real nl_phase = lam.real() / (2.0 * sigma * li) * std::log(denom);
    const Real scale = rho > 0 ? std::sqrt(rho_new / rho) : 0.0;
    v[i] *= scale * potential_phase_[i] * std::polar(1.0, nl_phase);
  }
}

void SplitStepSolver::kinetic() {
  fft_.forward(psi_.values, spec_);
  spec_.array() *= kinetic_phase_.array();
  fft_.inverse(spec_, psi_.values);
}

void SplitStepSolver::step(Real h) {
  if (h != cached_h_) {
    const Real eps = config_.epsilon;
    kinetic_phase_ = (xi2_ * (-0.5 * h * eps)).unaryExpr([](Real a) { return std::polar(1.0, a); });
    potential_phase_ =
        (slow_fast_ * (-0.5 * h / eps)).unaryExpr([](Real a) { return std::polar(1.0, a); });
    cached_h_ = h;
  }
  const Real t0 = psi_.t;
  half_rotation(0.5 * h, t0 + 0.25 * h);
  kinetic();
  half_rotation(0.5 * h, t0 + 0.75 * h);
  psi_.t = t0 + h;
  ++steps_;
  const Real edge = edge_magnitude();
  if (edge > config_.edge_tol) {
    std::ostringstream os;
    os << "field reached the box edge (|psi|=" << edge << " at t=" << psi_.t << ")";
    throw EdgeLeakage(os.str(), psi_.t, edge);
  }
}

void SplitStepSolver::advance_to(Real t_target) {
  const Real span = t_target - psi_.t;
  if (span < -1e-14) throw InvalidArgument("cannot step backwards in time");
  if (span <= 1e-14) return;
  const auto n = static_cast<Index>(std::ceil(span / config_.dt - 1e-9));
  const Real h = span / static_cast<Real>(n);
  for (Index j = 0; j < n; ++j) step(h);
  psi_.t = t_target;
}

std::vector<WaveField> solve_nls(const NlsConfig& config, const WaveField& psi0) {
  std::vector<Real> times = config.snapshot_times;
  std::sort(times.begin(), times.end());
  if (!times.empty() && times.front() < psi0.t) throw InvalidArgument("snapshot before the initial time");
  SplitStepSolver solver(config, psi0);
  std::vector<WaveField> out;
  out.reserve(times.size());
  for (Real t : times) {
    solver.advance_to(t);
    out.push_back(solver.state());
  }
  return out;
}

}  // namespace bwkb
