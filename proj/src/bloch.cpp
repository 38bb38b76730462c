#include "bwkb/bloch.hpp"

#include <cmath>
#include <sstream>

#include "bwkb/error.hpp"
#include "bwkb/interp.hpp"
#include "bwkb/parallel.hpp"
#include "bwkb/spectral.hpp"

namespace bwkb {

namespace {

Index floor_div(Index a, Index b) {
  Index q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void check_band(const BlochSpectrum& s, int band) {
  if (band < 1 || band > s.size())
    throw InvalidArgument("band index " + std::to_string(band) + " outside 1.." +
                          std::to_string(s.size()));
}

[[noreturn]] void throw_gap(Real gap, Real k, int band, int other) {
  std::ostringstream os;
  os << "band " << band << " is not isolated from band " << other << " at k=" << k
     << " (gap " << gap << ")";
  throw IsolatednessViolation(os.str(), gap, k);
}

ComplexVector align_to(const ComplexVector& v, const ComplexVector& ref) {
  const Complex o = ref.dot(v);
  return v * std::polar(1.0, -std::arg(o));
}

Index oversampled_size(Index modes, int sigma) {
  return next_power_of_two(2 * (sigma + 1) * modes);
}

}  // namespace

void validate(const BlochProblem& p) {
  if (p.cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
  if (p.cutoff < 2 * p.potential.max_mode())
    throw InvalidArgument("cutoff must be at least twice the highest potential mode");
  if (p.n_bands < 1 || p.n_bands > p.size())
    throw InvalidArgument("n_bands must lie in 1..2*cutoff+1");
}

ComplexMatrix bloch_hamiltonian(const BlochProblem& p, Real k) {
  const Index n = p.size();
  const int M = p.cutoff;
  const Real g = p.lattice().dual_period();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) h(i, j) = p.potential.coeff(static_cast<int>(i - j));
    const Real q = k + static_cast<Real>(i - M) * g;
    h(i, i) += 0.5 * q * q;
  }
  return h;
}

RealVector BlochSpectrum::momentum_diagonal() const {
  const Index n = energies.size();
  const Index M = (n - 1) / 2;
  return RealVector::LinSpaced(n, static_cast<Real>(-M), static_cast<Real>(M)) * dual_period +
         RealVector::Constant(n, k);
}

BlochSpectrum bloch_spectrum(const BlochProblem& p, Real k) {
  if (!std::isfinite(k)) throw InvalidArgument("quasimomentum must be finite");
  const ComplexMatrix h = bloch_hamiltonian(p, k);
  BlochSpectrum s;
  s.k = k;
  s.dual_period = p.lattice().dual_period();
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h.real());
    if (es.info() != Eigen::Success) throw EigensolverFailure("Bloch eigensolve did not converge");
    s.energies = es.eigenvalues();
    s.vectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) throw EigensolverFailure("Bloch eigensolve did not converge");
    s.energies = es.eigenvalues();
    s.vectors = es.eigenvectors();
  }
  return s;
}

std::vector<std::pair<Real, ComplexVector>> solve_bloch_at_k(const BlochProblem& p, Real k) {
  validate(p);
  const BlochSpectrum s = bloch_spectrum(p, k);
  std::vector<std::pair<Real, ComplexVector>> out;
  out.reserve(p.n_bands);
  for (int n = 0; n < p.n_bands; ++n) out.emplace_back(s.energies[n], s.vectors.col(n));
  return out;
}

Real band_velocity(const BlochSpectrum& s, int band) {
  check_band(s, band);
  return s.vectors.col(band - 1).cwiseAbs2().dot(s.momentum_diagonal());
}

Real band_curvature(const BlochSpectrum& s, int band, Real gap_tol) {
  check_band(s, band);
  const Index n = band - 1;
  const ComplexVector dchi = s.momentum_diagonal().cast<Complex>().cwiseProduct(s.vectors.col(n));
  const ComplexVector proj = s.vectors.adjoint() * dchi;
  Real e2 = 1.0;
  for (Index m = 0; m < s.size(); ++m) {
    if (m == n) continue;
    const Real gap = s.energies[n] - s.energies[m];
    if (std::abs(gap) <= gap_tol) throw_gap(std::abs(gap), s.k, band, static_cast<int>(m + 1));
    e2 += 2.0 * std::norm(proj[m]) / gap;
  }
  return e2;
}

ComplexVector reduced_resolvent(const BlochSpectrum& s, int band, const ComplexVector& rhs,
                                Real gap_tol) {
  check_band(s, band);
  const Index n = band - 1;
  ComplexVector proj = s.vectors.adjoint() * rhs;
  for (Index m = 0; m < s.size(); ++m) {
    if (m == n) {
      proj[m] = 0;
      continue;
    }
    const Real gap = s.energies[m] - s.energies[n];
    if (std::abs(gap) <= gap_tol) throw_gap(std::abs(gap), s.k, band, static_cast<int>(m + 1));
    proj[m] /= gap;
  }
  return s.vectors * proj;
}

ComplexVector projected_derivative(const BlochSpectrum& s, int band, Real gap_tol) {
  // d_k chi_n = sum_{m!=n} chi_m <chi_m, dH chi_n> / (E_n - E_m), dH = diag(k + mG)
  check_band(s, band);
  const ComplexVector dh =
      s.momentum_diagonal().cast<Complex>().cwiseProduct(s.vectors.col(band - 1));
  return -reduced_resolvent(s, band, dh, gap_tol);
}

Real group_velocity(const BlochProblem& p, int band, Real k) {
  return band_velocity(bloch_spectrum(p, k), band);
}

Real kappa_integral(const BlochProblem& p, int band, Real k, int sigma) {
  const BlochSpectrum s = bloch_spectrum(p, k);
  check_band(s, band);
  return kappa_from_coeffs(s.vectors.col(band - 1), sigma, p.lattice());
}

Real kappa_from_coeffs(const ComplexVector& c, int sigma, const Lattice& lattice) {
  if (sigma < 0) throw InvalidArgument("sigma must be non-negative");
  Fft fft;
  const ComplexVector s = synthesize_periodic(c, oversampled_size(c.size(), sigma), fft);
  const Real mean = s.cwiseAbs2().array().pow(sigma + 1).mean();
  return mean * std::pow(lattice.period, -sigma);
}

Real kappa_slope_from_coeffs(const ComplexVector& c, const ComplexVector& dc, int sigma,
                             const Lattice& lattice) {
  Fft fft;
  const Index ny = oversampled_size(c.size(), sigma);
  const ComplexVector s = synthesize_periodic(c, ny, fft);
  const ComplexVector ds = synthesize_periodic(dc, ny, fft);
  const RealVector rho = s.cwiseAbs2();
  const RealVector integrand =
      rho.array().pow(sigma) * (s.conjugate().cwiseProduct(ds)).real().array();
  return 2.0 * (sigma + 1) * integrand.mean() * std::pow(lattice.period, -sigma);
}

ComplexVector nonlinear_coeffs(const ComplexVector& c, int sigma, const Lattice& lattice) {
  Fft fft;
  const Index ny = oversampled_size(c.size(), sigma);
  const ComplexVector s = synthesize_periodic(c, ny, fft);
  const ComplexVector f = s.cwiseAbs2().array().pow(sigma).matrix().cast<Complex>().cwiseProduct(s);
  return analyze_periodic(f, (c.size() - 1) / 2, fft) * std::pow(lattice.period, -sigma);
}

Complex bloch_wave(const ComplexVector& c, Real y, const Lattice& lattice) {
  const Index M = (c.size() - 1) / 2;
  const Real g = lattice.dual_period();
  Complex sum = 0;
  for (Index i = 0; i < c.size(); ++i) sum += c[i] * std::polar(1.0, static_cast<Real>(i - M) * g * y);
  return sum / std::sqrt(lattice.period);
}

ComplexVector shift_modes(const ComplexVector& c, int shift) {
  const Index n = c.size();
  ComplexVector out = ComplexVector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const Index src = i + shift;
    if (src >= 0 && src < n) out[i] = c[src];
  }
  return out;
}

// ---------------------------------------------------------------------------

BandTable BandTable::build(const BlochProblem& problem, int band, const BandTableOptions& opts) {
  validate(problem);
  if (band < 1 || band > problem.n_bands || band >= problem.size())
    throw InvalidArgument("band must lie in 1..n_bands");
  if (opts.k_points < 16) throw InvalidArgument("k_points must be >= 16");

  BandTable t;
  t.problem_ = problem;
  t.band_ = band;
  t.gap_tol_ = opts.gap_tol;
  const Index n = opts.k_points;
  const Real g = problem.lattice().dual_period();
  t.dk_ = g / static_cast<Real>(n);
  t.k_.resize(n);
  for (Index j = 0; j < n; ++j)
    t.k_[j] = -0.5 * g + (static_cast<Real>(j) + 0.5) * t.dk_;

  const Index dim = problem.size();
  t.energy_.resize(n);
  t.velocity_.resize(n);
  t.curvature_.resize(n);
  t.gap_.resize(n);
  t.all_energies_.resize(n, problem.n_bands);
  t.vecs_.resize(dim, n);
  t.dvecs_.resize(dim, n);

  parallel_for(n, [&](Index j) {
    const BlochSpectrum s = bloch_spectrum(problem, t.k_[j]);
    const Index b = band - 1;
    t.energy_[j] = s.energies[b];
    t.all_energies_.row(j) = s.energies.head(problem.n_bands).transpose();
    Real gap = s.energies[b + 1] - s.energies[b];
    if (b > 0) gap = std::min(gap, s.energies[b] - s.energies[b - 1]);
    t.gap_[j] = gap;
    t.vecs_.col(j) = s.vectors.col(b);
    t.velocity_[j] = band_velocity(s, band);
    if (gap > opts.gap_tol) {
      t.curvature_[j] = band_curvature(s, band, opts.gap_tol);
      t.dvecs_.col(j) = projected_derivative(s, band, opts.gap_tol);
    }
  });

  Index worst = 0;
  t.min_gap_ = t.gap_.minCoeff(&worst);
  if (!(t.min_gap_ > opts.gap_tol)) {
    std::ostringstream os;
    os << "band " << band << " is not isolated: min gap " << t.min_gap_ << " at k=" << t.k_[worst];
    throw IsolatednessViolation(os.str(), t.min_gap_, t.k_[worst]);
  }

  // anchor at k = 0: largest coefficient real positive
  const BlochSpectrum s0 = bloch_spectrum(problem, 0.0);
  ComplexVector anchor = s0.vectors.col(band - 1);
  Index imax = 0;
  anchor.cwiseAbs().maxCoeff(&imax);
  anchor *= std::polar(1.0, -std::arg(anchor[imax]));

  Index ja = 0;
  t.k_.cwiseAbs().minCoeff(&ja);
  auto set_col = [&](Index j, const ComplexVector& ref) {
    const Complex o = ref.dot(t.vecs_.col(j));
    const Complex phase = std::polar(1.0, -std::arg(o));
    t.vecs_.col(j) *= phase;
    t.dvecs_.col(j) *= phase;
  };
  set_col(ja, anchor);
  for (Index j = ja + 1; j < n; ++j) set_col(j, t.vecs_.col(j - 1));
  for (Index j = ja - 1; j >= 0; --j) set_col(j, t.vecs_.col(j + 1));

  t.finish_gauge();
  return t;
}

BandTable BandTable::with_gauge(const std::function<Real(Real)>& theta) const {
  BandTable t = *this;
  t.cache_ = std::make_shared<Cache>();
  for (Index j = 0; j < size(); ++j) {
    const Complex phase = std::polar(1.0, theta(k_[j]));
    t.vecs_.col(j) *= phase;
    t.dvecs_.col(j) *= phase;
  }
  t.finish_gauge();
  return t;
}

ComplexVector BandTable::node_vector(Index i) const {
  const Index n = size();
  const Index w = floor_div(i, n);
  const ComplexVector c = vecs_.col(i - w * n);
  return w == 0 ? c : shift_modes(c, static_cast<int>(w));
}

ComplexVector BandTable::node_derivative(Index i) const {
  const Index n = size();
  const Index w = floor_div(i, n);
  const ComplexVector c = dvecs_.col(i - w * n);
  return w == 0 ? c : shift_modes(c, static_cast<int>(w));
}

void BandTable::finish_gauge() {
  const Index n = size();
  conn_.resize(n);
  // centred difference of overlap phases; one-sided at the zone edges so the
  // winding mismatch stays inside the wrap interval
  auto phase = [&](Index j, Index i) { return std::arg(vecs_.col(j).dot(vecs_.col(i))); };
  for (Index j = 0; j < n; ++j) {
    Real a;
    if (j == 0)
      a = (4.0 * phase(0, 1) - phase(0, 2)) / (2.0 * dk_);
    else if (j == n - 1)
      a = -(4.0 * phase(j, j - 1) - phase(j, j - 2)) / (2.0 * dk_);
    else
      a = (phase(j, j + 1) - phase(j, j - 1)) / (2.0 * dk_);
    conn_[j] = Complex(0.0, a);
  }
  winding_ = std::arg(vecs_.col(n - 1).dot(node_vector(n)));

  intervals_.assign(n, {});
  Real potential = 0;
  for (Index j = 0; j < n; ++j) {
    Interval& iv = intervals_[j];
    const ComplexVector a = vecs_.col(j);
    iv.dtheta = std::arg(a.dot(node_vector(j + 1)));
    for (int q = 0; q < 4; ++q) {
      const Index i = j - 1 + q;
      const Complex ov = a.dot(node_vector(i));
      // a vanishing overlap only happens across a band crossing (free band at the zone edge)
      iv.ref_connection[q] = std::abs(ov) < 1e-8 ? 0.0 : -(a.dot(node_derivative(i)) / ov).imag();
    }
    iv.theta_slope0 = conn_[j].imag() - iv.ref_connection[1];
    iv.theta_slope1 = conn_[(j + 1) % n].imag() - iv.ref_connection[2];
    iv.potential0 = potential;
    potential += interp::lagrange4_equispaced_integral(iv.ref_connection, dk_, 0.0, dk_) + iv.dtheta;
  }
  potential_period_ = potential;
  potential_offset_ = 0;
  potential_offset_ = berry_potential(0.0);
}

BandTable::Locator BandTable::locate(Real k) const {
  const Real g = lattice().dual_period();
  const Real k0 = k_[0];
  const int wrap = static_cast<int>(std::floor((k - k0) / g));
  const Real kl = k - wrap * g;
  Index j = static_cast<Index>(std::floor((kl - k0) / dk_));
  j = std::clamp<Index>(j, 0, size() - 1);
  return {wrap, j, kl - k_[j]};
}

Real BandTable::folded(Real k) const {
  const Real g = lattice().dual_period();
  return k - g * std::floor((k + 0.5 * g) / g);
}

std::array<Real, 3> BandTable::energy_derivs(Real k) const {
  const Locator l = locate(k);
  const Index j1 = (l.j + 1) % size();
  return interp::hermite5(energy_[l.j], velocity_[l.j], curvature_[l.j], energy_[j1], velocity_[j1],
                          curvature_[j1], dk_, l.t);
}

const BandTable::KappaNodes& BandTable::kappa_nodes(int sigma) const {
  std::lock_guard lock(cache_->kappa_mutex);
  auto it = cache_->kappa.find(sigma);
  if (it != cache_->kappa.end()) return it->second;
  KappaNodes nodes;
  nodes.value.resize(size());
  nodes.slope.resize(size());
  for (Index j = 0; j < size(); ++j) {
    nodes.value[j] = kappa_from_coeffs(vecs_.col(j), sigma, lattice());
    nodes.slope[j] = kappa_slope_from_coeffs(vecs_.col(j), dvecs_.col(j), sigma, lattice());
  }
  return cache_->kappa.emplace(sigma, std::move(nodes)).first->second;
}

RealVector BandTable::kappa_samples(int sigma) const { return kappa_nodes(sigma).value; }

Real BandTable::kappa(Real k, int sigma) const {
  const KappaNodes& nodes = kappa_nodes(sigma);
  const Locator l = locate(k);
  const Index j1 = (l.j + 1) % size();
  return interp::hermite3(nodes.value[l.j], nodes.slope[l.j], nodes.value[j1], nodes.slope[j1], dk_,
                          l.t);
}

Real BandTable::kappa_slope(Real k, int sigma) const {
  const KappaNodes& nodes = kappa_nodes(sigma);
  const Locator l = locate(k);
  const Index j1 = (l.j + 1) % size();
  return interp::hermite3_derivative(nodes.value[l.j], nodes.slope[l.j], nodes.value[j1],
                                     nodes.slope[j1], dk_, l.t);
}

Real BandTable::theta(const Interval& iv, Real t) const {
  return interp::hermite3(0.0, iv.theta_slope0, iv.dtheta, iv.theta_slope1, dk_, t);
}

Real BandTable::berry_connection(Real k) const {
  const Locator l = locate(k);
  const Interval& iv = intervals_[l.j];
  const std::array<Real, 4> nodes{-dk_, 0.0, dk_, 2.0 * dk_};
  return interp::lagrange4(nodes, iv.ref_connection, l.t) +
         interp::hermite3_derivative(0.0, iv.theta_slope0, iv.dtheta, iv.theta_slope1, dk_, l.t);
}

Real BandTable::berry_potential(Real k) const {
  const Locator l = locate(k);
  const Interval& iv = intervals_[l.j];
  return iv.potential0 + interp::lagrange4_equispaced_integral(iv.ref_connection, dk_, 0.0, l.t) +
         theta(iv, l.t) + (l.wrap != 0 ? l.wrap * potential_period_ : 0.0) - potential_offset_;
}

ComplexVector BandTable::bloch_vector(Real k) const {
  const long long key = std::llround(k * 1e10);
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->vectors.find(key);
    if (it != cache_->vectors.end()) return it->second;
  }
  const Locator l = locate(k);
  const Real kl = k_[l.j] + l.t;
  const BlochSpectrum s = bloch_spectrum(problem_, kl);
  const Index b = band_ - 1;
  Real gap = s.energies[b + 1] - s.energies[b];
  if (b > 0) gap = std::min(gap, s.energies[b] - s.energies[b - 1]);
  if (gap <= gap_tol_) throw_gap(gap, k, band_, band_ + 1);
  ComplexVector c = align_to(s.vectors.col(b), vecs_.col(l.j));
  c *= std::polar(1.0, theta(intervals_[l.j], l.t));
  if (l.wrap != 0) c = shift_modes(c, l.wrap);
  std::unique_lock lock(cache_->mutex);
  if (cache_->vectors.size() > (1u << 18)) cache_->vectors.clear();
  cache_->vectors.emplace(key, c);
  return c;
}

// ---------------------------------------------------------------------------

CorrectorField well_prepared_corrector(const BandTable& band, const InitialProfile& initial,
                                       const Confinement& confinement, Real lambda0, int sigma,
                                       const RealVector& x_grid) {
  const BlochProblem& problem = band.problem();
  const Lattice& lattice = band.lattice();
  const Real g = lattice.dual_period();
  const int n = band.band();
  CorrectorField out;
  out.x = x_grid;
  out.coeffs.resize(problem.size(), x_grid.size());

  std::map<long long, BlochSpectrum> spectra;
  for (Index i = 0; i < x_grid.size(); ++i) {
    const Real x = x_grid[i];
    const Complex a = initial.envelope(x);
    if (a == 0.0) {
      out.coeffs.col(i).setZero();
      continue;
    }
    const Real k = initial.phase_gradient(x);
    const Real kx = initial.phase_hessian(x);
    const Real ax = initial.envelope_derivative(x);
    const Real kl = band.folded(k);
    const int wrap = static_cast<int>(std::lround((k - kl) / g));

    auto it = spectra.find(std::llround(kl * 1e10));
    if (it == spectra.end()) it = spectra.emplace(std::llround(kl * 1e10), bloch_spectrum(problem, kl)).first;
    const BlochSpectrum& s = it->second;

    const ComplexVector chi = shift_modes(band.bloch_vector(k), -wrap);
    const Complex phase = s.vectors.col(n - 1).dot(chi);
    const ComplexVector qd = projected_derivative(s, n, band.gap_tol()) * (phase / std::abs(phase));
    const ComplexVector dchi = qd + kI * band.berry_connection(k) * chi;
    const ComplexVector p = s.momentum_diagonal().cast<Complex>();

    const Real v = band_velocity(s, n);
    const Real kt = -(v * kx + confinement.gradient(x));
    ComplexVector rhs = kI * (a * kt * dchi + ax * p.cwiseProduct(chi) + a * kx * p.cwiseProduct(dchi));
    if (lambda0 != 0.0)
      rhs -= lambda0 * std::pow(std::abs(a), 2 * sigma) * a * nonlinear_coeffs(chi, sigma, lattice);

    out.coeffs.col(i) = shift_modes(reduced_resolvent(s, n, rhs, band.gap_tol()), wrap);
  }
  return out;
}

}  // namespace bwkb
