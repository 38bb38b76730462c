#include "bwkb/wkb.hpp"

#include <algorithm>
#include <cmath>

#include "bwkb/error.hpp"
#include "bwkb/interp.hpp"
#include "bwkb/parallel.hpp"

namespace bwkb {

namespace {

Index sample_index(const RayBundle& bundle, Real t) {
  if (t < 0) throw InvalidArgument("negative time");
  if (t >= bundle.caustic_time)
    throw PostCaustic("time " + std::to_string(t) + " is past the first caustic at " +
                          std::to_string(bundle.caustic_time),
                      bundle.caustic_time);
  const Real q = t / bundle.dt;
  const auto i = static_cast<Index>(std::llround(q));
  if (std::abs(q - static_cast<Real>(i)) > 1e-6)
    throw InvalidArgument("time " + std::to_string(t) + " is not on the ray time grid");
  for (const auto& r : bundle.rays)
    if (r.samples() <= i) throw InvalidArgument("rays do not reach time " + std::to_string(t));
  return i;
}

// chi(y) = sum_m c_m e^{i m G y} / sqrt(l), one y
Complex eval_bloch(const ComplexVector& c, Real y, Real g, Real norm) {
  const Index M = (c.size() - 1) / 2;
  const Complex step = std::polar(1.0, g * y);
  // centre outwards keeps the recurrence error small
  Complex sum = c[M];
  Complex up = 1.0, down = 1.0;
  const Complex inv = std::conj(step);
  for (Index m = 1; m <= M; ++m) {
    up *= step;
    down *= inv;
    sum += c[M + m] * up + c[M - m] * down;
  }
  return sum * norm;
}

}  // namespace

ComplexVector synthesize_bloch(const ComplexVector& coeffs, const RealVector& y, const Lattice& lattice) {
  const Real g = lattice.dual_period();
  const Real norm = 1.0 / std::sqrt(lattice.period);
  ComplexVector out(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    // reduce y to one cell before building the powers of e^{iGy}
    const Real yr = y[i] - lattice.period * std::round(y[i] / lattice.period);
    out[i] = eval_bloch(coeffs, yr, g, norm);
  }
  return out;
}

EulerianFields eulerianize(const RayBundle& bundle, Real t, const RealVector& x_grid,
                           const InitialProfile& initial, const BandTable& band) {
  if (bundle.rays.size() < 2) throw InvalidArgument("need at least two rays");
  const Index s = sample_index(bundle, t);
  const Index nr = static_cast<Index>(bundle.rays.size());
  RealVector X(nr), x0(nr), J(nr), dK(nr), phi(nr), K(nr), nl(nr);
  for (Index r = 0; r < nr; ++r) {
    const RayPath& p = bundle.rays[static_cast<std::size_t>(r)];
    X[r] = p.x[s];
    x0[r] = p.x0;
    J[r] = p.jacobian[s];
    dK[r] = p.jacobian_rate[s];
    phi[r] = p.phase[s];
    K[r] = p.k[s];
    nl[r] = p.nlphase[s];
    if (r > 0 && !(X[r] > X[r - 1]))
      throw PostCaustic("ray map is not monotone at t=" + std::to_string(t), t);
  }

  EulerianFields f;
  f.t = t;
  f.x = x_grid;
  const Index n = x_grid.size();
  f.phase = RealVector::Zero(n);
  f.grad_phi = RealVector::Zero(n);
  f.amp = RealVector::Zero(n);
  f.omega = RealVector::Zero(n);
  f.jacobian = RealVector::Zero(n);
  f.launch = RealVector::Zero(n);
  f.covered = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);

  for (Index i = 0; i < n; ++i) {
    const Real x = x_grid[i];
    if (x < X[0] || x > X[nr - 1]) {
      ++f.outside;
      continue;
    }
    Index r = static_cast<Index>(std::upper_bound(X.data(), X.data() + nr, x) - X.data()) - 1;
    r = std::clamp<Index>(r, 0, nr - 2);
    const Real h = X[r + 1] - X[r];
    const Real u = x - X[r];
    const Real launch = interp::hermite3(x0[r], 1.0 / J[r], x0[r + 1], 1.0 / J[r + 1], h, u);
    f.launch[i] = launch;
    f.phase[i] = interp::hermite3(phi[r], K[r], phi[r + 1], K[r + 1], h, u);
    f.grad_phi[i] = interp::hermite3(K[r], dK[r] / J[r], K[r + 1], dK[r + 1] / J[r + 1], h, u);

    const Index q = std::clamp<Index>(r - 1, 0, nr - 4);
    const std::array<Real, 4> nodes{x0[q], x0[q + 1], x0[q + 2], x0[q + 3]};
    const Real jac = interp::lagrange4(nodes, std::array<Real, 4>{J[q], J[q + 1], J[q + 2], J[q + 3]}, launch);
    const Real nlp =
        interp::lagrange4(nodes, std::array<Real, 4>{nl[q], nl[q + 1], nl[q + 2], nl[q + 3]}, launch);
    f.jacobian[i] = jac;
    f.amp[i] = initial.envelope(launch) / std::sqrt(jac);
    // Berry phase as a difference of the band's Berry potential, exact for the
    // gauge that chi(k) is evaluated in
    const Real berry = -(band.berry_potential(f.grad_phi[i]) -
                         band.berry_potential(initial.phase_gradient(launch)));
    f.omega[i] = berry + nlp;
    f.covered[i] = true;
  }
  return f;
}

WaveField assemble_v0(const EulerianFields& fields, const BandTable& band, Real epsilon,
                      const UniformGrid& grid) {
  if (fields.x.size() != grid.n) throw GridMismatch("Eulerian fields and wave grid differ in size");
  check_resolution(grid, epsilon, band.lattice().period);
  WaveField v = WaveField::zeros(grid, epsilon, fields.t);
  const Real g = band.lattice().dual_period();
  const Real norm = 1.0 / std::sqrt(band.lattice().period);
  const Real period = band.lattice().period;
  parallel_for(grid.n, [&](Index i) {
    if (!fields.covered[i] || fields.amp[i] == 0.0) return;
    const ComplexVector c = band.bloch_vector(fields.grad_phi[i]);
    const Real y = grid.x(i) / epsilon;
    const Complex chi = eval_bloch(c, y - period * std::round(y / period), g, norm);
    v.values[i] = fields.amp[i] * chi * std::polar(1.0, fields.omega[i] + fields.phase[i] / epsilon);
  });
  return v;
}

WaveField initial_data(const InitialProfile& initial, const BandTable& band, Real epsilon,
                       const UniformGrid& grid, const CorrectorField* corrector) {
  check_resolution(grid, epsilon, band.lattice().period);
  if (corrector && corrector->coeffs.cols() != grid.n)
    throw GridMismatch("corrector is not sampled on the wave grid");
  WaveField psi = WaveField::zeros(grid, epsilon, 0.0);
  const Real g = band.lattice().dual_period();
  const Real norm = 1.0 / std::sqrt(band.lattice().period);
  const Real period = band.lattice().period;
  parallel_for(grid.n, [&](Index i) {
    const Real x = grid.x(i);
    const Real a = initial.envelope(x);
    const Real y = x / epsilon;
    const Real yr = y - period * std::round(y / period);
    Complex u = 0;
    if (a != 0.0) u = a * eval_bloch(band.bloch_vector(initial.phase_gradient(x)), yr, g, norm);
    if (corrector) u += epsilon * eval_bloch(corrector->coeffs.col(i), yr, g, norm);
    psi.values[i] = u * std::polar(1.0, initial.phase(x) / epsilon);
  });
  return psi;
}

}  // namespace bwkb
