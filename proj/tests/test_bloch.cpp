#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bwkb/bloch.hpp"
#include "bwkb/error.hpp"
#include "oracles.hpp"

using namespace bwkb;

namespace {

BlochProblem mathieu(int cutoff = 32, int n_bands = 4) {
  return {cosine_potential(1.0), cutoff, n_bands};
}
BlochProblem free_problem() { return {zero_potential(), 32, 4}; }

const BandTable& mathieu_table() {
  static const BandTable t = BandTable::build(mathieu(), 1);
  return t;
}

ComplexVector aligned(const BlochProblem& p, int band, Real k, const ComplexVector& ref) {
  ComplexVector c = bloch_spectrum(p, k).vectors.col(band - 1);
  return c * std::polar(1.0, -std::arg(ref.dot(c)));
}

}  // namespace

TEST_CASE("free particle eigenpairs") {
  const auto pairs = solve_bloch_at_k(free_problem(), 1.0);
  CHECK(pairs[0].first == doctest::Approx(0.5).epsilon(1e-14));
  for (const auto& [e, c] : pairs) CHECK(std::abs(c.squaredNorm() - 1) < 1e-12);
}

TEST_CASE("constant potential shifts energies") {
  const BlochProblem shifted{make_potential_from_fourier({}, {{0, 0.7}}), 8, 5};
  const auto a = solve_bloch_at_k({zero_potential(), 8, 5}, 0.4);
  const auto b = solve_bloch_at_k(shifted, 0.4);
  for (int n = 0; n < 5; ++n) {
    CHECK(b[n].first - a[n].first == doctest::Approx(0.7).epsilon(1e-13));
    CHECK(std::abs(std::abs(a[n].second.dot(b[n].second)) - 1) < 1e-12);
  }
}

TEST_CASE("Mathieu energy matches a doubled-cutoff dense solve") {
  const auto pairs = solve_bloch_at_k(mathieu(32), 0.0);
  const auto ref = oracle::dense_bloch_energies(cosine_potential(1.0), 64, 0.0);
  CHECK(std::abs(pairs[0].first - ref[0]) < 1e-10);
  CHECK(std::abs(pairs[1].first - ref[1]) < 1e-10);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(validate({cosine_potential(1.0), 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(validate({cosine_potential(1.0), 4, 10}), InvalidArgument);
  CHECK_NOTHROW(validate({cosine_potential(1.0), 4, 9}));
}

TEST_CASE("free band table") {
  const BandTable t = BandTable::build(free_problem(), 1, {64});
  for (Index j = 0; j < t.size(); ++j) {
    const Real k = t.k_grid()[j];
    CHECK(std::abs(t.energies()[j] - 0.5 * k * k) < 1e-12);
    CHECK(std::abs(t.connection()[j]) < 1e-12);
    CHECK(std::abs(t.velocities()[j] - k) < 1e-12);
    CHECK(std::abs(t.curvatures()[j] - 1) < 1e-12);
  }
  for (Real k : t.kappa_samples(1)) CHECK(std::abs(k - 1) < 1e-12);
  CHECK(t.min_gap() > 0);
  // interpolants reproduce k^2/2 inside the zone
  for (Real k : {-2.9, -1.0, 0.0, 0.3, 2.5}) {
    CHECK(std::abs(t.energy(k) - 0.5 * k * k) < 1e-12);
    CHECK(std::abs(t.velocity(k) - k) < 1e-12);
    CHECK(std::abs(t.curvature(k) - 1) < 1e-11);
  }
}

TEST_CASE("Mathieu band table invariants") {
  const BandTable& t = mathieu_table();
  CHECK(t.min_gap() > 0);
  CHECK(std::isfinite(t.min_gap()));
  for (Index j = 0; j < t.size(); ++j) {
    const auto ref = oracle::dense_bloch_energies(cosine_potential(1.0), 64, t.k_grid()[j]);
    CHECK(std::abs(t.energies()[j] - ref[0]) < 1e-8);
    CHECK(std::abs(t.eigvecs().col(j).squaredNorm() - 1) < 1e-12);
    CHECK(std::abs(t.connection()[j].real()) < 1e-6);
    const Index mirror = t.size() - 1 - j;
    CHECK(std::abs(t.energies()[j] - t.energies()[mirror]) < 1e-8);
    if (j + 1 < t.size()) CHECK(t.eigvecs().col(j).dot(t.eigvecs().col(j + 1)).real() > 0);
  }
  // anchor: largest coefficient at k = 0 is real positive
  const ComplexVector c0 = t.bloch_vector(0.0);
  Index imax = 0;
  c0.cwiseAbs().maxCoeff(&imax);
  CHECK(std::abs(c0[imax].imag()) < 1e-12);
  CHECK(c0[imax].real() > 0);
}

TEST_CASE("isolatedness is enforced") {
  CHECK_THROWS_AS(BandTable::build(free_problem(), 1, {64, 1.0}), IsolatednessViolation);
  CHECK_THROWS_AS(BandTable::build(free_problem(), 1, {8}), InvalidArgument);
}

TEST_CASE("group velocity") {
  CHECK(group_velocity(free_problem(), 1, 0.7) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(std::abs(group_velocity(mathieu(), 1, 0.0)) < 1e-14);
  const Real h = 1e-4;
  const Real fd = (bloch_spectrum(mathieu(), 0.5 + h).energies[0] -
                   bloch_spectrum(mathieu(), 0.5 - h).energies[0]) / (2 * h);
  const Real v = group_velocity(mathieu(), 1, 0.5);
  CHECK(std::abs(v - fd) / std::abs(fd) < 1e-6);
}

TEST_CASE("Hellmann-Feynman on random potentials") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<Real> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<int, Complex>> modes{{0, u(rng)}};
    for (int m = 1; m <= 3; ++m) {
      const Complex c(0.6 * u(rng), 0.6 * u(rng));
      modes.emplace_back(m, c);
      modes.emplace_back(-m, std::conj(c));
    }
    const BlochProblem p{make_potential_from_fourier({}, modes), 16, 3};
    const Real k = kPi * u(rng);
    const int band = 1 + trial % 2;
    const Real h = 1e-4;
    const Real fd = (bloch_spectrum(p, k + h).energies[band - 1] -
                     bloch_spectrum(p, k - h).energies[band - 1]) / (2 * h);
    const Real v = group_velocity(p, band, k);
    CHECK(std::abs(v - fd) / (1 + std::abs(fd)) < 1e-5);
  }
}

TEST_CASE("curvature matches finite differences of the velocity") {
  const BlochProblem p = mathieu();
  for (Real k : {0.0, 0.9, 2.7}) {
    const Real h = 1e-4;
    const Real fd = (group_velocity(p, 1, k + h) - group_velocity(p, 1, k - h)) / (2 * h);
    CHECK(std::abs(band_curvature(bloch_spectrum(p, k), 1) - fd) < 1e-6);
  }
}

TEST_CASE("kappa integral") {
  CHECK(kappa_integral(free_problem(), 1, 0.4, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kappa_integral(free_problem(), 1, -2.0, 3) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kappa_integral(mathieu(), 1, 0.3, 0) == doctest::Approx(1.0).epsilon(1e-13));

  const ComplexVector c = bloch_spectrum(mathieu(), 0.0).vectors.col(0);
  const Lattice l;
  const Real ref = oracle::adaptive_simpson(
      [&](Real y) { return std::pow(std::abs(bloch_wave(c, y, l)), 4); }, 0.0, 1.0, 1e-13);
  CHECK(std::abs(kappa_integral(mathieu(), 1, 0.0, 1) - ref) < 1e-8);

  for (Real k : {-3.0, -1.0, 0.0, 2.0})
    for (int sigma : {1, 2}) CHECK(kappa_integral(mathieu(), 2, k, sigma) >= 1 - 1e-12);
}

TEST_CASE("kappa slope matches finite differences") {
  const BandTable& t = mathieu_table();
  for (Real k : {-2.0, 0.4, 1.3}) {
    const Real h = 1e-4;
    const Real fd = (kappa_integral(mathieu(), 1, k + h, 1) - kappa_integral(mathieu(), 1, k - h, 1)) /
                    (2 * h);
    CHECK(std::abs(t.kappa_slope(k, 1) - fd) < 1e-6);
    CHECK(std::abs(t.kappa(k, 1) - kappa_integral(mathieu(), 1, k, 1)) < 1e-7);
  }
}

TEST_CASE("Galerkin energies decrease with the cutoff") {
  for (Real k : {0.0, 1.1, 3.0}) {
    Real prev = bloch_spectrum(mathieu(2), k).energies[0];
    for (int m = 3; m <= 20; ++m) {
      const Real e = bloch_spectrum(mathieu(m), k).energies[0];
      CHECK(e <= prev + 1e-12);
      prev = e;
    }
  }
}

TEST_CASE("on-demand Bloch vectors extend the table smoothly") {
  const BandTable& t = mathieu_table();
  const BlochProblem p = mathieu();
  for (Index j : {0, 17, 64, 128}) {
    const ComplexVector c = t.bloch_vector(t.k_grid()[j]);
    CHECK((c - t.eigvecs().col(j)).norm() < 1e-12);
  }
  // eigenvector of H(k), also beyond the zone
  for (Real k : {0.123, -2.9, 4.0, -7.5}) {
    const ComplexVector c = t.bloch_vector(k);
    const ComplexMatrix h = bloch_hamiltonian(p, k);
    CHECK((h * c - t.energy(k) * c).norm() < 1e-8);
    CHECK(std::abs(c.squaredNorm() - 1) < 1e-12);
  }
  // periodicity in the dual lattice
  const Real g = 2 * kPi;
  CHECK((t.bloch_vector(0.37 + g) - shift_modes(t.bloch_vector(0.37), 1)).norm() < 1e-12);
  CHECK(std::abs(t.berry_potential(0.37 + g) - t.berry_potential(0.37) -
                 (t.berry_potential(g) - t.berry_potential(0))) < 1e-12);
}

TEST_CASE("random gauge: observables invariant, connection consistent") {
  const BandTable& t = mathieu_table();
  auto theta = [](Real k) { return 0.7 * std::sin(k) + 0.3 * std::cos(2 * k + 0.4) + 0.2 * k; };
  const BandTable r = t.with_gauge(theta);
  CHECK(std::abs(r.min_gap() - t.min_gap()) < 1e-14);
  for (Index j = 0; j < t.size(); ++j) {
    CHECK(std::abs(r.energies()[j] - t.energies()[j]) < 1e-14);
    CHECK(std::abs(r.velocities()[j] - t.velocities()[j]) < 1e-14);
    CHECK(std::abs(r.kappa_samples(1)[j] - t.kappa_samples(1)[j]) < 1e-12);
  }
  for (Real k : {-3.0, -0.5, 0.2, 1.7, 2.9, 5.0}) {
    // connection of the on-demand vectors agrees with the closed-form potential
    const Real h = 1e-4;
    const ComplexVector c = r.bloch_vector(k);
    const ComplexVector dc = (r.bloch_vector(k + h) - r.bloch_vector(k - h)) / (2 * h);
    const Real a_fd = c.dot(dc).imag();
    CHECK(std::abs(r.berry_connection(k) - a_fd) < 1e-6);
    const Real a_pot = (r.berry_potential(k + h) - r.berry_potential(k - h)) / (2 * h);
    CHECK(std::abs(r.berry_connection(k) - a_pot) < 1e-7);
    // chi * exp(-i Phi) is independent of the gauge up to a global phase
    const ComplexVector u = t.bloch_vector(k) * std::polar(1.0, -t.berry_potential(k));
    const ComplexVector w = r.bloch_vector(k) * std::polar(1.0, -r.berry_potential(k));
    const ComplexVector u0 = t.bloch_vector(0) * std::polar(1.0, -t.berry_potential(0));
    const ComplexVector w0 = r.bloch_vector(0) * std::polar(1.0, -r.berry_potential(0));
    const Complex global = u0.dot(w0);
    CHECK((w - global * u).norm() < 1e-12);
  }
}

TEST_CASE("corrector vanishes for the free band") {
  const BandTable t = BandTable::build(free_problem(), 1, {65});
  InitialProfile init;
  init.chirp = 0.3;
  init.momentum = 0.2;
  const RealVector x = RealVector::LinSpaced(41, -4, 4);
  const CorrectorField c = well_prepared_corrector(t, init, Confinement::harmonic(), 1.0, 1, x);
  CHECK(c.coeffs.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("corrector matches a dense restricted solve") {
  const BandTable& t = mathieu_table();
  const BlochProblem p = mathieu();
  const Lattice l;
  InitialProfile init;
  const Confinement u = Confinement::harmonic();
  const Real lambda = 1.0;
  const RealVector x = RealVector::LinSpaced(25, -5, 5);
  const CorrectorField c = well_prepared_corrector(t, init, u, lambda, 1, x);

  const ComplexVector chi = t.bloch_vector(0.0);
  const Real h = 1e-3;
  const ComplexVector dchi =
      (8.0 * (aligned(p, 1, h, chi) - aligned(p, 1, -h, chi)) -
       (aligned(p, 1, 2 * h, chi) - aligned(p, 1, -2 * h, chi))) / (12 * h);
  const Index n = p.size();
  // |chi|^2 chi on a fine grid, projected by direct sums
  const int ny = 512;
  ComplexVector f = ComplexVector::Zero(n);
  for (int q = 0; q < ny; ++q) {
    const Real y = static_cast<Real>(q) / ny;
    const Complex v = bloch_wave(chi, y, l);
    for (Index m = 0; m < n; ++m)
      f[m] += std::norm(v) * v * std::polar(1.0, -2 * kPi * (m - 32) * y) / static_cast<Real>(ny);
  }
  ComplexVector pm(n);
  for (Index m = 0; m < n; ++m) pm[m] = (m - 32) * 2 * kPi;

  const ComplexMatrix hk = bloch_hamiltonian(p, 0.0);
  const Real e = bloch_spectrum(p, 0.0).energies[0];
  const ComplexMatrix q = ComplexMatrix::Identity(n, n) - chi * chi.adjoint();
  const ComplexMatrix sys = hk - e * ComplexMatrix::Identity(n, n) + chi * chi.adjoint();

  for (Index i = 0; i < x.size(); ++i) {
    const Real a = init.envelope(x[i]);
    const Real ax = init.envelope_derivative(x[i]);
    const Real kt = -u.gradient(x[i]);
    const ComplexVector r =
        kI * (a * kt * dchi + ax * pm.cwiseProduct(chi)) - lambda * a * a * a * f;
    const ComplexVector ref = q * sys.partialPivLu().solve(q * r);
    CHECK((c.coeffs.col(i) - ref).norm() < 1e-8);
    CHECK(std::abs(chi.dot(c.coeffs.col(i))) < 1e-10);
  }
}
