#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bwkb/error.hpp"
#include "bwkb/wkb.hpp"
#include "oracles.hpp"

using namespace bwkb;

namespace {

const BandTable& free_band() {
  static const BandTable t = BandTable::build({zero_potential(), 16, 3}, 1);
  return t;
}
const BandTable& mathieu_band() {
  static const BandTable t = BandTable::build({cosine_potential(1.0), 32, 4}, 1);
  return t;
}

RayBundle fan(const BandTable& band, const Confinement& u, const InitialProfile& init, Real lambda,
              Real t_end, Real dt = 1e-3, Index rays = 601, Real half_width = 6) {
  return trace_bundle(band, u, RealVector::LinSpaced(rays, -half_width, half_width), init, 1,
                      Coupling::constant(lambda), t_end, dt);
}

}  // namespace

TEST_CASE("identity flow at t = 0") {
  InitialProfile init;
  init.chirp = 0.2;
  init.momentum = 0.1;
  const RayBundle b = fan(mathieu_band(), Confinement::harmonic(), init, 1.0, 0.1);
  const RealVector x = RealVector::LinSpaced(200, -5, 5);
  const EulerianFields f = eulerianize(b, 0.0, x, init, mathieu_band());
  CHECK(f.outside == 0);
  for (Index i = 0; i < x.size(); ++i) {
    CHECK(std::abs(f.phase[i] - init.phase(x[i])) < 1e-12);
    CHECK(std::abs(f.grad_phi[i] - init.phase_gradient(x[i])) < 1e-12);
    CHECK(std::abs(f.amp[i] - init.envelope(x[i])) < 1e-12);
    CHECK(std::abs(f.omega[i]) < 1e-12);
  }
}

TEST_CASE("straight rays transport the envelope") {
  InitialProfile init;
  init.momentum = 0.8;
  const RayBundle b = fan(free_band(), Confinement::zero(), init, 0.0, 1.0, 1e-2, 241);
  const RealVector x = RealVector::LinSpaced(300, -4, 5);
  const Real t = 1.0;
  const EulerianFields f = eulerianize(b, t, x, init, free_band());
  for (Index i = 0; i < x.size(); ++i) {
    if (!f.covered[i]) continue;
    CHECK(std::abs(f.amp[i] - init.envelope(x[i] - 0.8 * t)) < 1e-10);
    CHECK(std::abs(f.phase[i] - (0.8 * x[i] - 0.32 * t)) < 1e-10);
  }
  // the fan [-6, 6] moved by 0.8
  CHECK(f.outside == 0);
  const EulerianFields wide = eulerianize(b, t, RealVector::LinSpaced(50, 6, 8), init, free_band());
  CHECK(wide.outside > 0);
  for (Index i = 0; i < 50; ++i)
    if (!wide.covered[i]) CHECK(wide.amp[i] == 0.0);
}

TEST_CASE("harmonic pull-back of the Jacobian") {
  const RayBundle b = fan(free_band(), Confinement::harmonic(), {}, 0.0, kPi / 4, kPi / 4000, 301, 3);
  const RealVector x = RealVector::LinSpaced(200, -2, 2);
  const EulerianFields f = eulerianize(b, kPi / 4, x, {}, free_band());
  CHECK(f.outside == 0);
  CHECK((f.jacobian.array() - std::cos(kPi / 4)).abs().maxCoeff() < 1e-6);
  // modulus law and d phi / dx = k
  for (Index i = 0; i < x.size(); ++i)
    CHECK(std::abs(f.amp[i] * std::sqrt(f.jacobian[i]) - std::abs(InitialProfile{}.envelope(f.launch[i]))) < 1e-8);
  const Real dx = x[1] - x[0];
  for (Index i = 1; i + 1 < x.size(); ++i)
    CHECK(std::abs((f.phase[i + 1] - f.phase[i - 1]) / (2 * dx) - f.grad_phi[i]) < 1e-4);
}

TEST_CASE("post-caustic times are rejected") {
  const RayBundle b = fan(free_band(), Confinement::harmonic(), {}, 0.0, 2.0, 1e-2, 41, 2);
  CHECK(b.caustic_time < 2.0);
  CHECK_THROWS_AS(eulerianize(b, 1.6, RealVector::LinSpaced(10, -1, 1), {}, free_band()), PostCaustic);
  CHECK_THROWS_AS(eulerianize(b, 0.105, RealVector::LinSpaced(10, -1, 1), {}, free_band()), InvalidArgument);
}

TEST_CASE("assembly at t = 0 is the initial datum") {
  const Real eps = 1.0 / 16;
  const UniformGrid g = wave_grid(-8, 8, eps);
  InitialProfile init;
  init.chirp = 0.3;
  const RayBundle b = fan(mathieu_band(), Confinement::harmonic(), init, 1.0, 0.1, 1e-3, 801, 8);
  const EulerianFields f = eulerianize(b, 0.0, g.points(), init, mathieu_band());
  const WaveField v = assemble_v0(f, mathieu_band(), eps, g);
  const WaveField psi = initial_data(init, mathieu_band(), eps, g);
  CHECK((v.values - psi.values).cwiseAbs().maxCoeff() < 1e-10);
  // direct evaluation of the definition
  for (Index i = 0; i < g.n; i += 37) {
    const Real x = g.x(i);
    const Complex chi = bloch_wave(mathieu_band().bloch_vector(init.phase_gradient(x)), x / eps, Lattice{});
    const Complex ref = init.envelope(x) * chi * std::polar(1.0, init.phase(x) / eps);
    CHECK(std::abs(psi.values[i] - ref) < 1e-10);
  }
}

TEST_CASE("free band: |v0| equals the amplitude") {
  const Real eps = 1.0 / 32;
  const UniformGrid g = wave_grid(-8, 8, eps);
  const RayBundle b = fan(free_band(), Confinement::harmonic(), {}, 1.0, 0.5, 1e-3, 401, 3);
  const EulerianFields f = eulerianize(b, 0.5, g.points(), {}, free_band());
  const WaveField v = assemble_v0(f, free_band(), eps, g);
  CHECK((v.values.cwiseAbs() - f.amp).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("two-scale norm of v0") {
  InitialProfile init;
  const Lattice l;
  const ComplexVector c = mathieu_band().bloch_vector(0.0);
  const RayBundle b = fan(mathieu_band(), Confinement::harmonic(), init, 1.0, 0.1, 1e-3, 801, 8);
  for (Real eps : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    const UniformGrid g = wave_grid(-8, 8, eps);
    const EulerianFields f = eulerianize(b, 0.0, g.points(), init, mathieu_band());
    const WaveField v = assemble_v0(f, mathieu_band(), eps, g);
    Real oracle_sq = 0;
    const int cells = static_cast<int>(std::lround(16 / eps));
    for (int cell = -cells; cell < cells; ++cell) {
      const Real a = cell * eps * 0.5, z = a + 0.5 * eps;
      oracle_sq += oracle::adaptive_simpson(
          [&](Real x) { return std::pow(init.envelope(x) * std::abs(bloch_wave(c, x / eps, l)), 2); }, a, z, 1e-15);
    }
    CHECK(std::abs(mass(v) - std::sqrt(oracle_sq)) < 1e-8);
    CHECK(std::abs(mass(v) - init.l2_norm()) < eps);
  }
}

TEST_CASE("modulus does not see the sign of the coupling") {
  const Real eps = 1.0 / 16;
  const UniformGrid g = wave_grid(-8, 8, eps);
  const RayBundle plus = fan(mathieu_band(), Confinement::harmonic(), {}, 1.0, 0.4);
  const RayBundle minus = fan(mathieu_band(), Confinement::harmonic(), {}, -1.0, 0.4);
  const WaveField vp = assemble_v0(eulerianize(plus, 0.4, g.points(), {}, mathieu_band()), mathieu_band(), eps, g);
  const WaveField vm = assemble_v0(eulerianize(minus, 0.4, g.points(), {}, mathieu_band()), mathieu_band(), eps, g);
  CHECK((vp.values.cwiseAbs() - vm.values.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((vp.values - vm.values).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("synthesis is resolved at 16 points per cell") {
  const Real eps = 1.0 / 16;
  const RayBundle b = fan(mathieu_band(), Confinement::harmonic(), {}, 1.0, 0.4);
  auto norm_at = [&](int ppc) {
    const UniformGrid g = wave_grid(-8, 8, eps, 1.0, ppc);
    return mass(assemble_v0(eulerianize(b, 0.4, g.points(), {}, mathieu_band()), mathieu_band(), eps, g));
  };
  CHECK(std::abs(norm_at(16) - norm_at(32)) < 1e-8);
  const UniformGrid coarse{-8, 8, 512};
  CHECK_THROWS_AS(initial_data({}, mathieu_band(), eps, coarse), InvalidArgument);
}

TEST_CASE("initial data with and without corrector") {
  const Real eps = 1.0 / 16;
  const UniformGrid g = wave_grid(-8, 8, eps);
  InitialProfile init;
  init.chirp = 0.5;
  const CorrectorField zero_corr =
      well_prepared_corrector(free_band(), init, Confinement::harmonic(), 1.0, 1, g.points());
  const WaveField bare = initial_data(init, free_band(), eps, g);
  const WaveField corrected = initial_data(init, free_band(), eps, g, &zero_corr);
  CHECK((bare.values - corrected.values).cwiseAbs().maxCoeff() < 1e-13);

  InitialProfile empty;
  empty.amplitude = 0;
  CHECK(initial_data(empty, mathieu_band(), eps, g).values.cwiseAbs().maxCoeff() == 0.0);

  InitialProfile flat;
  Real prev = 0;
  for (Real e : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    const UniformGrid ge = wave_grid(-8, 8, e);
    const CorrectorField c = well_prepared_corrector(mathieu_band(), flat, Confinement::harmonic(), 1.0, 1, ge.points());
    const Real diff = std::abs(mass(initial_data(flat, mathieu_band(), e, ge, &c)) -
                               mass(initial_data(flat, mathieu_band(), e, ge)));
    CHECK(diff < 2 * e);
    if (prev > 0) CHECK(diff < prev);
    prev = diff;
  }
}

TEST_CASE("v0 is gauge invariant") {
  const Real eps = 1.0 / 32;
  const UniformGrid g = wave_grid(-8, 8, eps);
  const BandTable twisted = mathieu_band().with_gauge(
      [](Real k) { return 1.3 * std::sin(k + 0.3) + 0.4 * std::cos(3 * k) + 0.25 * k; });
  const Real t = 0.5;
  const RayBundle a = fan(mathieu_band(), Confinement::harmonic(), {}, 1.0, t);
  const RayBundle b = fan(twisted, Confinement::harmonic(), {}, 1.0, t);
  const WaveField va = assemble_v0(eulerianize(a, t, g.points(), {}, mathieu_band()), mathieu_band(), eps, g);
  const WaveField vb = assemble_v0(eulerianize(b, t, g.points(), {}, twisted), twisted, eps, g);
  CHECK((va.values.cwiseAbs() - vb.values.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-8);
  Index ref = 0;
  va.values.cwiseAbs().maxCoeff(&ref);
  const Complex align = va.values[ref] / vb.values[ref];
  Real worst = 0;
  for (Index i = 0; i < g.n; ++i)
    if (std::abs(va.values[i]) > 1e-3)
      worst = std::max(worst, std::abs(std::arg(vb.values[i] * align / va.values[i])));
  CHECK(worst < 1e-6);
}
