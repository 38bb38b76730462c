#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bwkb/error.hpp"
#include "bwkb/lattice.hpp"

using namespace bwkb;

TEST_CASE("lattice geometry") {
  const Lattice l = make_lattice(2.5);
  CHECK(l.dual_period() * l.period == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(l.y_domain().second - l.y_domain().first == doctest::Approx(2.5));
  CHECK(l.brillouin().second - l.brillouin().first == doctest::Approx(l.dual_period()));
  CHECK_THROWS_AS(make_lattice(0.0), InvalidArgument);
  CHECK_THROWS_AS(make_lattice(-1.0), InvalidArgument);
}

TEST_CASE("potential from Fourier modes") {
  const Lattice l;
  const auto empty = make_potential_from_fourier(l, {});
  CHECK(eval_potential(empty, 1.7) == 0.0);

  const auto cosine = make_potential_from_fourier(l, {{1, 0.5}, {-1, 0.5}});
  CHECK(eval_potential(cosine, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(eval_potential(cosine, 0.25)) < 1e-15);
  CHECK(eval_potential(cosine, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(eval_potential(cosine, 1.5) == doctest::Approx(-1.0).epsilon(1e-15));

  const auto constant = make_potential_from_fourier(l, {{0, 0.75}});
  CHECK(eval_potential(constant, 0.3) == doctest::Approx(0.75));

  CHECK_THROWS_AS(make_potential_from_fourier(l, {{1, 0.5}, {-1, 0.4}}), InvalidArgument);
  CHECK_THROWS_AS(make_potential_from_fourier(l, {{1, 0.5}, {1, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(make_potential_from_fourier(l, {{0, Complex(1, 1)}}), InvalidArgument);
}

TEST_CASE("potential presets") {
  CHECK(potential_from_preset("zero").is_zero());
  const auto m = potential_from_preset("mathieu:amplitude=2");
  CHECK(m(0.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(potential_from_preset("bogus"), InvalidArgument);
}

TEST_CASE("random potentials are real and periodic") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<Real> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const Lattice l = make_lattice(0.5 + std::abs(u(rng)));
    std::vector<std::pair<int, Complex>> modes{{0, u(rng)}};
    for (int m = 1; m <= 4; ++m) {
      const Complex c(u(rng), u(rng));
      modes.emplace_back(m, c);
      modes.emplace_back(-m, std::conj(c));
    }
    const auto v = make_potential_from_fourier(l, modes);
    for (int i = 0; i < 100; ++i) {
      const Real y = 10 * u(rng);
      // direct complex sum keeps the imaginary part visible
      Complex direct = 0;
      for (const auto& [m, c] : modes) direct += c * std::polar(1.0, m * l.dual_period() * y);
      CHECK(std::abs(direct.imag()) < 1e-12);
      CHECK(std::abs(v(y + l.period) - v(y)) < 1e-12);
      CHECK(std::abs(v(y) - direct.real()) < 1e-12);
    }
  }
}

TEST_CASE("potential from samples recovers the series") {
  const Lattice l;
  RealVector samples(64);
  for (Index j = 0; j < 64; ++j) {
    const Real y = j / 64.0;
    samples[j] = 0.3 + std::cos(2 * kPi * y) - 0.2 * std::sin(4 * kPi * y);
  }
  const auto v = potential_from_samples(l, samples, 4);
  for (Real y : {0.0, 0.13, 0.77})
    CHECK(v(y) == doctest::Approx(0.3 + std::cos(2 * kPi * y) - 0.2 * std::sin(4 * kPi * y)));
}

TEST_CASE("physical scaling") {
  const auto r = scale_physical_params(3.4e-6, 5.4e-9, 1.5e5, 100.0);
  CHECK(std::abs(r.epsilon / 4.3e-3 - 1) < 0.15);
  CHECK(std::abs(r.xi / 4.6e6 - 1) < 0.15);
  CHECK(std::abs(r.epsilon / std::pow(3.4e-6 / r.x_s, 2) - 1) < 1e-12);

  const auto unit = scale_physical_params(1.0, 1.0 / (4 * kPi), 1.0, 1.0);
  CHECK(unit.epsilon == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(unit.x_s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(scale_physical_params(-1, 1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(scale_physical_params(1, 1, 0, 1), InvalidArgument);
}
