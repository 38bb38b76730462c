#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bwkb/error.hpp"
#include "bwkb/harness.hpp"
#include "oracles.hpp"

using namespace bwkb;

namespace {

WaveField sample(const UniformGrid& g, Real eps, const std::function<Complex(Real)>& f) {
  WaveField w = WaveField::zeros(g, eps);
  for (Index i = 0; i < g.n; ++i) w.values[i] = f(g.x(i));
  return w;
}

}  // namespace

TEST_CASE("error norms") {
  const UniformGrid g{-4 * kPi, 4 * kPi, 4096};
  const WaveField gauss = sample(g, 1.0 / 16, [](Real x) { return std::exp(-0.5 * x * x); });
  const ErrorRecord same = error_norms(gauss, gauss, 2);
  CHECK(same.l2_error == 0.0);
  CHECK(same.linf_error == 0.0);
  for (const auto& [s, v] : same.xs_errors) CHECK(v == 0.0);

  const ErrorRecord r = error_norms(gauss, WaveField::zeros(g, 1.0 / 16), 0);
  CHECK(std::abs(r.l2_error - std::pow(kPi, 0.25)) < 1e-10);
  CHECK(std::abs(r.xs_errors.at(0) - r.l2_error) < 1e-14);
  CHECK(r.l2_error <= std::sqrt(g.length()) * r.linf_error);

  CHECK_THROWS_AS(error_norms(gauss, WaveField::zeros(UniformGrid{-4, 4, 64}, 1.0 / 16), 0), GridMismatch);
}

TEST_CASE("X^1 of an oscillating Gaussian is uniform in epsilon") {
  const UniformGrid g{-4 * kPi, 4 * kPi, 8192};
  auto norm = [](const std::function<Real(Real)>& f) {
    Real sum = 0;
    for (int a = -12; a < 12; ++a)
      sum += oracle::adaptive_simpson([&](Real x) { return f(x) * std::exp(-x * x); }, a, a + 1, 1e-15);
    return std::sqrt(sum);
  };
  for (Real eps : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    const WaveField w = sample(g, eps, [&](Real x) { return std::exp(-0.5 * x * x) * std::polar(1.0, x / eps); });
    // |eps d/dx w| = |i - eps x| |g|
    const Real oracle_x1 = norm([](Real) { return 1.0; }) + norm([](Real x) { return x * x; }) +
                           norm([&](Real x) { return 1 + eps * eps * x * x; });
    CHECK(std::abs(xs_norm(w, 1) - oracle_x1) < 1e-9);
    CHECK(xs_norm(w, 1) < 4.0);
  }
}

TEST_CASE("order fit") {
  const std::vector<Real> eps{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<Real> linear, quadratic;
  for (Real e : eps) {
    linear.push_back(0.3 * e);
    quadratic.push_back(2 * e * e);
  }
  CHECK(fit_order(eps, linear).order == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit_order(eps, quadratic).order == doctest::Approx(2.0).epsilon(1e-12));
  const OrderFit partial = fit_order(eps, {1e-2, 5e-3, 1e-13, 2.5e-3 / 2});
  CHECK(partial.used == 3);
  const OrderFit floor = fit_order(eps, {1e-15, 1e-14, 3e-12, 2e-11});
  CHECK(floor.floor);
  CHECK(std::isnan(floor.order));
}

TEST_CASE("scenario plumbing") {
  const Scenario s = full_scenario();
  CHECK(s.snapshot_times().size() == 8);
  CHECK(s.snapshot_times().back() == s.tau);
  CHECK(s.nls_dt(1.0 / 32) == doctest::Approx(0.1 / 1024));
  CHECK(s.nls_dt(2.0) == doctest::Approx(0.2));
  CHECK(s.grid(1.0 / 32).n == 16384);
  CHECK_THROWS_AS(builtin_scenario("nope"), ConfigError);
}

TEST_CASE("trivial linear scenario sits at the floor") {
  Scenario s = linear_free_scenario();
  const ConvergenceReport r = convergence_sweep(s, {1.0 / 8, 1.0 / 16});
  REQUIRE(r.records.size() == 2);
  for (const auto& rec : r.records) {
    CHECK(rec.ok());
    CHECK(rec.floor());
  }
  CHECK(r.l2.floor);
}

TEST_CASE("sweep safeguards") {
  Scenario s = linear_free_scenario();
  s.name = "harmonic_free";
  s.confinement = Confinement::harmonic();
  s.tau = 2.0;
  CHECK_THROWS_AS(convergence_sweep(s, {1.0 / 8}), PostCaustic);

  Scenario leaky = spm_scenario();
  leaky.x_min = -4;
  leaky.x_max = 4;
  leaky.ray_half_width = 4;
  leaky.tau = 0.5;
  leaky.edge_tol = 1e-12;
  const ConvergenceReport r = convergence_sweep(leaky, {1.0 / 8, 1.0 / 16});
  REQUIRE(r.records.size() == 2);
  for (const auto& rec : r.records) {
    CHECK_FALSE(rec.ok());
    CHECK(rec.failure.find("edge") != std::string::npos);
  }
}

TEST_CASE("self-phase modulation at the peak") {
  const SpmResult r = self_phase_modulation(spm_scenario(), 1.0 / 16);
  CHECK(r.predicted == doctest::Approx(-1.0));
  CHECK(r.deviation < 5.0 / 16);
}

TEST_CASE("mass growth law until overflow") {
  Scenario s = spm_scenario();
  s.lambda = Complex(0, 1);
  s.edge_tol = std::numeric_limits<Real>::infinity();
  const MassGrowth g = track_mass_growth(s, 1.0 / 16, 2.0);
  CHECK(std::isfinite(g.overflow_time));
  CHECK(g.overflow_time > 0.5);
  CHECK(g.overflow_time < 0.51);
  CHECK(g.worst_ratio < 10);
}
