#include "bwkb/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

#include "bwkb/error.hpp"
#include "bwkb/spectral.hpp"

namespace bwkb {

Lattice make_lattice(Real period) {
  if (!(period > 0) || !std::isfinite(period))
    throw InvalidArgument("lattice period must be positive, got " + std::to_string(period));
  return Lattice{period};
}

PeriodicPotential::PeriodicPotential(Lattice lattice, ComplexVector coeffs)
    : lattice_(lattice), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() % 2 == 0) throw InvalidArgument("potential needs 2M+1 coefficients");
  max_mode_ = static_cast<int>((coeffs_.size() - 1) / 2);
}

Complex PeriodicPotential::coeff(int m) const {
  if (std::abs(m) > max_mode_) return 0.0;
  return coeffs_[m + max_mode_];
}

bool PeriodicPotential::is_zero() const { return coeffs_.cwiseAbs().maxCoeff() == 0.0; }

Real PeriodicPotential::operator()(Real y) const {
  const Real g = lattice_.dual_period();
  // reduce first so that y and y + period give the same rounding
  const Real y0 = y - lattice_.period * std::floor(y / lattice_.period);
  Real v = coeffs_[max_mode_].real();
  for (int m = 1; m <= max_mode_; ++m) {
    const Complex e = std::polar(1.0, m * g * y0);
    v += 2.0 * (coeffs_[max_mode_ + m] * e).real();
  }
  return v;
}

RealVector PeriodicPotential::operator()(const RealVector& y) const {
  return y.unaryExpr([this](Real t) { return (*this)(t); });
}

PeriodicPotential make_potential_from_fourier(
    const Lattice& lattice, const std::vector<std::pair<int, Complex>>& coeffs) {
  std::map<int, Complex> modes;
  for (const auto& [m, c] : coeffs) {
    if (!modes.emplace(m, c).second)
      throw InvalidArgument("duplicate Fourier mode " + std::to_string(m));
  }
  int max_mode = 0;
  for (const auto& [m, c] : modes) max_mode = std::max(max_mode, std::abs(m));

  ComplexVector dense = ComplexVector::Zero(2 * max_mode + 1);
  for (const auto& [m, c] : modes) dense[m + max_mode] = c;

  for (int m = 0; m <= max_mode; ++m) {
    const Complex a = dense[max_mode + m];
    const Complex b = dense[max_mode - m];
    const Real asym = std::abs(a - std::conj(b));
    if (asym > 1e-12)
      throw InvalidArgument("potential is not real: mode " + std::to_string(m) +
                            " breaks conj symmetry by " + std::to_string(asym));
    const Complex sym = 0.5 * (a + std::conj(b));
    dense[max_mode + m] = sym;
    dense[max_mode - m] = std::conj(sym);
  }
  return PeriodicPotential(lattice, std::move(dense));
}

Real eval_potential(const PeriodicPotential& v, Real y) { return v(y); }

PeriodicPotential zero_potential(const Lattice& lattice) {
  return PeriodicPotential(lattice, ComplexVector::Zero(1));
}

PeriodicPotential cosine_potential(Real amplitude, const Lattice& lattice) {
  return make_potential_from_fourier(lattice, {{1, 0.5 * amplitude}, {-1, 0.5 * amplitude}});
}

PeriodicPotential potential_from_preset(const std::string& preset, const Lattice& lattice) {
  if (preset == "zero") return zero_potential(lattice);
  if (preset == "cosine" || preset == "mathieu") return cosine_potential(1.0, lattice);
  static const std::regex mathieu(R"(\s*mathieu\s*:\s*amplitude\s*=\s*([-+0-9.eE]+)\s*)");
  std::smatch match;
  if (std::regex_match(preset, match, mathieu)) return cosine_potential(std::stod(match[1]), lattice);
  throw InvalidArgument("unknown potential preset '" + preset + "'");
}

PeriodicPotential potential_from_samples(const Lattice& lattice, const RealVector& samples,
                                         int max_mode) {
  if (samples.size() < 2 * max_mode + 1)
    throw InvalidArgument("too few samples for the requested truncation");
  Fft fft;
  ComplexVector c = analyze_periodic(samples.cast<Complex>(), max_mode, fft);
  // samples are taken on [0, period); the series is in y measured from 0 as well
  std::vector<std::pair<int, Complex>> modes;
  for (int m = -max_mode; m <= max_mode; ++m) modes.emplace_back(m, c[m + max_mode]);
  // round-off in the transform can exceed the strict check; symmetrize here
  for (int m = 1; m <= max_mode; ++m) {
    const Complex s = 0.5 * (c[max_mode + m] + std::conj(c[max_mode - m]));
    modes[max_mode + m].second = s;
    modes[max_mode - m].second = std::conj(s);
  }
  modes[max_mode].second = c[max_mode].real();
  return make_potential_from_fourier(lattice, modes);
}

ScalingReport scale_physical_params(Real a0, Real a_bar, Real n_particles, Real omega0) {
  if (!(a0 > 0 && a_bar > 0 && n_particles > 0 && omega0 > 0))
    throw InvalidArgument("physical parameters must be positive");
  const Real c = 4.0 * kPi * n_particles * a_bar;
  ScalingReport r;
  r.x_s = std::cbrt(c * a0 * a0);
  r.epsilon = std::pow(a0 / c, 2.0 / 3.0);
  r.xi = std::pow(a0, -4.0 / 3.0) * std::cbrt(c);
  r.time_scale = 1.0 / omega0;
  return r;
}

}  // namespace bwkb
