#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bwkb/types.hpp"

namespace bwkb {

// One-dimensional Bravais lattice with generator `period`.
struct Lattice {
  Real period = 1.0;

  Real dual_period() const { return 2.0 * kPi / period; }
  std::pair<Real, Real> y_domain() const { return {-0.5 * period, 0.5 * period}; }
  std::pair<Real, Real> brillouin() const { return {-kPi / period, kPi / period}; }
};

Lattice make_lattice(Real period = 1.0);

// Real periodic potential stored as its truncated Fourier series
//   V(y) = sum_m c_m exp(i m G y),  G = dual period,  |m| <= max_mode.
class PeriodicPotential {
 public:
  PeriodicPotential() = default;
  PeriodicPotential(Lattice lattice, ComplexVector coeffs);

  const Lattice& lattice() const { return lattice_; }
  int max_mode() const { return max_mode_; }
  // coefficient of mode m, zero outside the stored range
  Complex coeff(int m) const;
  // dense coefficients ordered m = -max_mode .. max_mode
  const ComplexVector& coeffs() const { return coeffs_; }
  bool is_zero() const;

  Real operator()(Real y) const;
  RealVector operator()(const RealVector& y) const;

 private:
  Lattice lattice_;
  int max_mode_ = 0;
  ComplexVector coeffs_ = ComplexVector::Zero(1);
};

PeriodicPotential make_potential_from_fourier(
    const Lattice& lattice, const std::vector<std::pair<int, Complex>>& coeffs);

Real eval_potential(const PeriodicPotential& v, Real y);

PeriodicPotential zero_potential(const Lattice& lattice = {});
// amplitude * cos(G y)
PeriodicPotential cosine_potential(Real amplitude, const Lattice& lattice = {});
// "zero", "cosine", "mathieu:amplitude=A"
PeriodicPotential potential_from_preset(const std::string& preset,
                                        const Lattice& lattice = {});

// Sampled potential on `samples` uniform points of one cell, truncated to |m| <= max_mode.
PeriodicPotential potential_from_samples(const Lattice& lattice, const RealVector& samples,
                                         int max_mode);

struct ScalingReport {
  Real epsilon = 0;
  Real x_s = 0;         // m
  Real xi = 0;          // 1/m
  Real time_scale = 0;  // s, 1/omega0
  std::string lambda_ratio = "delta(t)/delta_bar";
};

ScalingReport scale_physical_params(Real a0, Real a_bar, Real n_particles, Real omega0);

}  // namespace bwkb
