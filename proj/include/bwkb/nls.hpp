#pragma once

#include <vector>

#include "bwkb/confinement.hpp"
#include "bwkb/lattice.hpp"
#include "bwkb/profile.hpp"
#include "bwkb/spectral.hpp"
#include "bwkb/wavefield.hpp"

namespace bwkb {

// i eps psi_t = -eps^2/2 psi_xx + V(x/eps) psi + U(x) psi + eps lambda(t) |psi|^{2 sigma} psi
// on a periodic box.
struct NlsConfig {
  Real epsilon = 1;
  int sigma = 1;
  Coupling lambda = Coupling::constant(0.0);
  PeriodicPotential potential;
  Confinement confinement;
  UniformGrid grid;
  Real dt = 1e-3;
  Real dt_factor = 0.1;           // dt must not exceed dt_factor * epsilon
  std::vector<Real> snapshot_times;
  Real edge_tol = 1e-10;
  Real overflow_threshold = 1e12;  // on |psi|^2
};

void validate(const NlsConfig& config);

// Strang splitting: half potential/nonlinear rotation, exact kinetic step in
// Fourier space, second half rotation.
class SplitStepSolver {
 public:
  SplitStepSolver(const NlsConfig& config, WaveField psi0);

  void step(Real h);
  // several equal steps ending exactly at t_target
  void advance_to(Real t_target);

  const WaveField& state() const { return psi_; }
  Real time() const { return psi_.t; }
  Index steps_taken() const { return steps_; }
  // max |psi| over the outermost points of the box
  Real edge_magnitude() const;

 private:
  void half_rotation(Real h, Real t_mid);
  void kinetic();

  NlsConfig config_;
  WaveField psi_;
  RealVector slow_fast_;   // V(x/eps) + U(x)
  RealVector xi2_;         // box wavenumbers squared
  Fft fft_;
  ComplexVector spec_;
  Real cached_h_ = -1;
  ComplexVector kinetic_phase_, potential_phase_;
  Index steps_ = 0;
};

std::vector<WaveField> solve_nls(const NlsConfig& config, const WaveField& psi0);

}  // namespace bwkb
