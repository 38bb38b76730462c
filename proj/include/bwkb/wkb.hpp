#pragma once

#include <optional>

#include "bwkb/bloch.hpp"
#include "bwkb/profile.hpp"
#include "bwkb/rays.hpp"
#include "bwkb/wavefield.hpp"

namespace bwkb {

// Ray data pulled back to a fixed grid at one time.
struct EulerianFields {
  Real t = 0;
  RealVector x;
  RealVector phase;      // phi(t, x)
  RealVector grad_phi;   // unfolded k(t, x)
  RealVector amp;        // a_I(x0) / sqrt(J), x0 = X_t^{-1}(x)
  RealVector omega;      // Berry + nonlinear phase at x0
  RealVector jacobian;   // J(t, x0)
  RealVector launch;     // x0
  Eigen::Array<bool, Eigen::Dynamic, 1> covered;
  Index outside = 0;     // grid points outside the ray fan (set to zero)
};

EulerianFields eulerianize(const RayBundle& bundle, Real t, const RealVector& x_grid,
                           const InitialProfile& initial, const BandTable& band);

// v0(x) = amp chi(x/eps, k) exp(i omega) exp(i phi / eps).
WaveField assemble_v0(const EulerianFields& fields, const BandTable& band, Real epsilon,
                      const UniformGrid& grid);

// psi_I = (a_I chi(x/eps, phi_I') + eps u1(x, x/eps)) exp(i phi_I / eps).
WaveField initial_data(const InitialProfile& initial, const BandTable& band, Real epsilon,
                       const UniformGrid& grid, const CorrectorField* corrector = nullptr);

// chi(y) for a batch of y from plane-wave coefficients.
ComplexVector synthesize_bloch(const ComplexVector& coeffs, const RealVector& y, const Lattice& lattice);

}  // namespace bwkb
