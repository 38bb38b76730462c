#pragma once

#include "bwkb/bloch.hpp"
#include "bwkb/wavefield.hpp"
#include "bwkb/wkb.hpp"

namespace bwkb {

struct WignerOptions {
  // x window; empty (x_min >= x_max) means the whole box
  Real x_min = 0;
  Real x_max = 0;
  Real eta_max = 0;        // 0: a quarter of the box length
  Index xi_points = 256;   // raised to 2J+1 if needed so one xi period is resolved
  Real xi_center = 0;
  Real mollifier = 0;      // Gaussian width in x, 0 for none
  Index x_stride = 1;      // output subsampling after mollification
};

// W(x, xi) = dEta/(2 pi) sum_j w(eta_j) psi(x - eps eta_j/2) conj psi(x + eps eta_j/2) e^{i xi eta_j}
// with eta_j = 2 j dx / eps and a Hann window w over |eta| <= eta_max. The xi grid spans
// exactly one period 2 pi / dEta, so the discrete marginal is |psi|^2 up to round-off.
struct WignerGrid {
  RealVector x, xi;
  RealMatrix values;       // rows: x, columns: xi
  Real dx = 0, dxi = 0;
  Real eta_max = 0, deta = 0;
  Index half_width = 0;    // J
  Real mollifier = 0;
  RealVector density;      // |psi|^2 on x after the same mollification

  // Fourier resolution of the eta window, pi / eta_max
  Real resolution() const { return kPi / eta_max; }
  Real integral() const { return values.sum() * dx * dxi; }
  // L1 of (int W dxi - density) relative to int density
  Real marginal_defect() const;
};

WignerGrid wigner_transform(const WaveField& psi, const WignerOptions& opts = {});

// Mollified limit measure |a0|^2 sum_m |c_m(k)|^2 delta(xi - k - m G) on the layout of
// wigner_transform(psi, opts); fields must live on psi's grid. The delta lines get the
// same eta window, so prediction and transform share one kernel.
WignerGrid wigner_predicted(const EulerianFields& fields, const BandTable& band, Real epsilon,
                            const UniformGrid& grid, const WignerOptions& opts = {});

// x window strictly inside the ray fan, shrunk by the mollifier's reach
WignerOptions fan_window(const EulerianFields& fields, Real mollifier);

// sum |a - b| / sum |b| over the common grid
Real wigner_l1_discrepancy(const WignerGrid& numerical, const WignerGrid& predicted);

}  // namespace bwkb
