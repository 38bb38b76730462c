#pragma once

#include <functional>
#include <string>

#include "bwkb/types.hpp"

namespace bwkb {

// Initial WKB data: Gaussian envelope a_I and a polynomial phase phi_I of degree <= 2.
struct InitialProfile {
  Real amplitude = 1.0;
  Real center = 0.0;
  Real width = 1.0;
  Real momentum = 0.0;   // phi_I'(0)
  Real chirp = 0.0;      // phi_I''

  Real envelope(Real x) const;
  Real envelope_derivative(Real x) const;
  Real phase(Real x) const { return x * (momentum + 0.5 * chirp * x); }
  Real phase_gradient(Real x) const { return momentum + chirp * x; }
  Real phase_hessian(Real) const { return chirp; }
  // centre +- `widths` standard deviations of the envelope
  std::pair<Real, Real> support(Real widths = 6.0) const {
    return {center - widths * width, center + widths * width};
  }
  Real l2_norm() const;
};

// Time-dependent coupling lambda(t); complex values are only meaningful in the
// blow-up experiment and the direct solver.
struct Coupling {
  std::function<Complex(Real)> fn = [](Real) { return Complex(0.0); };
  std::string description = "constant:0";

  Complex operator()(Real t) const { return fn(t); }
  bool is_real() const;  // checked for a constant coupling
  static Coupling constant(Complex value);
};

}  // namespace bwkb
